"""Shared fixtures: the worked Talenti configuration on R^3 and its grids."""

from __future__ import annotations

import numpy as np
import pytest

from pdihardy import (
    PDIProblem,
    QuadratureGrid,
    RadialDomain,
    ScalarFunction,
    WeightFunction,
    make_talenti_profile,
    power_pair,
)
from pdihardy.model import RadialProfile

R3 = RadialDomain(3, 0.0, 1e3, "full-space-truncated")


def talenti_setup(size: int = 4000):
    """-Delta u = 3 u^5 on R^3 with u = (1 + r^2)^{-1/2}, Psi = 1/t, g = t, C = 1."""
    grid = QuadratureGrid.log_spaced(R3, size, 1e-6)
    u = make_talenti_profile(3, 2, 0, 3, grid)
    b = WeightFunction.tabulated(RadialProfile(grid.nodes, 3 * u.values**4))
    problem = PDIProblem(R3, 2.0, WeightFunction.constant(1.0), b, ScalarFunction.identity())
    return problem, u, power_pair(1.0), grid


@pytest.fixture(scope="session")
def talenti():
    return talenti_setup()


@pytest.fixture(scope="session")
def talenti_fine():
    return talenti_setup(8000)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
