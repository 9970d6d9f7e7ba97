"""Property-based checks of the invariants shared across modules."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdihardy import (
    PDIProblem,
    QuadratureGrid,
    RadialDomain,
    RadialProfile,
    ScalarFunction,
    WeightFunction,
    caccioppoli_constant,
    compute_sigma0,
    hardy_mu2_constant,
    hp_constant,
    young_split,
)
from pdihardy.constants import sobolev_exponent
from pdihardy.hardy import hardy_sides
from pdihardy.rayleigh import rayleigh_quotient, two_weight_data
from pdihardy.testfunctions import library
from pdihardy.transforms import RadialMap

FAST = settings(max_examples=200, deadline=None)
SLOW = settings(max_examples=25, deadline=None)

pos = st.floats(min_value=0.0, max_value=1e3, allow_nan=False)
expo = st.floats(min_value=1.01, max_value=5.0)
taus = st.floats(min_value=1e-3, max_value=10.0)

LINE = RadialDomain(1, 0.0, 1.0, "interval-1d")
R_LINE = np.linspace(0.0, 1.0, 9)
G_T = ScalarFunction(lambda t: np.array(t, dtype=float), "t")


@FAST
@given(pos, pos, expo, taus)
def test_young_split_inequality(s1, s2, p, tau):
    lhs, rhs = young_split(s1, s2, p, tau)
    assert lhs <= rhs * (1 + 1e-12) + 1e-300


@FAST
@given(st.floats(min_value=1e-3, max_value=1e2), expo, taus)
def test_young_split_equality(s2, p, tau):
    lhs, rhs = young_split(tau * s2, s2, p, tau)
    assert lhs == pytest.approx(rhs, rel=1e-12)


@FAST
@given(expo, st.floats(min_value=0.1, max_value=5.0), st.floats(min_value=-5.0, max_value=0.99))
def test_constants_related_by_p_to_the_p(p, C, frac):
    sigma = frac * C
    c = caccioppoli_constant(p, C, sigma)
    assert c * p**p == pytest.approx(hardy_mu2_constant(p, C, sigma), rel=1e-12)


@FAST
@given(st.integers(min_value=2, max_value=8), st.floats(min_value=1.1, max_value=6.0),
       st.floats(min_value=1.05, max_value=20.0))
def test_hp_constant_unit_r_closed_form(n, p, gamma):
    expected = n * (p * (gamma - 1) / (p - 1)) ** (p - 1)
    assert hp_constant(n, p, gamma, 1.0).value == expected


@FAST
@given(st.lists(st.floats(min_value=-5.0, max_value=5.0, allow_subnormal=False), min_size=9, max_size=9),
       st.lists(st.floats(min_value=0.0, max_value=5.0, allow_subnormal=False), min_size=9, max_size=9))
def test_sigma0_nonincreasing_in_b(b, extra):
    # u = 2 - r, a = 1, p = 2, Phi = t, g = t on [0, 1]: s = -b u^2
    u = RadialProfile(R_LINE, 2 - R_LINE, -np.ones(9))
    b1 = np.array(b)
    b2 = b1 + np.array(extra)

    def sigma0(vals):
        w = WeightFunction.tabulated(RadialProfile(R_LINE, vals), signed=True)
        return compute_sigma0(PDIProblem(LINE, 2.0, WeightFunction.constant(1.0), w, ScalarFunction.identity()),
                              u, G_T).sigma0

    s1, s2 = sigma0(b1), sigma0(b2)
    assert s2 <= s1 + 1e-12 * max(1.0, abs(s1))
    assert s1 == pytest.approx(np.max(-b1 * (2 - R_LINE) ** 2), rel=1e-14, abs=1e-300)


@SLOW
@given(st.integers(min_value=0, max_value=10_000))
def test_hardy_margins_on_library(seed):
    # Talenti data: mu1 = 3 (1 + r^2)^-2, mu2 = 1 on R^3
    grid = QuadratureGrid.log_spaced(RadialDomain(3, 0.0, 1e3), 2000, 1e-6)
    hd = two_weight_data(WeightFunction.talenti(-2.0, 2.0).scaled(3.0), WeightFunction.constant(1.0))
    for name, xi in library(grid, 2.0, seed=seed, count=4, support=(1e-3, 1e2)):
        lhs, rhs = hardy_sides(hd, xi, 2.0, grid)
        assert lhs <= rhs * (1 + 1e-9) + 1e-12, name


@FAST
@given(st.floats(min_value=1e-3, max_value=1e3), st.sampled_from([-1.0, 1.0]), st.floats(min_value=1.2, max_value=4.0))
def test_quotient_zero_homogeneous_and_sides_p_homogeneous(lam, sign, p):
    grid = QuadratureGrid.uniform(RadialDomain(1, 0.0, math.pi, "interval-1d"), 201)
    hd = two_weight_data(WeightFunction.constant(1.0), WeightFunction.power(1.0))
    r = grid.nodes
    xi = RadialProfile(r, np.sin(r), np.cos(r))
    scaled = xi.scaled(sign * lam)
    assert rayleigh_quotient(hd, scaled, p, grid) == pytest.approx(rayleigh_quotient(hd, xi, p, grid), rel=1e-10)
    l0, r0 = hardy_sides(hd, xi, p, grid)
    l1, r1 = hardy_sides(hd, scaled, p, grid)
    assert l1 == pytest.approx(lam**p * l0, rel=1e-12)
    assert r1 == pytest.approx(lam**p * r0, rel=1e-12)


@FAST
@given(st.floats(min_value=-3.0, max_value=1.9), st.floats(min_value=1e-6, max_value=1e6))
def test_radial_map_round_trip(beta, r):
    m = RadialMap(beta, 2.0)
    assert float(m.r_of_t(m.t_of_r(r))) == pytest.approx(r, rel=1e-12)


@FAST
@given(st.integers(min_value=3, max_value=8), st.floats(min_value=1.1, max_value=2.9),
       st.floats(min_value=-2.0, max_value=1.0), st.floats(min_value=0.01, max_value=0.09))
def test_sobolev_exponent_decreasing(n, p, beta, step):
    assert sobolev_exponent(n, p, beta + step) < sobolev_exponent(n, p, beta)
