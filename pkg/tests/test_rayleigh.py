"""Rayleigh quotients, the preconditioned minimizer and trial-family probes."""

from __future__ import annotations

import math

import numpy as np
import pytest

from pdihardy import QuadratureGrid, RadialDomain, RadialProfile, WeightFunction
from pdihardy.hardy import classical_hardy_data, hp_hardy_data, sharp_case_measures
from pdihardy.rayleigh import (
    MinimizerOptions,
    P1Functional,
    check_gradient,
    minimize_rayleigh,
    r_max_sweep,
    rayleigh_quotient,
    sharpness_probe,
    talenti_like_family,
    two_weight_data,
)

ONE = WeightFunction.constant(1.0)
INTERVAL_PI = RadialDomain(1, 0.0, math.pi, "interval-1d")
UNIT = RadialDomain(1, 0.0, 1.0, "interval-1d")
FULL3 = RadialDomain(3, 0.0, 1e3, "full-space-truncated")


def p_eigenvalue(p):
    """First Dirichlet eigenvalue of the one-dimensional p-Laplacian on (0, pi)."""
    pi_p = 2 * math.pi / (p * math.sin(math.pi / p))
    return (p - 1) * (pi_p / math.pi) ** p


def sine(grid, k=1.0):
    return RadialProfile(grid.nodes, np.sin(k * grid.nodes), k * np.cos(k * grid.nodes))


# -- quotient -------------------------------------------------------------------------------
@pytest.mark.parametrize("k,expected", [(1.0, 1.0), (2.0, 4.0)])
def test_sine_quotients(k, expected):
    grid = QuadratureGrid.uniform(INTERVAL_PI, 4001)
    q = rayleigh_quotient(two_weight_data(ONE, ONE), sine(grid, k), 2.0, grid)
    assert q == pytest.approx(expected, rel=1e-5)


@pytest.mark.parametrize("lam", [1e-3, 7.0, -2.0])
def test_quotient_is_scale_invariant(lam):
    grid = QuadratureGrid.uniform(INTERVAL_PI, 801)
    hd = two_weight_data(ONE, ONE)
    xi = sine(grid)
    base = rayleigh_quotient(hd, xi, 2.5, grid)
    assert rayleigh_quotient(hd, xi.scaled(lam), 2.5, grid) == pytest.approx(base, rel=1e-12)


def test_quotient_excludes_folded_constant():
    grid = QuadratureGrid.log_spaced(FULL3, 800, 1e-6)
    hd = hp_hardy_data(3, 2, 5, 1.0)
    fam = talenti_like_family(grid, 2.0)
    raw = two_weight_data(hd.mu1_density, hd.mu2_density.scaled(1 / hd.constant))
    q1 = rayleigh_quotient(hd, fam(3.0), 2.0, grid)
    q2 = rayleigh_quotient(raw, fam(3.0), 2.0, grid)
    assert q1 == pytest.approx(q2, rel=1e-12)


def test_orthogonal_test_function():
    grid = QuadratureGrid.uniform(INTERVAL_PI, 101)
    zero_mu1 = two_weight_data(WeightFunction.constant(0.0), ONE)
    with pytest.raises(ValueError, match="orthogonal to mu1"):
        rayleigh_quotient(zero_mu1, sine(grid), 2.0, grid)


# -- minimizer --------------------------------------------------------------------------------
def test_minimizer_on_zero_pi():
    grid = QuadratureGrid.uniform(INTERVAL_PI, 801)
    res = minimize_rayleigh(two_weight_data(ONE, ONE), 2.0, grid)
    assert res.converged
    assert res.value == pytest.approx(1.0, abs=1e-3)
    assert res.value >= 1.0  # a feasible quotient bounds the infimum from above


def test_minimizer_on_unit_interval():
    grid = QuadratureGrid.uniform(UNIT, 801)
    res = minimize_rayleigh(two_weight_data(ONE, ONE), 2.0, grid)
    assert res.value == pytest.approx(math.pi**2, abs=0.01)


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_minimizer_matches_p_eigenvalue(p):
    grid = QuadratureGrid.uniform(INTERVAL_PI, 801)
    res = minimize_rayleigh(two_weight_data(ONE, ONE), p, grid)
    lam = p_eigenvalue(p)
    assert res.value >= lam * (1 - 1e-9)
    assert res.value == pytest.approx(lam, rel=1e-4)


def test_p_eigenvalue_oracle_at_two():
    assert p_eigenvalue(2.0) == pytest.approx(1.0, rel=1e-15)


def test_classical_hardy_approaches_quarter_from_above():
    rows = r_max_sweep(classical_hardy_data(3, 2), 2.0, 3, [1e1, 1e2, 1e3], size=2000)
    values = [v for _, v in rows]
    assert all(v > 0.25 for v in values)
    assert all(b < a for a, b in zip(values, values[1:]))
    assert values[-1] == pytest.approx(0.25, rel=0.05)


def test_trace_nonincreasing_and_gradient_selftest():
    grid = QuadratureGrid.log_spaced(FULL3, 1000, 1e-6)
    res = minimize_rayleigh(hp_hardy_data(3, 2, 5, 1.0), 2.0, grid)
    assert res.gradient_error < 1e-5
    assert all(b <= a for a, b in zip(res.trace, res.trace[1:]))
    assert res.value == res.trace[-1]


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_gradient_matches_central_differences(p):
    grid = QuadratureGrid.uniform(INTERVAL_PI, 201)
    F = P1Functional(two_weight_data(ONE, WeightFunction.power(1.0)), p, grid)
    rng = np.random.default_rng(3)
    x = np.sin(grid.nodes) * (1 + 0.2 * rng.standard_normal(grid.size))
    x[[0, -1]] = 0.0
    assert check_gradient(F, x, seed=4) < 1e-5


def test_eigenfunction_data_minimizer_correlates_with_sine():
    grid = QuadratureGrid.uniform(INTERVAL_PI, 801)
    u0 = sine(grid)
    hd = sharp_case_measures(ONE, ONE, 2.0)
    res = minimize_rayleigh(hd, 2.0, grid)
    assert abs(res.value - 1.0) < 1e-3
    x, y = res.minimizer.values, u0.values
    assert x @ y / (np.linalg.norm(x) * np.linalg.norm(y)) >= 0.999


def test_dirichlet_boundary_is_kept():
    grid = QuadratureGrid.uniform(INTERVAL_PI, 201)
    res = minimize_rayleigh(two_weight_data(ONE, ONE), 2.0, grid)
    assert res.boundary == "dirichlet-both"
    assert res.minimizer.values[0] == 0.0 and res.minimizer.values[-1] == 0.0
    assert np.all(res.minimizer.values[1:-1] > 0)


def test_options_validation():
    with pytest.raises(ValueError):
        MinimizerOptions(max_iterations=0)
    with pytest.raises(ValueError):
        MinimizerOptions(convergence_tol=0.0)
    with pytest.raises(ValueError):
        MinimizerOptions(init="supplied")
    with pytest.raises(ValueError):
        MinimizerOptions(boundary="periodic")


def test_supplied_initial_profile():
    grid = QuadratureGrid.uniform(INTERVAL_PI, 401)
    opts = MinimizerOptions(init="supplied", initial_profile=sine(grid), max_iterations=5)
    res = minimize_rayleigh(two_weight_data(ONE, ONE), 2.0, grid, opts=opts)
    assert res.trace[0] == pytest.approx(1.0, abs=1e-4)


# -- probes -------------------------------------------------------------------------------------
def test_hp_probe_near_24():
    grid = QuadratureGrid.log_spaced(FULL3, 2000, 1e-6)
    hd = hp_hardy_data(3, 2, 5, 1.0)
    best, s = sharpness_probe(hd, talenti_like_family(grid, 2.0), np.linspace(1, 6, 51), 2.0, grid)
    assert 24 * (1 - 1e-9) <= best <= 24 * 1.1
    assert 1 <= s <= 6
    free = minimize_rayleigh(hd, 2.0, grid)
    assert free.value <= best + 1e-9 * best


def test_probe_on_eigenfunction_family():
    grid = QuadratureGrid.uniform(INTERVAL_PI, 2001)
    hd = sharp_case_measures(ONE, ONE, 2.0)

    def family(k):
        return RadialProfile(grid.nodes, np.sin(grid.nodes) ** k)

    best, k = sharpness_probe(hd, family, [3.0, 2.0, 1.5, 1.0], 2.0, grid)
    assert k == 1.0 and best == pytest.approx(1.0, rel=1e-5)
    assert minimize_rayleigh(hd, 2.0, grid).value <= best + 1e-6


def test_singleton_family_returns_its_quotient():
    grid = QuadratureGrid.uniform(INTERVAL_PI, 801)
    hd = two_weight_data(ONE, ONE)
    xi = sine(grid, 2.0)
    best, s = sharpness_probe(hd, lambda _: xi, [0.0], 2.0, grid)
    assert s == 0.0
    assert best == rayleigh_quotient(hd, xi, 2.0, grid)
