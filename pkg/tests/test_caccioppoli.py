"""Young splitting, the global and local Caccioppoli estimates and truncation."""

from __future__ import annotations

import numpy as np
import pytest

from pdihardy import (
    RadialProfile,
    caccioppoli_margin,
    compute_sigma0,
    integrate_radial,
    local_estimate_margin,
    make_talenti_profile,
    truncate_profile,
    young_split,
)
from pdihardy.caccioppoli import theta_density
from pdihardy.supersolution import pdi_fields
from pdihardy.testfunctions import bump, library, power

from .conftest import talenti_setup


def zero_phi(grid):
    return RadialProfile(grid.nodes, np.zeros(grid.size), np.zeros(grid.size))


# -- Young splitting ----------------------------------------------------------------------
def test_young_split_example():
    lhs, rhs = young_split(3.0, 2.0, 2.0, 1.0)
    assert lhs == 6.0 and rhs == 6.5


@pytest.mark.parametrize("tau,s2,p", [(0.3, 2.0, 2.0), (4.0, 0.7, 3.5), (1.0, 1.0, 1.2)])
def test_young_split_equality_case(tau, s2, p):
    lhs, rhs = young_split(tau * s2, s2, p, tau)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_young_split_zero_factor():
    lhs, rhs = young_split(0.0, 2.0, 3.0, 0.5)
    assert lhs == 0.0 and rhs == pytest.approx(2 / 3 * 0.5 * 8)


def test_young_split_rejects_bad_arguments():
    with pytest.raises(ValueError):
        young_split(-1.0, 1.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        young_split(1.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        young_split(1.0, 1.0, 2.0, 0.0)


# -- global estimate ----------------------------------------------------------------------
def test_talenti_bump_example(talenti):
    problem, u, pair, grid = talenti
    phi = bump(grid, 0.1, 10.0)
    m = caccioppoli_margin(problem, u, pair, 0.0, phi, grid)
    assert m.constant == 0.25
    # with Psi = 1/t, g = t and sigma = 0: lhs = int 3 u^4 phi, rhs = 1/4 int |phi'|^2 / phi
    lhs = integrate_radial(3 * u.values**4 * phi.values, grid)
    keep = phi.values > 1e-12
    ratio = np.zeros(grid.size)
    ratio[keep] = phi.derivative_values[keep] ** 2 / phi.values[keep]
    assert m.lhs == pytest.approx(lhs, rel=1e-12)
    assert m.rhs == pytest.approx(0.25 * integrate_radial(ratio, grid), rel=1e-9)
    assert m.lhs <= m.rhs + m.tol


@pytest.mark.parametrize("size", [2000, 4000])
def test_margin_holds_for_library(size):
    problem, u, pair, grid = talenti_setup(size)
    s0 = compute_sigma0(problem, u, pair.g).sigma0
    for name, phi in library(grid, problem.p, seed=7, count=20, support=(1e-3, 1e2)):
        m = caccioppoli_margin(problem, u, pair, 0.0, phi, grid, sigma0=s0)
        assert m.lhs <= m.rhs + m.tol, name


def test_zero_cutoff(talenti):
    problem, u, pair, grid = talenti
    m = caccioppoli_margin(problem, u, pair, 0.0, zero_phi(grid), grid)
    assert m.lhs == 0.0 and m.rhs == 0.0


def test_zero_solution():
    problem, _, pair, grid = talenti_setup(500)
    u = RadialProfile(grid.nodes, np.zeros(grid.size), np.zeros(grid.size))
    m = caccioppoli_margin(problem, u, pair, 0.0, bump(grid, 0.1, 10.0), grid, sigma0=0.0)
    assert m.lhs == 0.0 and m.rhs == 0.0


def test_sigma_outside_admissible_range(talenti):
    problem, u, pair, grid = talenti
    phi = bump(grid, 0.1, 10.0)
    with pytest.raises(ValueError, match="violates Assumption A a\\)"):
        caccioppoli_margin(problem, u, pair, 1.0, phi, grid)
    with pytest.raises(ValueError, match="violates Assumption A a\\)"):
        caccioppoli_margin(problem, u, pair, -1.0, phi, grid)


def test_negative_cutoff_is_rejected(talenti):
    problem, u, pair, grid = talenti
    with pytest.raises(ValueError, match="nonnegative"):
        caccioppoli_margin(problem, u, pair, 0.0, bump(grid, 0.1, 10.0).scaled(-1.0), grid)


def test_monotone_in_sigma(talenti):
    problem, u, pair, grid = talenti
    s0 = compute_sigma0(problem, u, pair.g).sigma0
    phi = bump(grid, 0.05, 20.0, log_scale=True)
    sigmas = [s0, 0.0, 0.25, (s0 + pair.C) / 2, 0.9]
    margins = [caccioppoli_margin(problem, u, pair, s, phi, grid, sigma0=s0) for s in sigmas]
    lhs = [m.lhs for m in margins]
    consts = [m.constant for m in margins]
    assert all(b >= a for a, b in zip(lhs, lhs[1:]))
    assert all(b > a for a, b in zip(consts, consts[1:]))
    assert all(m.lhs <= m.rhs + m.tol for m in margins)


def test_cutoff_as_pth_power_identity(talenti):
    problem, u, pair, grid = talenti
    xi = bump(grid, 0.02, 30.0, log_scale=True)
    phi = power(xi, problem.p)
    m = caccioppoli_margin(problem, u, pair, 0.0, phi, grid)
    f = pdi_fields(problem, u)
    theta = theta_density(f, pair, f.active(None, 1e-14))
    keep = phi.values > 1e-12 * phi.values.max()  # the same floor the margin applies
    dxi = np.where(keep, np.abs(xi.derivative_values), 0.0)
    expected = problem.p**problem.p * m.constant * integrate_radial(theta * dxi**problem.p, grid)
    assert m.rhs == pytest.approx(expected, rel=1e-12)


# -- local estimate ---------------------------------------------------------------------
def test_local_with_large_cap_reduces_to_global(talenti):
    problem, u, pair, grid = talenti
    phi = bump(grid, 0.1, 10.0)
    loc = local_estimate_margin(problem, u, pair, 0.0, phi, 2.0, grid)
    glob = caccioppoli_margin(problem, u, pair, 0.0, phi, grid)
    assert loc.remainder == 0.0
    assert loc.lhs == glob.lhs and loc.rhs == glob.rhs


@pytest.mark.parametrize("size", [2000, 4000])
def test_local_with_small_cap(size):
    problem, u, pair, grid = talenti_setup(size)
    phi = bump(grid, 1e-2, 10.0, log_scale=True)
    m = local_estimate_margin(problem, u, pair, 0.0, phi, 0.5, grid)
    assert m.remainder != 0.0
    assert m.lhs <= m.rhs + m.tol


def test_local_zero_cutoff(talenti):
    problem, u, pair, grid = talenti
    m = local_estimate_margin(problem, u, pair, 0.0, zero_phi(grid), 0.5, grid)
    assert m.lhs == 0.0 and m.rhs == 0.0 and m.remainder == 0.0


def test_local_rejects_nonpositive_cap(talenti):
    problem, u, pair, grid = talenti
    with pytest.raises(ValueError, match="positive"):
        local_estimate_margin(problem, u, pair, 0.0, bump(grid, 0.1, 1.0), 0.0, grid)


def test_local_converges_to_global_as_cap_grows(talenti):
    problem, u, pair, grid = talenti
    phi = bump(grid, 1e-2, 10.0, log_scale=True)
    glob = caccioppoli_margin(problem, u, pair, 0.0, phi, grid)
    gaps = []
    remainders = []
    for R in (0.4, 0.8, 1.2, 1.6, 2.5):
        m = local_estimate_margin(problem, u, pair, 0.0, phi, R, grid)
        gaps.append(abs(m.rhs - glob.rhs))
        remainders.append(abs(m.remainder))
    assert gaps[-1] == 0.0 and remainders[-1] == 0.0
    assert gaps[-2] < gaps[0]


# -- truncation -----------------------------------------------------------------------------
def test_truncate_talenti_example():
    r = np.geomspace(1e-3, 1e2, 300)
    u = make_talenti_profile(3, 2, 0, 3, r)
    t = truncate_profile(u, 0.1, 0.8)
    capped = u.values + 0.1 >= 0.8
    assert capped[0] and not capped[-1]
    assert np.all(t.values[capped] == 0.8)
    assert np.all(t.values[~capped] == u.values[~capped] + 0.1)
    assert np.all(t.derivative_values[capped] == 0.0)
    assert np.array_equal(t.derivative_values[~capped], u.derivative_values[~capped])


def test_truncate_small_delta_approaches_min():
    r = np.geomspace(1e-3, 1e2, 300)
    u = make_talenti_profile(3, 2, 0, 3, r)
    t = truncate_profile(u, 1e-12, 0.8)
    assert np.allclose(t.values, np.minimum(u.values, 0.8), atol=1e-11)


def test_truncate_cap_never_binds():
    r = np.geomspace(1e-3, 1e2, 300)
    u = make_talenti_profile(3, 2, 0, 3, r)
    t = truncate_profile(u, 0.1, 1.2)
    assert np.array_equal(t.values, u.values + 0.1)


@pytest.mark.parametrize("delta,R", [(0.8, 0.8), (1.0, 0.5), (0.0, 1.0)])
def test_truncate_rejects_bad_arguments(delta, R):
    u = make_talenti_profile(3, 2, 0, 3, np.geomspace(1e-3, 1.0, 10))
    with pytest.raises(ValueError):
        truncate_profile(u, delta, R)

