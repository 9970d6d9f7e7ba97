"""B_p weights, the (Psi, g) inequality, behaviour near zero, vanishing tails."""

from __future__ import annotations

import math

import numpy as np
import pytest

from pdihardy import (
    QuadratureGrid,
    RadialDomain,
    RadialProfile,
    ScalarFunction,
    WeightFunction,
    check_bp_weight,
    check_psi_g_condition,
    check_theta_behavior,
    check_vanishing_tails,
    exp_over_t_pair,
    exp_pair,
    log_pair,
    make_talenti_profile,
    power_pair,
    table_pairs,
)
from pdihardy.compatibility import check_zero_set, classify_near_zero
from pdihardy.pairs import PsiGPair

T = np.geomspace(1e-3, 1e2, 400)
BALL3 = RadialDomain(3, 0.0, 1.0, "ball")


# -- B_p ----------------------------------------------------------------------------
@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
def test_bp_constant_weight(p):
    assert check_bp_weight(WeightFunction.constant(1.0), p, BALL3).holds


def test_bp_r_squared_holds():
    rep = check_bp_weight(WeightFunction.power(2.0), 2.0, BALL3)
    assert rep.holds and rep.method == "analytic" and rep.note == ""


def test_bp_exponential_weight_fails_numerically():
    a = WeightFunction.sample(lambda r: np.exp(-1.0 / r), QuadratureGrid.log_spaced(BALL3, 400, 1e-3))
    rep = check_bp_weight(a, 2.0, BALL3)
    assert rep.method == "numeric"
    assert not rep.holds


@pytest.mark.parametrize("alpha", [-1.0, 0.5, 2.0, 3.5, 6.0, 9.0])
@pytest.mark.parametrize("p", [2.0, 3.0])
def test_bp_power_weights_agree_with_the_exact_criterion(alpha, p):
    # a^{-1/(p-1)} = r^{-alpha/(p-1)} is integrable near 0 in R^3 iff alpha/(p-1) < 3
    expected = alpha / (p - 1) < 3
    rep = check_bp_weight(WeightFunction.power(alpha), p, BALL3)
    assert rep.holds is expected
    tab = WeightFunction.sample(lambda r: r**alpha, QuadratureGrid.log_spaced(BALL3, 2000, 1e-9))
    assert check_bp_weight(tab, p, BALL3).holds is expected


def test_bp_annulus_uses_interior_band():
    dom = RadialDomain(3, 1.0, 2.0, "annulus")
    rep = check_bp_weight(WeightFunction.power(-5.0), 2.0, dom)
    assert rep.holds and len(rep.integral_samples) == 1


# -- (Psi, g) ---------------------------------------------------------------------
@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.5])
def test_power_pair_equality(alpha):
    rep = check_psi_g_condition(power_pair(alpha), T)
    assert rep.holds
    assert rep.max_C == pytest.approx(alpha, rel=1e-12)


def test_exp_over_t_pair_equality():
    rep = check_psi_g_condition(exp_over_t_pair(), T)
    assert rep.holds
    assert rep.max_C == pytest.approx(1.0, rel=1e-12)


def test_log_pair_holds_strictly():
    rep = check_psi_g_condition(log_pair(math.e), T)
    # -g Psi'/Psi = log(e + t) + t/(e + t), smallest at the smallest sample
    t0 = T[0]
    assert rep.holds and rep.worst_t == t0
    assert rep.max_C == pytest.approx(math.log(math.e + t0) + t0 / (math.e + t0), rel=1e-12)
    assert rep.max_C > 1.0


def test_exp_pair_holds_with_g_at_least_C():
    rep = check_psi_g_condition(exp_pair(1.0), T)
    # -g Psi'/Psi = g = (2 + t)/(1 + t), decreasing toward 1
    assert rep.holds
    assert rep.max_C == pytest.approx((2 + T[-1]) / (1 + T[-1]), rel=1e-12)


def test_finite_difference_derivative_path():
    base = power_pair(1.0)
    no_derivative = ScalarFunction(base.psi.fn, "t^-1")
    pair = PsiGPair(no_derivative, base.g, 1.0)
    rep = check_psi_g_condition(pair, T)
    assert rep.holds
    assert rep.max_C == pytest.approx(1.0, rel=1e-8)


def test_overclaimed_C_fails():
    pair = power_pair(1.0)
    bad = PsiGPair(pair.psi, pair.g, 1.1)
    assert not check_psi_g_condition(bad, T).holds


def test_positivity_violation_is_diagnosed():
    pair = power_pair(1.0)
    neg = PsiGPair(ScalarFunction(lambda t: 1 - t), pair.g, 1.0)
    with pytest.raises(ValueError, match="positivity"):
        check_psi_g_condition(neg, T)


def test_interval_restriction():
    # Psi = e^{-t} with g = 1 - t/4 > 0 on (0, 2): only g >= C = 0.5 there
    g = ScalarFunction(lambda t: 1 - t / 4)
    pair = exp_pair(0.5, g)
    assert check_psi_g_condition(pair, T, interval=(1e-3, 2.0)).holds
    with pytest.raises(ValueError):
        check_psi_g_condition(pair, T)


def test_max_C_nonincreasing_under_refinement():
    pair = log_pair(3.0)
    values = [check_psi_g_condition(pair, np.geomspace(1e-2, 1e2, 2**k + 1)).max_C for k in range(2, 9)]
    assert all(b <= a for a, b in zip(values, values[1:]))


def test_table_has_four_rows():
    names = [p.name.split("(")[0] for p in table_pairs()]
    assert names == ["power", "log", "exp", "exp_over_t"]


# -- behaviour near zero -----------------------------------------------------------------
def test_theta_for_reciprocal_pair():
    rep = check_theta_behavior(power_pair(1.0), 2.0)
    assert rep.theta == "bounded-near-0"
    assert rep.psi_over_g == "nonincreasing-near-0"


def test_theta_for_square_root_pair():
    rep = check_theta_behavior(power_pair(0.5), 2.0)
    assert rep.theta == "bounded-near-0"
    assert rep.psi_over_g == "nonincreasing-near-0"


def test_theta_for_exponential_with_unit_g():
    one = ScalarFunction(lambda t: np.ones_like(t), "1")
    rep = check_theta_behavior(exp_pair(1.0, one), 2.0)
    assert rep.theta == "nonincreasing-near-0"
    assert rep.psi_over_g == "nonincreasing-near-0"


def test_oscillating_theta_fails_both():
    t = np.geomspace(1.0, 1e-6, 40)
    assert classify_near_zero(np.sin(1 / t) / t) == "fails-both"
    assert classify_near_zero([1.0, np.inf, 2.0]) == "fails-both"


def test_theta_probe_must_decrease():
    with pytest.raises(ValueError):
        check_theta_behavior(power_pair(1.0), 2.0, [0.1, 0.2, 0.3])


# -- vanishing tails -------------------------------------------------------------------------
def test_tails_vanish_for_bounded_solution():
    grid = QuadratureGrid.log_spaced(RadialDomain(3, 0.0, 1e3), 2000)
    u = make_talenti_profile(3, 2, 0, 3, grid)
    one = WeightFunction.constant(1.0)
    rep = check_vanishing_tails(u, one, one, ScalarFunction.identity(), power_pair(1.0), (1e-6, 10.0),
                                [1.0, 4.0], grid, 2.0)
    assert rep.Z1_values[-1] == 0.0 and rep.Z2_values[-1] == 0.0
    assert rep.converges


def test_tails_decay_for_singular_profile():
    grid = QuadratureGrid.log_spaced(RadialDomain(3, 1e-9, 1.0, "annulus"), 8000)
    r = grid.nodes
    u = RadialProfile(r, r**-0.5, -0.5 * r**-1.5)
    one = WeightFunction.constant(1.0)
    R = np.array([10.0, 100.0, 1000.0])
    rep = check_vanishing_tails(u, one, one, ScalarFunction.identity(), power_pair(1.0), (1e-9, 1.0), R, grid, 2.0)
    # closed forms: {u >= R/2} = {r <= 4/R^2}; int |u'| dx = (4 pi/3) r^{3/2}, int u dx = (8 pi/5) r^{5/2}
    rho = 4 / R**2
    k0 = 1e-9
    z1 = (4 * math.pi / 3) * (rho**1.5 - k0**1.5) / R
    z2 = (8 * math.pi / 5) * (rho**2.5 - k0**2.5) / R
    assert np.allclose(rep.Z1_values, z1, rtol=1e-2)
    assert np.allclose(rep.Z2_values, z2, rtol=1e-2)
    assert rep.converges


def test_tails_empty_set_is_zero():
    grid = QuadratureGrid.uniform(RadialDomain(3, 1.0, 2.0, "annulus"), 101)
    u = RadialProfile(grid.nodes, np.full(101, 0.5), np.zeros(101))
    one = WeightFunction.constant(1.0)
    rep = check_vanishing_tails(u, one, one, ScalarFunction.identity(), power_pair(1.0), (1.0, 2.0),
                                [5.0, 10.0], grid, 2.0)
    assert rep.Z1_values == [0.0, 0.0] and rep.Z2_values == [0.0, 0.0]


# -- zero set ---------------------------------------------------------------------------------
def test_zero_set_flag():
    r = np.linspace(0, 1, 11)
    assert check_zero_set(RadialProfile(r, 1 - r)).flag == "positive-by-construction"
    touching = RadialProfile(r, np.abs(r - 0.5))
    rep = check_zero_set(touching)
    assert rep.flag == "touches-zero" and rep.zero_radii == [0.5]
