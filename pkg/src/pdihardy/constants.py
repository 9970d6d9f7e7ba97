"""Explicit profiles, weights and constants: the Talenti-type extremal,
the Hardy-Poincare weight pair with its constant, and the Caccioppoli /
Hardy multiplicative constants."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .model import RadialDomain, RadialProfile
from .radial import QuadratureGrid
from .weights import WeightFunction

DEFAULT_DOMAIN = RadialDomain(n=3, r_min=0.0, r_max=1e3, kind="full-space-truncated")


def sobolev_exponent(n: float, p: float, beta: float = 0.0) -> float:
    """Critical exponent p*_beta = p (n - beta) / (n - p)."""
    if not p < n:
        raise ValueError(f"need p < n, got p={p}, n={n}")
    return p * (n - beta) / (n - p)


def talenti_amplitude(n: float, p: float, beta: float, gamma: float) -> float:
    """Amplitude c making c (1 + r^{(p-beta)/(p-1)})^{-(n-p)/(p-beta)} solve
    -Delta_p u = gamma r^{-beta} u^{p*_beta - 1}.

    The unscaled profile solves the equation with coefficient
    K = (n - beta) ((n - p)/(p - 1))^{p-1}; homogeneity then forces
    c^{p*_beta - p} = K / gamma, i.e. c = (K/gamma)^{(n-p) / (p (p-beta))}.
    """
    _check_talenti(n, p, beta, gamma)
    bracket = (n - beta) / gamma * ((n - p) / (p - 1)) ** (p - 1)
    return bracket ** ((n - p) / (p * (p - beta)))


def _check_talenti(n, p, beta, gamma):
    if not beta < p < n:
        raise ValueError(f"Talenti profile needs beta < p < n, got beta={beta}, p={p}, n={n}")
    if not p > 1:
        raise ValueError(f"Talenti profile needs p > 1, got p={p}")
    if not gamma > 0:
        raise ValueError(f"Talenti profile needs gamma > 0, got gamma={gamma}")


def make_talenti_profile(n: float, p: float, beta: float, gamma: float,
                         grid: QuadratureGrid | np.ndarray | None = None) -> RadialProfile:
    """Sample u(r) = c (1 + r^k)^{-m}, k = (p-beta)/(p-1), m = (n-p)/(p-beta),
    together with its closed-form derivative."""
    c = talenti_amplitude(n, p, beta, gamma)
    if grid is None:
        grid = QuadratureGrid.log_spaced(DEFAULT_DOMAIN)
    r = grid.nodes if isinstance(grid, QuadratureGrid) else np.asarray(grid, dtype=float)
    k = (p - beta) / (p - 1)
    m = (n - p) / (p - beta)
    rk = r**k
    u = c * (1.0 + rk) ** (-m)
    with np.errstate(divide="ignore"):
        du = -c * m * k * r ** (k - 1) * (1.0 + rk) ** (-m - 1)
    du = np.where(r == 0, 0.0 if k > 1 else -np.inf, du)
    return RadialProfile(r, u, du, extrapolation="power-tail", tail_exponent=-(n - p) / (p - 1))


def _check_hp(n: float, p: float, gamma: float, r_param: float):
    if not p > 1:
        raise ValueError(f"need p > 1, got p={p}")
    if not gamma > 1 - n / p:
        raise ValueError(f"need gamma > 1 - n/p = {1 - n / p:g}, got gamma={gamma}")
    upper = 1 - p / n + gamma * p / n
    if not 0 < r_param < upper:
        raise ValueError(
            f"need 0 < r_param < 1 - p/n + gamma p/n = {upper:g}, got r_param={r_param}"
        )


def make_hp_weights(n: float, p: float, gamma: float, r_param: float) -> tuple[WeightFunction, WeightFunction]:
    """Weights (v1, v2) of the Hardy-Poincare inequality
    C int |xi|^p v1 <= int |grad xi|^p v2 on R^n."""
    _check_hp(n, p, gamma, r_param)
    return WeightFunction.hp_v1(gamma, p, r_param), WeightFunction.talenti(gamma, p)


class HPConstant(NamedTuple):
    value: float
    optimal: bool | None  # True in the regimes where optimality is known, None = unknown


def hp_constant_r1(n: float, p: float, gamma: float) -> float:
    """n (p (gamma - 1)/(p - 1))^{p-1}, the r_param = 1 specialisation."""
    if not gamma > 1:
        raise ValueError(f"need gamma > 1, got gamma={gamma}")
    return n * (p * (gamma - 1) / (p - 1)) ** (p - 1)


def hp_constant(n: float, p: float, gamma: float, r_param: float) -> HPConstant:
    """Constant n (p/(p-1))^{p-1} (gamma - 1 + (n/p)(1 - r_param))^{p-1} and its optimality status.

    Optimality is reported only where it is established (gamma > n r + 1 - n/p,
    or gamma = 1 + n (1 - 1/p) with r = 1); elsewhere the flag is None.
    """
    _check_hp(n, p, gamma, r_param)
    if r_param == 1 and gamma > 1:
        value = hp_constant_r1(n, p, gamma)
    else:
        value = n * (p / (p - 1)) ** (p - 1) * (gamma - 1 + (n / p) * (1 - r_param)) ** (p - 1)
    boundary = r_param == 1 and math.isclose(gamma, 1 + n * (1 - 1 / p), rel_tol=1e-12)
    optimal = True if (gamma > n * r_param + 1 - n / p or boundary) else None
    return HPConstant(value, optimal)


def _check_shift(C: float, sigma: float, p: float):
    if not p > 1:
        raise ValueError(f"need p > 1, got p={p}")
    if not sigma < C:
        raise ValueError(
            f"sigma={sigma:g} >= C={C:g} violates Assumption A a) (need sigma < C)"
        )


def caccioppoli_constant(p: float, C: float, sigma: float) -> float:
    """(p-1)^{p-1} / (p^p (C - sigma)^{p-1})."""
    _check_shift(C, sigma, p)
    return (p - 1) ** (p - 1) / (p**p * (C - sigma) ** (p - 1))


def hardy_mu2_constant(p: float, C: float, sigma: float) -> float:
    """((p-1)/(C - sigma))^{p-1}."""
    _check_shift(C, sigma, p)
    return ((p - 1) / (C - sigma)) ** (p - 1)
