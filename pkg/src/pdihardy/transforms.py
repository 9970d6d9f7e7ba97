"""The radial substitution t = (p/(p-beta)) r^{(p-beta)/p} turning
-Delta_p w = gamma |x|^{-beta} |w|^{q-2} w into an unweighted radial ODE.

With v(t) = w(r(t)) one has v'(t) = w'(r) r^{beta/p}, and the equation
becomes -(t^{N-1} |v'|^{p-2} v')' = gamma t^{N-1} |v|^{q-2} v with the
effective dimension N = p (n - beta)/(p - beta) and q = p (n - beta)/(n - p).
For beta = 0 this is the original equation with N = n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import sobolev_exponent
from .model import RadialProfile, p_flux
from .radial import QuadratureGrid, lagrange_derivative


@dataclass(frozen=True)
class RadialMap:
    """t(r) = (p/(p-beta)) r^{(p-beta)/p} and its inverse."""

    beta: float
    p: float

    def __post_init__(self):
        if not self.beta < self.p:
            raise ValueError(f"change of variables needs beta < p, got beta={self.beta}, p={self.p}")

    @property
    def k(self) -> float:
        return (self.p - self.beta) / self.p

    def t_of_r(self, r) -> np.ndarray:
        return np.asarray(r, dtype=float) ** self.k / self.k

    def r_of_t(self, t) -> np.ndarray:
        return (self.k * np.asarray(t, dtype=float)) ** (1.0 / self.k)

    def dt_dr(self, r) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.asarray(r, dtype=float) ** (-self.beta / self.p)

    def describe(self) -> dict:
        return {"beta": self.beta, "p": self.p, "t_of_r": "r^k / k", "r_of_t": "(k t)^(1/k)", "k": self.k}


def effective_dimension(n: float, p: float, beta: float) -> float:
    """N = p (n - beta)/(p - beta)."""
    if not beta < p:
        raise ValueError(f"need beta < p, got beta={beta}, p={p}")
    return p * (n - beta) / (p - beta)


def radial_change_of_variable(beta: float, p: float, w: RadialProfile) -> tuple[RadialProfile, RadialMap]:
    """v(t) = w(r(t)) on the image of w's grid, with v' = w' r^{beta/p} when w' is known."""
    m = RadialMap(float(beta), float(p))
    r = w.grid
    t = m.t_of_r(r)
    dv = None
    if w.has_derivative:
        dv = w.derivative_values / m.dt_dr(r)
    return RadialProfile(t, w.values, dv, w.extrapolation, w.tail_exponent / m.k), m


def transformed_residual(v: RadialProfile, n: float, p: float, gamma: float, beta: float,
                         grid: QuadratureGrid | np.ndarray | None = None) -> RadialProfile:
    """-(t^{N-1} |v'|^{p-2} v')' - gamma t^{N-1} |v|^{q-2} v at interior t-nodes.

    ``grid`` optionally resamples v onto other t-nodes first.
    """
    q = sobolev_exponent(n, p, beta)
    N = effective_dimension(n, p, beta)
    if grid is not None:
        t_new = grid.nodes if isinstance(grid, QuadratureGrid) else np.asarray(grid, dtype=float)
        if not np.array_equal(t_new, v.grid):
            dv = RadialProfile(v.grid, v.derivative_values)(t_new) if v.has_derivative else None
            v = RadialProfile(t_new, v(t_new), dv)
    t = v.grid
    if v.has_derivative:
        dv = v.derivative_values
        flux = t ** (N - 1) * p_flux(dv, p)
        div = lagrange_derivative(t, flux)[1:-1]
    else:
        mid = 0.5 * (t[1:] + t[:-1])
        flux = mid ** (N - 1) * p_flux(np.diff(v.values) / np.diff(t), p)
        div = np.diff(flux) / np.diff(mid)
    ti = t[1:-1]
    vi = v.values[1:-1]
    source = gamma * ti ** (N - 1) * np.abs(vi) ** (q - 2) * vi
    return RadialProfile(ti, -div - source)


def transformed_source(v: RadialProfile, n: float, p: float, gamma: float, beta: float) -> np.ndarray:
    """gamma t^{N-1} |v|^{q-2} v at interior t-nodes (scale for relative residuals)."""
    q = sobolev_exponent(n, p, beta)
    N = effective_dimension(n, p, beta)
    ti = v.grid[1:-1]
    vi = v.values[1:-1]
    return gamma * ti ** (N - 1) * np.abs(vi) ** (q - 2) * vi


__all__ = [
    "RadialMap",
    "effective_dimension",
    "radial_change_of_variable",
    "transformed_residual",
    "transformed_source",
]
