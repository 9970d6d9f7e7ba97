"""Weighted p-Rayleigh quotients int |xi'|^p dmu2 / int |xi|^p dmu1 and their
numerical minimization.

Trial functions are continuous and piecewise linear on the grid nodes.
Weighted cell integrals use eight-point Gauss-Legendre rules, so every value
reported is the exact quotient of an admissible function up to the
accuracy of the weight quadrature (exact for polynomial weights).  On a ball
whose grid starts at r0 > 0 the function is continued by the constant
xi(r0) down to the origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import solve_banded

from .hardy import HardyData
from .model import RadialDomain, RadialProfile, p_flux, sphere_area
from .radial import QuadratureGrid, nodal_values
from .weights import WeightFunction

BOUNDARIES = ("dirichlet-both", "dirichlet-outer", "free-inner")
INITS = ("talenti-like", "tent", "supplied")
GAUSS_POINTS = 8


@dataclass(frozen=True)
class MinimizerOptions:
    max_iterations: int = 500
    convergence_tol: float = 1e-10
    armijo: float = 1e-4
    shrink: float = 0.5
    max_backtracks: int = 40
    boundary: str | None = None  # None: free inner end on balls, Dirichlet elsewhere
    init: str = "talenti-like"
    initial_profile: RadialProfile | None = None
    slope_floor: float = 1e-8

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.convergence_tol > 0:
            raise ValueError("convergence_tol must be positive")
        if not 0 < self.shrink < 1 or not 0 < self.armijo < 1:
            raise ValueError("backtracking parameters must lie in (0, 1)")
        if self.boundary is not None and self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}")
        if self.init not in INITS:
            raise ValueError(f"init must be one of {INITS}")
        if self.init == "supplied" and self.initial_profile is None:
            raise ValueError("init='supplied' needs initial_profile")


def default_boundary(grid: QuadratureGrid) -> str:
    return "free-inner" if grid.has_inner_cell else "dirichlet-both"


class P1Functional:
    """N(x) = int |xi'|^p dmu2_raw and D(x) = int |xi|^p dmu1 for the
    piecewise-linear xi through nodal values x, with exact gradients."""

    def __init__(self, hd: HardyData, p: float, grid: QuadratureGrid, n: float | None = None):
        self.p = float(p)
        self.grid = grid
        r = grid.nodes
        self.h = np.diff(r)
        z, w = np.polynomial.legendre.leggauss(GAUSS_POINTS)
        self.lam = 0.5 * (z + 1.0)
        pts = r[:-1, None] + self.h[:, None] * self.lam[None, :]
        dom = grid.domain
        rho = dom.measure_factor(pts, n)
        cell = 0.5 * w[None, :] * self.h[:, None] * rho
        mu1 = nodal_values(hd.mu1_density, pts.ravel()).reshape(pts.shape)
        mu2 = nodal_values(hd.mu2_density, pts.ravel()).reshape(pts.shape) / hd.constant
        if np.any(mu2 < 0):
            raise ValueError("mu2 must be nonnegative")
        self.W1 = cell * mu1
        self.M2 = np.sum(cell * mu2, axis=1)
        self.inner = 0.0
        if grid.has_inner_cell:
            r0 = r[0]
            dim = dom.n if n is None else n
            alpha = hd.mu1_density.power_at_zero()
            m0 = float(nodal_values(hd.mu1_density, np.array([r0]))[0])
            self.inner = m0 * sphere_area(dim) * r0**dim / (dim + alpha)
        if not (np.all(np.isfinite(self.W1)) and np.all(np.isfinite(self.M2))):
            raise ValueError("weights are not finite on the grid")

    def slopes(self, x: np.ndarray) -> np.ndarray:
        return np.diff(x) / self.h

    def numerator(self, x: np.ndarray) -> float:
        return float(np.sum(self.M2 * np.abs(self.slopes(x)) ** self.p))

    def _interp(self, x: np.ndarray) -> np.ndarray:
        return x[:-1, None] * (1.0 - self.lam[None, :]) + x[1:, None] * self.lam[None, :]

    def denominator(self, x: np.ndarray) -> float:
        return float(np.sum(self.W1 * np.abs(self._interp(x)) ** self.p) + self.inner * abs(x[0]) ** self.p)

    def quotient(self, x: np.ndarray) -> float:
        d = self.denominator(x)
        if d == 0:
            raise ValueError("test function orthogonal to mu1 (int |xi|^p dmu1 = 0)")
        return self.numerator(x) / d

    def grad_numerator(self, x: np.ndarray) -> np.ndarray:
        q = self.p * self.M2 * p_flux(self.slopes(x), self.p) / self.h
        g = np.zeros_like(x)
        g[1:] += q
        g[:-1] -= q
        return g

    def grad_denominator(self, x: np.ndarray) -> np.ndarray:
        t = self.p * self.W1 * p_flux(self._interp(x), self.p)
        g = np.zeros_like(x)
        g[:-1] += np.sum(t * (1.0 - self.lam[None, :]), axis=1)
        g[1:] += np.sum(t * self.lam[None, :], axis=1)
        g[0] += self.inner * self.p * p_flux(np.array([x[0]]), self.p)[0]
        return g

    def gradient(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        num, den = self.numerator(x), self.denominator(x)
        if den == 0:
            raise ValueError("test function orthogonal to mu1 (int |xi|^p dmu1 = 0)")
        q = num / den
        return q, (self.grad_numerator(x) - q * self.grad_denominator(x)) / den

    def stiffness_bands(self, x: np.ndarray, free: np.ndarray, floor: float) -> np.ndarray:
        """Banded form of the p-linearized stiffness matrix restricted to ``free``."""
        s = np.abs(self.slopes(x))
        top = float(np.max(s)) if s.size else 0.0
        s = np.maximum(s, floor * top if top > 0 else 1.0)
        k = self.M2 * s ** (self.p - 2) / self.h**2
        m = x.size
        diag = np.zeros(m)
        diag[:-1] += k
        diag[1:] += k
        off = -k
        idx = np.flatnonzero(free)
        d = diag[idx]
        up = np.zeros(idx.size)
        # consecutive free indices share a cell
        link = np.diff(idx) == 1
        up[1:][link] = off[idx[:-1][link]]
        lo = np.zeros(idx.size)
        lo[:-1][link] = off[idx[:-1][link]]
        return np.vstack([up, d, lo])


def _free_mask(m: int, boundary: str) -> np.ndarray:
    free = np.ones(m, dtype=bool)
    free[-1] = False
    if boundary == "dirichlet-both":
        free[0] = False
    return free


def rayleigh_quotient(hd: HardyData, xi: RadialProfile, p: float, grid: QuadratureGrid,
                      n: float | None = None) -> float:
    """int |xi'|^p dmu2 / int |xi|^p dmu1 with mu2's folded constant removed."""
    x = nodal_values(xi, grid.nodes)
    return P1Functional(hd, p, grid, n).quotient(x)


def check_gradient(functional: P1Functional, x: np.ndarray, seed: int = 0, directions: int = 3,
                   eps: float = 1e-6) -> float:
    """Largest relative mismatch between the exact directional derivative of the
    discrete quotient and a central difference along random smooth directions
    v = x * c(s), c a random cosine series in the node index s, so the
    perturbation is relative to the iterate wherever the weights are large."""
    rng = np.random.default_rng(seed)
    _, g = functional.gradient(x)
    m = x.size
    s = np.arange(m) / (m - 1)
    worst = 0.0
    for _ in range(directions):
        coef = rng.standard_normal(6)
        c = sum(a * np.cos(k * np.pi * s) for k, a in enumerate(coef))
        v = x * c / np.max(np.abs(c))
        exact = float(g @ v)
        fd = (functional.quotient(x + eps * v) - functional.quotient(x - eps * v)) / (2 * eps)
        denom = max(abs(exact), abs(fd), 1e-300)
        worst = max(worst, abs(exact - fd) / denom)
    return worst


@dataclass
class MinimizerResult:
    value: float
    minimizer: RadialProfile
    trace: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    gradient_error: float = float("nan")
    boundary: str = ""

    def __iter__(self):
        return iter((self.value, self.minimizer, self.trace))


def smooth_step(t) -> np.ndarray:
    """C-infinity transition from 1 (t <= 0) to 0 (t >= 1)."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t < 1, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
        b = np.where(t > 0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
    return a / (a + b)


def smooth_cutoff(r: np.ndarray, r_max: float, start: float = 0.5) -> np.ndarray:
    """1 up to start * r_max, smoothly down to 0 at r_max."""
    r0 = start * r_max
    return smooth_step((r - r0) / (r_max - r0))


def _initial_values(grid: QuadratureGrid, p: float, opts: MinimizerOptions, boundary: str) -> np.ndarray:
    r = grid.nodes
    lo, hi = grid.domain.r_min, grid.domain.r_max
    if opts.init == "supplied":
        x = nodal_values(opts.initial_profile, r).copy()
    elif opts.init == "tent":
        mid = np.sqrt(r[0] * hi) if boundary != "dirichlet-both" and r[0] > 0 else 0.5 * (lo + hi)
        x = np.interp(r, [r[0], mid, hi], [1.0 if boundary != "dirichlet-both" else 0.0, 1.0, 0.0])
    else:
        x = (1.0 + r ** (p / (p - 1))) ** (-1.0) * (1.0 - r / hi)
        if boundary == "dirichlet-both":
            x = x * (r - lo) / (hi - lo)
    x[-1] = 0.0
    if boundary == "dirichlet-both":
        x[0] = 0.0
    return x


def minimize_rayleigh(hd: HardyData, p: float, grid: QuadratureGrid, n: float | None = None,
                      opts: MinimizerOptions | None = None) -> MinimizerResult:
    """Preconditioned descent with Armijo backtracking on the discrete quotient.

    The search direction is -(1/p) A^{-1} grad Q, A being the stiffness matrix
    of the numerator linearized at the iterate; for p = 2 a unit step is one
    inverse-iteration sweep.  Iterates are renormalized to int |xi|^p dmu1 = 1
    (the quotient is 0-homogeneous, so the trace is unaffected) and the trace
    is nonincreasing because every accepted step decreases Q.
    """
    opts = opts or MinimizerOptions()
    boundary = opts.boundary or default_boundary(grid)
    F = P1Functional(hd, p, grid, n)
    free = _free_mask(grid.size, boundary)
    x = _initial_values(grid, p, opts, boundary)
    x = x / F.denominator(x) ** (1.0 / p)
    grad_err = check_gradient(F, x)
    q, g = F.gradient(x)
    if not np.isfinite(q):
        raise FloatingPointError("non-finite quotient at iteration 0")
    trace = [q]
    converged = False
    it = 0
    for it in range(1, opts.max_iterations + 1):
        g = np.where(free, g, 0.0)
        bands = F.stiffness_bands(x, free, opts.slope_floor)
        d = np.zeros_like(x)
        d[free] = -solve_banded((1, 1), bands, g[free]) / p
        slope = float(g @ d)
        if not slope < 0:
            d = -g
            slope = float(g @ d)
            if not slope < 0:
                converged = True
                break
        t = 1.0
        accepted = False
        for _ in range(opts.max_backtracks):
            x_new = x + t * d
            q_new = F.quotient(x_new)
            if not np.isfinite(q_new):
                raise FloatingPointError(f"non-finite quotient at iteration {it}")
            if q_new <= q + opts.armijo * t * slope:
                accepted = True
                break
            t *= opts.shrink
        if not accepted:
            converged = True
            break
        x = x_new / F.denominator(x_new) ** (1.0 / p)
        change = abs(q - q_new) / max(abs(q), 1e-300)
        q, g = F.gradient(x)
        trace.append(q_new)
        if change <= opts.convergence_tol:
            converged = True
            break
    if x[np.argmax(np.abs(x))] < 0:
        x = -x
    profile = RadialProfile(grid.nodes, x)
    return MinimizerResult(trace[-1], profile, trace, it, converged, grad_err, boundary)


def talenti_like_family(grid: QuadratureGrid, p: float, cutoff_start: float = 0.5,
                        scale: float = 1.0) -> Callable[[float], RadialProfile]:
    """s -> (1 + (r/scale)^{p/(p-1)})^{-s} times a smooth cutoff reaching 0 at r_max."""
    r = grid.nodes
    chi = smooth_cutoff(r, grid.domain.r_max, cutoff_start)
    base = 1.0 + (r / scale) ** (p / (p - 1))

    def member(s: float) -> RadialProfile:
        return RadialProfile(r, base ** (-float(s)) * chi)

    return member


def sharpness_probe(hd: HardyData, family: Callable[[float], RadialProfile], param_grid,
                    p: float, grid: QuadratureGrid, n: float | None = None) -> tuple[float, float]:
    """Minimum of the quotient over a one-parameter trial family."""
    F = P1Functional(hd, p, grid, n)
    best, best_s = np.inf, None
    for s in param_grid:
        q = F.quotient(nodal_values(family(s), grid.nodes))
        if q < best:
            best, best_s = q, s
    return float(best), best_s


def r_max_sweep(hd: HardyData, p: float, n: int, r_max_values, size: int = 4000,
                r_first: float = 1e-12, opts: MinimizerOptions | None = None) -> list[tuple[float, float]]:
    """Minimized quotients on truncated full-space domains of growing radius."""
    rows = []
    for R in r_max_values:
        dom = RadialDomain(n, 0.0, float(R), "full-space-truncated")
        grid = QuadratureGrid.log_spaced(dom, size, r_first)
        rows.append((float(R), minimize_rayleigh(hd, p, grid, n, opts).value))
    return rows


def two_weight_data(mu1: WeightFunction, mu2: WeightFunction) -> HardyData:
    """Raw pair (mu1, mu2) with constant 1."""
    return HardyData(mu1, mu2, 1.0, {"construction": "raw-weights"})


__all__ = [
    "MinimizerOptions",
    "MinimizerResult",
    "P1Functional",
    "rayleigh_quotient",
    "minimize_rayleigh",
    "check_gradient",
    "sharpness_probe",
    "talenti_like_family",
    "smooth_cutoff",
    "r_max_sweep",
    "two_weight_data",
    "BOUNDARIES",
]
