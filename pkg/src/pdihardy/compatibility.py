"""Numerical checks of the structural hypotheses: the B_p weight
condition, the (Psi, g) inequality, the behaviour of Psi g^{p-1} and Psi/g
near zero, the vanishing tails, and the zero set of u."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import RadialDomain, RadialProfile, ScalarFunction
from .pairs import PsiGPair
from .radial import QuadratureGrid, integrate_radial, radial_derivative
from .supersolution import U_FLOOR, safe_apply
from .weights import WeightFunction, bp_power_criterion

THETA_CLASSES = ("nonincreasing-near-0", "bounded-near-0", "fails-both")
STABILITY_RTOL = 0.01


# -- B_p --------------------------------------------------------------------
@dataclass(frozen=True)
class BpReport:
    holds: bool
    integral_samples: list
    method: str  # "analytic" or "numeric"
    note: str = ""


def _annulus_integral(a: WeightFunction, p: float, n: int, lo: float, hi: float, size: int) -> float:
    dom = RadialDomain(n, lo, hi, "annulus" if n > 1 or lo > 0 else "interval-1d")
    grid = QuadratureGrid.log_spaced(dom, size) if hi / lo > 100 else QuadratureGrid.uniform(dom, size)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        vals = a(grid.nodes) ** (-1.0 / (p - 1))
    try:
        return integrate_radial(vals, grid)
    except ValueError:
        return float("inf")


def _stable(values: list[float], rtol: float = STABILITY_RTOL) -> bool:
    if not all(np.isfinite(values)):
        return False
    x, y = values[-2], values[-1]
    return abs(y - x) <= rtol * max(abs(x), abs(y)) or x == y


def check_bp_weight(a: WeightFunction, p: float, domain: RadialDomain,
                    grid: QuadratureGrid | None = None, levels: int = 6, size: int = 401) -> BpReport:
    """Is a^{-1/(p-1)} locally integrable on the domain?

    Numerically: integrate over compact sub-annuli whose inner radius shrinks
    toward the origin (or, away from the origin, over one interior annulus),
    each at three nested resolutions.  Every value must be finite and stable
    under refinement, and the nested family itself must settle.  Closed-form
    weights are decided by the exact power criterion at r = 0.
    """
    if not p > 1:
        raise ValueError(f"B_p check needs p > 1, got p={p}")
    n = 1 if domain.kind == "interval-1d" else domain.n
    r_first = grid.nodes[0] if grid is not None else 1e-6
    if domain.contains_origin:
        outer = 0.5 * domain.r_max
        inner = np.geomspace(0.25 * outer, max(r_first, 1e-12 * outer), levels)
        annuli = [(float(lo), outer) for lo in inner]
    else:
        width = domain.r_max - domain.r_min
        annuli = [(domain.r_min + 0.25 * width, domain.r_max - 0.25 * width)]

    samples = []
    refinement_ok = True
    for lo, hi in annuli:
        vals = [_annulus_integral(a, p, n, lo, hi, size * 2**k - (2**k - 1)) for k in range(3)]
        samples.append({"r_inner": lo, "r_outer": hi, "integrals": vals})
        refinement_ok &= _stable(vals)
    finals = [s["integrals"][-1] for s in samples]
    nested_ok = len(finals) < 2 or _stable(finals)
    numeric = bool(refinement_ok and nested_ok)

    exact = bp_power_criterion(a, p, domain)
    if exact is None:
        return BpReport(numeric, samples, "numeric")
    note = "" if exact == numeric else "numeric heuristic disagrees with the exact criterion"
    return BpReport(bool(exact), samples, "analytic", note)


# -- (Psi, g) ---------------------------------------------------------------
@dataclass(frozen=True)
class PsiGReport:
    holds: bool
    max_C: float
    worst_t: float
    C: float
    samples: int


def check_psi_g_condition(pair: PsiGPair, sample_grid, tol: float = 1e-8,
                          interval: tuple[float, float] | None = None) -> PsiGReport:
    """g Psi' + C Psi <= tol |C| Psi at every sample (relative tolerance).

    ``interval`` = (k1, k2) restricts sampling to the value range of u.
    """
    t = np.asarray(sample_grid, dtype=float)
    if interval is not None:
        k1, k2 = interval
        t = t[(t >= k1) & (t <= k2)]
    if t.size == 0:
        raise ValueError("no sample points in the requested interval")
    if np.any(t <= 0):
        raise ValueError("(Psi, g) samples must be positive")
    psi, g = pair.psi(t), pair.g(t)
    if np.any(psi <= 0) or np.any(g <= 0):
        i = int(np.argmax((psi <= 0) | (g <= 0)))
        raise ValueError(f"pair violates positivity at t={t[i]:g}: Psi={psi[i]:g}, g={g[i]:g}")
    ratio = -g * pair.dpsi(t) / psi
    i = int(np.argmin(ratio))
    max_C = float(ratio[i])
    slack = tol * max(abs(pair.C), 1.0)
    return PsiGReport(bool(max_C >= pair.C - slack), max_C, float(t[i]), pair.C, int(t.size))


# -- behaviour near zero ----------------------------------------------------
def classify_near_zero(values) -> str:
    """Classify f along a probe sequence t_k decreasing to 0.

    Strictly decreasing in t wins; otherwise bounded (no growth toward 0, or
    growth with geometrically shrinking increments); otherwise monotone.
    """
    f = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(f)):
        return "fails-both"
    step = np.diff(f)  # f(t_{k+1}) - f(t_k), t_{k+1} < t_k
    if np.all(step > 0):
        return "nonincreasing-near-0"
    mag = np.abs(f)
    grow = np.maximum(np.diff(mag), 0.0)
    scale = max(float(np.max(mag)), 1e-300)
    if np.all(grow <= 1e-12 * scale):
        return "bounded-near-0"
    tail = grow[-6:]
    if np.all(tail[1:] <= 0.9 * tail[:-1] + 1e-12 * scale):
        return "bounded-near-0"
    if np.all(step >= 0):
        return "nonincreasing-near-0"
    return "fails-both"


@dataclass(frozen=True)
class ThetaReport:
    theta: str
    psi_over_g: str

    @property
    def ok(self) -> bool:
        return "fails-both" not in (self.theta, self.psi_over_g)


DEFAULT_T_PROBE = np.geomspace(1.0, 1e-10, 41)


def check_theta_behavior(pair: PsiGPair, p: float, t_probe=None) -> ThetaReport:
    """Classify Theta = Psi g^{p-1} and Psi/g near 0."""
    t = DEFAULT_T_PROBE if t_probe is None else np.asarray(t_probe, dtype=float)
    if t.size < 3 or np.any(np.diff(t) >= 0) or np.any(t <= 0):
        raise ValueError("t_probe must be a strictly decreasing positive sequence")
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        theta = pair.theta(t, p)
        ratio = pair.psi(t) / pair.g(t)
    return ThetaReport(classify_near_zero(theta), classify_near_zero(ratio))


# -- vanishing tails --------------------------------------------------------
@dataclass(frozen=True)
class TailsReport:
    R_values: list
    Z1_values: list
    Z2_values: list
    converges: bool


def _settles(z: list[float], rtol: float) -> bool:
    z = np.abs(np.asarray(z, dtype=float))
    if z[-1] == 0.0:
        return True
    top = float(np.max(z))
    half = z[len(z) // 2:]
    return bool(np.all(np.diff(half) <= 0) and z[-1] <= rtol * top)


def check_vanishing_tails(u: RadialProfile, a: WeightFunction, b: WeightFunction, phi: ScalarFunction,
                          pair: PsiGPair, K: tuple[float, float], R_sequence, grid: QuadratureGrid,
                          p: float, rtol: float = 1e-2) -> TailsReport:
    """Psi(R) int_{K, u >= R/2} a |u'|^{p-1} and Psi(R) int_{K, u >= R/2} Phi(u) b along R.

    ``K`` = (k0, k1) is a compact radial band and u must be sampled on ``grid``.
    The sequences converge when both end at exactly 0 or decrease over their
    second half to below rtol times their largest magnitude.
    """
    R_seq = np.asarray(R_sequence, dtype=float)
    if R_seq.size < 2 or np.any(np.diff(R_seq) <= 0) or np.any(R_seq <= 0):
        raise ValueError("R_sequence must be positive and strictly increasing")
    if not np.array_equal(u.grid, grid.nodes):
        raise ValueError("u must be sampled on the quadrature grid")
    k0, k1 = K
    r = grid.nodes
    band = (r >= k0) & (r <= k1)
    du = radial_derivative(u).values
    flux = a(r) * np.abs(du) ** (p - 1)
    pos = u.values > 0
    source = safe_apply(phi, u.values, pos) * b(r)
    z1, z2 = [], []
    for R in R_seq:
        mask = band & (u.values >= R / 2)
        weight = float(pair.psi(np.array([R]))[0])
        z1.append(weight * integrate_radial(np.where(mask, flux, 0.0), grid))
        z2.append(weight * integrate_radial(np.where(mask, source, 0.0), grid))
    ok = _settles(z1, rtol) and _settles(z2, rtol)
    return TailsReport(R_seq.tolist(), z1, z2, ok)


# -- zero set ---------------------------------------------------------------
@dataclass(frozen=True)
class ZeroSetReport:
    touches_zero: bool
    zero_radii: list = field(default_factory=list)

    @property
    def flag(self) -> str:
        return "touches-zero" if self.touches_zero else "positive-by-construction"


def check_zero_set(u: RadialProfile, u_floor: float = U_FLOOR) -> ZeroSetReport:
    """Flag interior nodes where a tabulated u vanishes (the {u = 0} behaviour
    is only satisfied by construction for strictly positive profiles)."""
    top = float(np.max(u.values))
    zero = u.values <= u_floor * top if top > 0 else np.ones(u.values.shape, dtype=bool)
    zero[-1] = False  # vanishing at the outer edge is the compact-support case
    return ZeroSetReport(bool(np.any(zero)), u.grid[zero].tolist())
