"""Strong and weak verification of -Delta_{p,a} u >= b Phi(u), and the
admissibility threshold sigma0 for the shift sigma."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import PDIProblem, RadialProfile, ScalarFunction, SigmaResult, p_flux
from .radial import QuadratureGrid, integrate_radial, nodal_values, p_laplace_radial, radial_derivative

U_FLOOR = 1e-14
EPS_GRAD = 1e-10
STRONG_RTOL = 1e-6


@dataclass(frozen=True)
class PDIFields:
    """Nodal samples of everything the inequality involves."""

    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    a: np.ndarray
    b: np.ndarray
    phi_u: np.ndarray
    p: float

    @property
    def grad_energy(self) -> np.ndarray:
        """a |u'|^p"""
        return self.a * np.abs(self.du) ** self.p

    def positive(self, u_floor: float = U_FLOOR) -> np.ndarray:
        """Nodes with u > u_floor * max u (the set {u > 0})."""
        top = np.max(self.u) if self.u.size else 0.0
        return self.u > u_floor * top if top > 0 else np.zeros_like(self.u, dtype=bool)

    def gradient_threshold(self, eps_grad: float | None = None) -> float:
        """Absolute threshold on a|u'|^p below which a node counts as critical."""
        if eps_grad is not None:
            return eps_grad
        ge = self.grad_energy
        return EPS_GRAD * float(np.max(ge)) if ge.size else 0.0

    def active(self, eps_grad: float | None = None, u_floor: float = U_FLOOR) -> np.ndarray:
        """Nodes of {u > 0, grad u != 0} at grid resolution."""
        return self.positive(u_floor) & (self.grad_energy > self.gradient_threshold(eps_grad))


def pdi_fields(problem: PDIProblem, u: RadialProfile) -> PDIFields:
    r = u.grid
    du = radial_derivative(u).values
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        phi_u = problem.phi(np.maximum(u.values, 0.0))
    return PDIFields(r, u.values, du, problem.a(r), problem.b(r), phi_u, problem.p)


def safe_apply(f: ScalarFunction, t: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """f(t) on ``mask`` and 0 elsewhere, never evaluating f off the mask."""
    out = np.zeros_like(t, dtype=float)
    if np.any(mask):
        out[mask] = f(t[mask])
    return out


@dataclass(frozen=True)
class StrongCheck:
    residual: RadialProfile
    holds: bool
    worst_relative: float
    worst_r: float


def strong_residual(problem: PDIProblem, u: RadialProfile, grid: QuadratureGrid | None = None) -> RadialProfile:
    """(-Delta_{p,a} u) - b Phi(u) at the interior nodes of u's grid."""
    if np.any(u.values < 0):
        raise ValueError("candidate solution u must be nonnegative on the grid")
    lap = p_laplace_radial(u, problem.a, problem.p, problem.domain.n, grid)
    r = lap.grid
    rhs = problem.b(r) * problem.phi(u.values[1:-1])
    return RadialProfile(r, lap.values - rhs)


def strong_check(problem: PDIProblem, u: RadialProfile, grid: QuadratureGrid | None = None,
                 rtol: float = STRONG_RTOL) -> StrongCheck:
    """Strong form holds when residual >= -rtol * max(|lhs|, |rhs|) at every interior node."""
    lap = p_laplace_radial(u, problem.a, problem.p, problem.domain.n, grid)
    r = lap.grid
    rhs = problem.b(r) * problem.phi(u.values[1:-1])
    res = lap.values - rhs
    scale = np.maximum(np.abs(lap.values), np.abs(rhs))
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(scale > 0, res / scale, np.where(res < 0, -np.inf, 0.0))
    i = int(np.argmin(rel))
    worst = float(rel[i])
    return StrongCheck(RadialProfile(r, res), worst >= -rtol, worst, float(r[i]))


def relative_sup(residual: np.ndarray, reference: np.ndarray) -> float:
    """max |residual| / max |reference|."""
    return float(np.max(np.abs(residual)) / np.max(np.abs(reference)))


def check_compact_support(w: RadialProfile, grid: QuadratureGrid, name: str = "test function",
                          atol: float = 0.0):
    """Raise unless w vanishes at the outer edge (and the inner edge when that is boundary)."""
    scale = float(np.max(np.abs(w.values))) if w.values.size else 0.0
    lim = atol * scale
    if abs(w.values[-1]) > lim:
        raise ValueError(f"{name} is not compactly supported: value {w.values[-1]:.3g} at r_max")
    if grid.domain.inner_is_boundary and abs(w.values[0]) > lim:
        raise ValueError(f"{name} is not compactly supported: value {w.values[0]:.3g} at r_min")


def weak_form_margin(problem: PDIProblem, u: RadialProfile, w: RadialProfile, grid: QuadratureGrid) -> float:
    """int a |u'|^{p-2} u' w' dx - int Phi(u) b w dx for a nonnegative compactly supported w."""
    if np.any(w.values < 0):
        raise ValueError("weak-form test function must be nonnegative")
    check_compact_support(w, grid)
    f = pdi_fields(problem, u)
    dw = radial_derivative(w).values
    flux = f.a * p_flux(f.du, problem.p)
    lhs = integrate_radial(flux * dw, grid)
    rhs = integrate_radial(f.phi_u * f.b * w.values, grid)
    return lhs - rhs


def weak_form_scale(problem: PDIProblem, u: RadialProfile, w: RadialProfile, grid: QuadratureGrid) -> float:
    """Size of the two weak-form integrals, used to make margins relative."""
    f = pdi_fields(problem, u)
    dw = radial_derivative(w).values
    a = integrate_radial(np.abs(f.a * p_flux(f.du, problem.p) * dw), grid)
    b = integrate_radial(np.abs(f.phi_u * f.b * w.values), grid)
    return max(a, b)


def compute_sigma0(problem: PDIProblem, u: RadialProfile, g: ScalarFunction,
                   eps_grad: float | None = None, upper: float | None = None,
                   u_floor: float = U_FLOOR) -> SigmaResult:
    """sigma0 = sup over non-critical nodes of -Phi(u) b g(u) / (a |u'|^p).

    A critical node (a|u'|^p at or below the threshold) with Phi(u) b < 0 makes
    the admissible set empty (+inf).  If every positive node is critical the
    profile is constant at grid resolution and the -inf sentinel is returned.
    """
    f = pdi_fields(problem, u)
    pos = f.positive(u_floor)
    active = f.active(eps_grad, u_floor)
    critical = pos & ~active
    source = f.phi_u * f.b
    if np.any(critical & (source < 0)):
        return SigmaResult(np.inf, upper, False, int(active.sum()))
    if not np.any(active):
        return SigmaResult(-np.inf, upper, True, 0)
    gu = safe_apply(g, f.u, active)
    s = -source[active] * gu[active] / f.grad_energy[active]
    i = int(np.argmax(s))
    sigma0 = float(s[i]) + 0.0  # folds -0.0 into 0.0
    return SigmaResult(sigma0, upper, False, int(active.sum()), float(f.r[active][i]))


def certified_sigma0(problem: PDIProblem, make_profile: Callable[[QuadratureGrid], RadialProfile],
                     g: ScalarFunction, grid: QuadratureGrid, rtol: float = 0.01,
                     **kwargs) -> tuple[SigmaResult, SigmaResult, bool]:
    """sigma0 on ``grid`` and on its refinement; certified when they agree within rtol."""
    coarse = compute_sigma0(problem, make_profile(grid), g, **kwargs)
    fine = compute_sigma0(problem, make_profile(grid.refined()), g, **kwargs)
    a, b = coarse.sigma0, fine.sigma0
    if np.isfinite(a) and np.isfinite(b):
        ok = abs(a - b) <= rtol * max(abs(a), abs(b)) or a == b
    else:
        ok = a == b
    return coarse, fine, bool(ok)


__all__ = [
    "PDIFields",
    "StrongCheck",
    "pdi_fields",
    "strong_residual",
    "strong_check",
    "relative_sup",
    "weak_form_margin",
    "weak_form_scale",
    "compute_sigma0",
    "certified_sigma0",
    "check_compact_support",
    "safe_apply",
    "nodal_values",
]
