"""Both sides of the global and local Caccioppoli estimates, the Young
splitting inequality, and the truncation min(u + delta, R)."""

from __future__ import annotations

import numpy as np

from .constants import caccioppoli_constant
from .model import Margin, PDIProblem, RadialProfile
from .pairs import PsiGPair
from .radial import QuadratureGrid, integrate_radial, radial_derivative
from .supersolution import U_FLOOR, PDIFields, compute_sigma0, pdi_fields, safe_apply

PHI_FLOOR = 1e-12
MARGIN_RTOL = 1e-9
MARGIN_ATOL = 1e-12
SIGMA_SLACK = 1e-9


def young_split(s1, s2, p: float, tau: float):
    """(s1 s2^{p-1}, s1^p/(p tau^{p-1}) + ((p-1)/p) tau s2^p)."""
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    p = np.asarray(p, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if np.any(s1 < 0) or np.any(s2 < 0):
        raise ValueError("young_split needs s1, s2 >= 0")
    if np.any(tau <= 0) or np.any(p <= 1):
        raise ValueError("young_split needs tau > 0 and p > 1")
    lhs = s1 * s2 ** (p - 1)
    rhs = s1**p / (p * tau ** (p - 1)) + (p - 1) / p * tau * s2**p
    return lhs, rhs


def margin_tolerance(rhs: float) -> float:
    return MARGIN_RTOL * abs(rhs) + MARGIN_ATOL


def resolve_sigma(problem: PDIProblem, u: RadialProfile, pair: PsiGPair, sigma: float,
                  sigma0: float | None = None, eps_grad: float | None = None) -> float:
    """Check sigma0 <= sigma < C and return sigma0."""
    if sigma0 is None:
        sigma0 = compute_sigma0(problem, u, pair.g, eps_grad).sigma0
    if not sigma < pair.C:
        caccioppoli_constant(problem.p, pair.C, sigma)  # raises with the standard message
    if sigma0 == np.inf or sigma < sigma0 - SIGMA_SLACK * max(1.0, abs(sigma0)):
        raise ValueError(
            f"sigma={sigma:g} < sigma0={sigma0:g} violates Assumption A a) (need sigma0 <= sigma < C)"
        )
    return sigma0


def mu1_density(f: PDIFields, pair: PsiGPair, sigma: float, pos: np.ndarray) -> np.ndarray:
    """(Phi(u) b + sigma a |u'|^p / g(u)) Psi(u) on {u > 0}, zero elsewhere."""
    gu = safe_apply(pair.g, f.u, pos)
    psi = safe_apply(pair.psi, f.u, pos)
    shift = np.zeros_like(f.u)
    shift[pos] = sigma * f.grad_energy[pos] / gu[pos]
    out = np.zeros_like(f.u)
    out[pos] = (f.phi_u[pos] * f.b[pos] + shift[pos]) * psi[pos]
    return out


def theta_density(f: PDIFields, pair: PsiGPair, active: np.ndarray) -> np.ndarray:
    """a Psi(u) g(u)^{p-1} on {u > 0, u' != 0}, zero elsewhere."""
    out = np.zeros_like(f.u)
    if np.any(active):
        ua = f.u[active]
        out[active] = f.a[active] * pair.psi(ua) * pair.g(ua) ** (f.p - 1)
    return out


def _cutoff_term(phi: RadialProfile, p: float, phi_floor: float) -> tuple[np.ndarray, np.ndarray]:
    """|phi'|^p phi^{1-p} on {phi > phi_floor max phi} and phi' itself."""
    if np.any(phi.values < 0):
        raise ValueError("cutoff function phi must be nonnegative")
    dphi = radial_derivative(phi).values
    top = float(np.max(phi.values))
    keep = phi.values > phi_floor * top if top > 0 else np.zeros(phi.values.shape, dtype=bool)
    out = np.zeros_like(phi.values)
    # (|phi'|/phi)^p phi stays finite where phi is subnormal
    out[keep] = (np.abs(dphi[keep]) / phi.values[keep]) ** p * phi.values[keep]
    return out, dphi


def _check_support(phi: RadialProfile, grid: QuadratureGrid):
    if not np.array_equal(phi.grid, grid.nodes):
        raise ValueError("phi must be sampled on the quadrature grid")
    if phi.values[-1] != 0 or (grid.domain.inner_is_boundary and phi.values[0] != 0):
        raise ValueError("cutoff function phi must vanish at the boundary of the domain")


def caccioppoli_margin(problem: PDIProblem, u: RadialProfile, pair: PsiGPair, sigma: float,
                       phi: RadialProfile, grid: QuadratureGrid, sigma0: float | None = None,
                       eps_grad: float | None = None, phi_floor: float = PHI_FLOOR,
                       u_floor: float = U_FLOOR) -> Margin:
    """lhs = int_{u>0} (Phi(u) b + sigma a|u'|^p/g(u)) Psi(u) phi,
    rhs = c int a Psi(u) g(u)^{p-1} |phi'|^p phi^{1-p} over {u > 0, u' != 0}."""
    _check_support(phi, grid)
    resolve_sigma(problem, u, pair, sigma, sigma0, eps_grad)
    c = caccioppoli_constant(problem.p, pair.C, sigma)
    f = pdi_fields(problem, u)
    pos = f.positive(u_floor)
    active = f.active(eps_grad, u_floor)
    cut, _ = _cutoff_term(phi, problem.p, phi_floor)
    lhs = integrate_radial(mu1_density(f, pair, sigma, pos) * phi.values, grid)
    rhs = c * integrate_radial(theta_density(f, pair, active) * cut, grid)
    return Margin(lhs, rhs, margin_tolerance(rhs), c)


def local_estimate_margin(problem: PDIProblem, u: RadialProfile, pair: PsiGPair, sigma: float,
                          phi: RadialProfile, R: float, grid: QuadratureGrid,
                          sigma0: float | None = None, eps_grad: float | None = None,
                          phi_floor: float = PHI_FLOOR, u_floor: float = U_FLOOR) -> Margin:
    """The estimate on the band {0 < u < R}, with remainder
    C(R) = Psi(R) [int_{u>=R/2} a |u'|^{p-1} |phi'| - int_{u>=R/2} Phi(u) b phi]."""
    if not R > 0:
        raise ValueError(f"cap R must be positive, got {R}")
    _check_support(phi, grid)
    resolve_sigma(problem, u, pair, sigma, sigma0, eps_grad)
    c = caccioppoli_constant(problem.p, pair.C, sigma)
    f = pdi_fields(problem, u)
    pos = f.positive(u_floor)
    below = pos & (f.u < R)
    active = f.active(eps_grad, u_floor) & below
    cut, dphi = _cutoff_term(phi, problem.p, phi_floor)
    lhs = integrate_radial(mu1_density(f, pair, sigma, below) * phi.values, grid)
    main = c * integrate_radial(theta_density(f, pair, active) * cut, grid)
    upper = f.u >= R / 2
    if np.any(upper):
        psi_R = float(pair.psi(np.array([R]))[0])
        flux = np.where(upper, f.a * np.abs(f.du) ** (problem.p - 1) * np.abs(dphi), 0.0)
        src = np.where(upper, f.phi_u * f.b * phi.values, 0.0)
        remainder = psi_R * (integrate_radial(flux, grid) - integrate_radial(src, grid))
    else:
        remainder = 0.0
    rhs = main + remainder
    return Margin(lhs, rhs, margin_tolerance(rhs), c, remainder)


def truncate_profile(u: RadialProfile, delta: float, R: float) -> RadialProfile:
    """min(u + delta, R) with derivative 0 where the cap binds."""
    if not 0 < delta < R:
        raise ValueError(f"need 0 < delta < R, got delta={delta}, R={R}")
    shifted = u.values + delta
    capped = shifted >= R
    vals = np.where(capped, R, shifted)
    d = np.where(capped, 0.0, radial_derivative(u).values)
    return RadialProfile(u.grid, vals, d, u.extrapolation, u.tail_exponent)


__all__ = [
    "young_split",
    "caccioppoli_margin",
    "local_estimate_margin",
    "truncate_profile",
    "mu1_density",
    "theta_density",
    "resolve_sigma",
    "margin_tolerance",
]
