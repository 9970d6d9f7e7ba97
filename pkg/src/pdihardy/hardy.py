"""Hardy measures built from a supersolution, the two-weight sharp form,
and evaluation of int |xi|^p dmu1 <= int |xi'|^p dmu2."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .caccioppoli import margin_tolerance, mu1_density, resolve_sigma, theta_density
from .compatibility import check_bp_weight, check_psi_g_condition, check_theta_behavior, check_zero_set
from .constants import hardy_mu2_constant, hp_constant, make_hp_weights
from .model import Margin, PDIProblem, RadialDomain, RadialProfile, ScalarFunction
from .pairs import PsiGPair
from .radial import QuadratureGrid, integrate_radial, nodal_values, p_laplace_radial, radial_derivative
from .supersolution import U_FLOOR, check_compact_support, pdi_fields
from .weights import WeightFunction

SHARPNESS = ("proved-by-eigenfunction", "unknown", "not-applicable")


@dataclass(frozen=True, eq=False)
class HardyData:
    """Densities of mu1 and mu2 (mu2 includes ``constant``) plus provenance.

    ``constant`` is the multiplicative factor folded into ``mu2_density``;
    dividing it out gives the raw weight used by Rayleigh quotients.
    """

    mu1_density: WeightFunction
    mu2_density: WeightFunction
    constant: float = 1.0
    provenance: dict = field(default_factory=dict)
    sharpness: str = "unknown"

    def __post_init__(self):
        if not self.constant > 0:
            raise ValueError("Hardy constant must be positive")
        if self.mu2_density.signed:
            raise ValueError("mu2 density must be nonnegative")
        if self.sharpness not in SHARPNESS:
            raise ValueError(f"sharpness must be one of {SHARPNESS}")

    @classmethod
    def from_weights(cls, mu1: WeightFunction, raw_mu2: WeightFunction, constant: float,
                     provenance: dict | None = None, sharpness: str = "unknown") -> HardyData:
        mu2 = raw_mu2 if constant == 1 else raw_mu2.scaled(constant)
        return cls(mu1, mu2, constant, provenance or {}, sharpness)

    def raw_mu2(self, r) -> np.ndarray:
        return nodal_values(self.mu2_density, np.asarray(r, dtype=float)) / self.constant

    def describe(self) -> dict:
        return {
            "mu1": self.mu1_density.describe(),
            "mu2": self.mu2_density.describe(),
            "constant": self.constant,
            "sharpness": self.sharpness,
            "provenance": self.provenance,
        }


def _tab(r: np.ndarray, values: np.ndarray) -> WeightFunction:
    signed = bool(np.any(values < 0))
    return WeightFunction.tabulated(RadialProfile(r, values), signed=signed)


def assumption_failures(problem: PDIProblem, u: RadialProfile, pair: PsiGPair) -> list[str]:
    """Names of the checkable hypotheses that fail for (problem, u, pair)."""
    failures = []
    if not check_bp_weight(problem.a, problem.p, problem.domain).holds:
        failures.append("B_p condition on a")
    pos = u.values[u.values > 0]
    if pos.size:
        t = np.geomspace(pos.min(), pos.max(), 200) if pos.max() > pos.min() else pos[:1]
        if not check_psi_g_condition(pair, t).holds:
            failures.append("(Psi, g) compatibility on the range of u")
    if not check_theta_behavior(pair, problem.p).ok:
        failures.append("Theta behaviour near 0")
    return failures


def construct_hardy_measures(problem: PDIProblem, u: RadialProfile, pair: PsiGPair, sigma: float,
                             grid: QuadratureGrid | None = None, waiver: bool = False,
                             sigma0: float | None = None, eps_grad: float | None = None,
                             u_floor: float = U_FLOOR) -> HardyData:
    """mu1 = (Phi(u) b + sigma a |u'|^p / g(u)) Psi(u) on {u > 0} and
    mu2 = ((p-1)/(C-sigma))^{p-1} a Psi(u) g(u)^{p-1} on {u > 0, u' != 0},
    tabulated on the nodes of u."""
    if grid is not None and not np.array_equal(u.grid, grid.nodes):
        raise ValueError("u must be sampled on the quadrature grid")
    K = hardy_mu2_constant(problem.p, pair.C, sigma)
    sigma0 = resolve_sigma(problem, u, pair, sigma, sigma0, eps_grad)
    if not waiver:
        failures = assumption_failures(problem, u, pair)
        if failures:
            raise ValueError("hypotheses not verified: " + "; ".join(failures) + " (pass waiver=True to override)")
    f = pdi_fields(problem, u)
    pos = f.positive(u_floor)
    active = f.active(eps_grad, u_floor)
    mu1 = mu1_density(f, pair, sigma, pos)
    mu2 = K * theta_density(f, pair, active)
    provenance = {
        "construction": "supersolution",
        "pair": pair.describe(),
        "sigma": sigma,
        "sigma0": sigma0,
        "p": problem.p,
        "waived": waiver,
        "zero_set": check_zero_set(u, u_floor).flag,
    }
    return HardyData(_tab(f.r, mu1), _tab(f.r, mu2), K, provenance)


def hardy_sides(hd: HardyData, xi: RadialProfile, p: float, grid: QuadratureGrid,
                n: float | None = None, raw: bool = False) -> tuple[float, float]:
    """(int |xi|^p dmu1, int |xi'|^p dmu2); ``raw`` divides mu2 by the constant."""
    r = grid.nodes
    x = nodal_values(xi, r)
    dx = radial_derivative(xi).values if np.array_equal(xi.grid, r) else radial_derivative(xi)(r)
    m1 = nodal_values(hd.mu1_density, r)
    m2 = nodal_values(hd.mu2_density, r)
    lhs = integrate_radial(m1 * np.abs(x) ** p, grid, n)
    rhs = integrate_radial(np.abs(dx) ** p * m2, grid, n)
    if raw:
        rhs = rhs / hd.constant
    return lhs, rhs


def hardy_margin(hd: HardyData, xi: RadialProfile, p: float, grid: QuadratureGrid,
                 n: float | None = None) -> Margin:
    """Both sides of the Hardy inequality for a compactly supported xi."""
    if np.array_equal(xi.grid, grid.nodes):
        check_compact_support(xi, grid, "xi")
    lhs, rhs = hardy_sides(hd, xi, p, grid, n)
    return Margin(lhs, rhs, margin_tolerance(rhs), hd.constant)


def sharp_case_measures(a: WeightFunction, b: WeightFunction, p: float,
                        domain: RadialDomain | None = None, u0: RadialProfile | None = None,
                        grid: QuadratureGrid | None = None, rtol: float = 1e-6) -> HardyData:
    """mu1 = b, mu2 = a, constant 1.

    With an eigenfunction u0 of -Delta_{p,a} u = b u^{p-1} (checked as an
    equality in strong form and through the energy identity on ``grid``) the
    sharpness flag becomes proved-by-eigenfunction.
    """
    grid_nodes = grid.nodes if grid is not None else None
    if b.form == "tabulated":
        if np.any(b.table.values < 0):
            raise ValueError("b must be nonnegative")
    elif b.signed or (grid_nodes is not None and np.any(b(grid_nodes) < 0)):
        raise ValueError("b must be nonnegative")
    zero_b = b.form == "constant" and b.params[0] == 0
    sharpness = "not-applicable" if zero_b else "unknown"
    provenance = {"construction": "two-weight", "p": p}
    if u0 is not None and not zero_b:
        if grid is None or domain is None:
            raise ValueError("checking an eigenfunction needs a domain and a grid")
        ok, info = verify_eigenfunction(a, b, p, domain, u0, grid, rtol)
        provenance["eigenfunction"] = info
        if ok:
            sharpness = "proved-by-eigenfunction"
    return HardyData(b, a, 1.0, provenance, sharpness)


def verify_eigenfunction(a: WeightFunction, b: WeightFunction, p: float, domain: RadialDomain,
                         u0: RadialProfile, grid: QuadratureGrid, rtol: float = 1e-6) -> tuple[bool, dict]:
    """u0 > 0 inside, -Delta_{p,a} u0 = b u0^{p-1} at interior nodes (two-sided,
    relative rtol) and int a |u0'|^p = int b u0^p."""
    problem = PDIProblem(domain, p, a, b, ScalarFunction.power(p - 1))
    positive = bool(np.all(u0.values[1:-1] > 0))
    lap = p_laplace_radial(u0, a, p, domain.n, grid)
    rhs = b(lap.grid) * problem.phi(u0.values[1:-1])
    scale = np.maximum(np.abs(lap.values), np.abs(rhs))
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(scale > 0, np.abs(lap.values - rhs) / scale, 0.0)
    worst = float(np.max(rel))
    du = radial_derivative(u0).values
    ea = integrate_radial(a(grid.nodes) * np.abs(du) ** p, grid)
    eb = integrate_radial(b(grid.nodes) * np.abs(u0.values) ** p, grid)
    energy_ok = abs(ea - eb) <= max(rtol, 1e-5) * max(abs(eb), 1e-300)
    info = {"positive": positive, "worst_relative_residual": worst, "energy_a": ea, "energy_b": eb}
    return bool(positive and worst <= rtol and energy_ok), info


def hp_hardy_data(n: float, p: float, gamma: float, r_param: float) -> HardyData:
    """C int |xi|^p v1 <= int |xi'|^p v2 written as mu1 = v1, mu2 = v2 / C."""
    v1, v2 = make_hp_weights(n, p, gamma, r_param)
    hc = hp_constant(n, p, gamma, r_param)
    prov = {"construction": "hardy-poincare", "n": n, "p": p, "gamma": gamma,
            "r_param": r_param, "claimed_constant": hc.value, "optimal": hc.optimal}
    return HardyData.from_weights(v1, v2, 1.0 / hc.value, prov)


def classical_hardy_data(n: float, p: float) -> HardyData:
    """mu1 = r^{-p}, raw mu2 = 1, claimed constant ((n - p)/p)^p."""
    claimed = abs((n - p) / p) ** p
    prov = {"construction": "classical-hardy", "n": n, "p": p, "claimed_constant": claimed}
    return HardyData.from_weights(WeightFunction.power(-p), WeightFunction.constant(1.0),
                                  1.0 / claimed, prov)


__all__ = [
    "HardyData",
    "SHARPNESS",
    "construct_hardy_measures",
    "hardy_sides",
    "hardy_margin",
    "sharp_case_measures",
    "verify_eigenfunction",
    "hp_hardy_data",
    "classical_hardy_data",
    "assumption_failures",
]
