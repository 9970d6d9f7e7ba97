"""Config-driven runs behind the CLI verbs: verify, minimize, probe,
transform and pairs.  Each returns a VerificationReport."""

from __future__ import annotations

import math

import numpy as np

from . import testfunctions as tf
from .caccioppoli import caccioppoli_margin, local_estimate_margin
from .compatibility import (
    check_bp_weight,
    check_psi_g_condition,
    check_theta_behavior,
    check_zero_set,
)
from .config import ConfigError, ProblemConfig, _block, _get, build_solution, build_weight
from .constants import caccioppoli_constant, hardy_mu2_constant, make_talenti_profile
from .hardy import (
    HardyData,
    classical_hardy_data,
    construct_hardy_measures,
    hardy_margin,
    hp_hardy_data,
    sharp_case_measures,
)
from .model import PDIProblem, RadialDomain
from .pairs import table_pairs
from .radial import QuadratureGrid
from .rayleigh import (
    MinimizerOptions,
    minimize_rayleigh,
    r_max_sweep,
    sharpness_probe,
    talenti_like_family,
)
from .report import CheckRecord, VerificationReport
from .supersolution import (
    certified_sigma0,
    compute_sigma0,
    strong_check,
    strong_residual,
    weak_form_margin,
    weak_form_scale,
)
from .transforms import radial_change_of_variable, transformed_residual, transformed_source

GRADIENT_TOL = 1e-5
PSI_G_TOL = 1e-8


def _new_report(command: str, cfg: ProblemConfig) -> VerificationReport:
    return VerificationReport(command, cfg.name, cfg.sha256, cfg.run.seed)


def _margin_record(name: str, lhs: float, rhs: float, rtol: float, detail: str = "") -> CheckRecord:
    return CheckRecord.sides(name, lhs, rhs, rtol * abs(rhs) + 1e-12, detail)


# -- verify -------------------------------------------------------------------
def _build_problem(cfg: ProblemConfig, grid: QuadratureGrid):
    if cfg.p is None or cfg.phi is None or cfg.pair is None:
        missing = [k for k, v in (("weights", cfg.p), ("nonlinearity", cfg.phi), ("pair", cfg.pair)) if v is None]
        raise ConfigError(missing[0], "block required for verify")
    u = cfg.solution(grid)
    a = cfg.weight("a", grid, u)
    b = cfg.weight("b", grid, u)
    try:
        problem = PDIProblem(cfg.domain, cfg.p, a, b, cfg.phi)
    except ValueError as exc:
        raise ConfigError("weights", str(exc)) from None
    return problem, u


def _choose_sigma(cfg: ProblemConfig, sigma0: float) -> tuple[float, str]:
    C = cfg.pair.C
    if cfg.run.sigma == "sigma0":
        if sigma0 == -math.inf:
            sigma, how = 0.0, "sigma0 sentinel (constant profile); using 0"
        else:
            sigma, how = sigma0, "sigma0"
    else:
        sigma, how = float(cfg.run.sigma), "explicit"
    if not sigma < C:
        raise ConfigError("run.sigma", f"sigma={sigma:g} >= C={C:g} violates Assumption A a) (need sigma < C)")
    return sigma, how


def run_verify(cfg: ProblemConfig) -> VerificationReport:
    """B_p, (Psi, g), Theta, strong and weak supersolution checks, sigma0,
    Caccioppoli (global and local) and Hardy margins over the seeded library."""
    grid = cfg.grid()
    problem, u = _build_problem(cfg, grid)
    pair, p, run = cfg.pair, cfg.p, cfg.run
    rep = _new_report("verify", cfg)
    rep.environment = {
        "grid": grid.describe(),
        "tolerances": {"margin_rtol": run.tol, "strong_rtol": run.strong_tol, "weak_rtol": run.weak_tol,
                       "psi_g_rtol": PSI_G_TOL},
        "test_functions": run.test_functions,
    }
    res = rep.results

    # sigma first: an inadmissible shift is a configuration error
    s0 = compute_sigma0(problem, u, pair.g)
    sigma, how = _choose_sigma(cfg, s0.sigma0)

    bp = check_bp_weight(problem.a, p, cfg.domain, grid)
    rep.add(CheckRecord.flag("assumption.bp_weight", bp.holds, f"method={bp.method} {bp.note}".strip()))
    pos = u.values[u.values > 0]
    if pos.size:
        lo, hi = float(pos.min()), float(pos.max())
        t = np.geomspace(lo, hi, 200) if hi > lo else np.array([lo])
        pg = check_psi_g_condition(pair, t, PSI_G_TOL)
        rep.add(CheckRecord("assumption.psi_g", pg.max_C - pair.C, PSI_G_TOL * max(1.0, abs(pair.C)),
                            pair.C, pg.max_C, f"worst_t={pg.worst_t:.6g}"))
    th = check_theta_behavior(pair, p)
    rep.add(CheckRecord.flag("assumption.theta", th.ok, f"theta={th.theta} psi_over_g={th.psi_over_g}"))
    res["zero_set"] = check_zero_set(u).flag

    sc = strong_check(problem, u, grid, run.strong_tol)
    rep.add(CheckRecord("supersolution.strong", sc.worst_relative, run.strong_tol, None, None,
                        f"worst relative residual at r={sc.worst_r:.6g}"))
    library = tf.library(grid, p, run.seed, run.test_functions, run.support)
    smooth = tf.smooth_family(grid, run.seed, 5, run.support)
    for name, w in smooth:
        m = weak_form_margin(problem, u, w, grid)
        scale = weak_form_scale(problem, u, w, grid)
        rep.add(CheckRecord("supersolution.weak." + name, m, run.weak_tol * scale, 0.0, m))
    res["weak_form_family"] = [name for name, _ in smooth]

    _, fine, certified = certified_sigma0(problem, lambda g: _build_problem(cfg, g)[1], pair.g, grid)
    res["sigma0"] = s0.sigma0
    res["sigma0_refined"] = fine.sigma0
    res["sigma0_certified"] = certified
    res["constant_profile"] = s0.constant_profile
    res["sigma"] = sigma
    res["sigma_choice"] = how
    res["C"] = pair.C
    if s0.sigma0 == math.inf:
        rep.add(CheckRecord.flag("sigma.admissible", False, "admissible set empty at grid resolution"))
        _attach_series(rep, problem, u, grid, None)
        return rep
    rep.add(CheckRecord.sides("sigma.admissible", s0.sigma0, sigma, 1e-9 * max(1.0, abs(s0.sigma0))))

    c = caccioppoli_constant(p, pair.C, sigma)
    res["caccioppoli_constant"] = c
    res["mu2_constant"] = hardy_mu2_constant(p, pair.C, sigma)
    sup_u = float(np.max(u.values))
    R_values = run.local_R or (0.5 * sup_u, 2.5 * sup_u)
    res["local_R"] = list(R_values)
    for name, phi in library:
        try:
            m = caccioppoli_margin(problem, u, pair, sigma, phi, grid, sigma0=s0.sigma0)
            rep.add(_margin_record("caccioppoli." + name, m.lhs, m.rhs, run.tol))
            for R in R_values:
                lm = local_estimate_margin(problem, u, pair, sigma, phi, R, grid, sigma0=s0.sigma0)
                rep.add(_margin_record(f"local[R={R:g}].{name}", lm.lhs, lm.rhs, run.tol,
                                       f"remainder={lm.remainder!r}"))
                if R > 2 * sup_u:
                    rep.add(CheckRecord.flag(f"local[R={R:g}].remainder_zero.{name}", lm.remainder == 0.0))
        except ValueError as exc:
            rep.add(CheckRecord.flag("caccioppoli." + name, False, str(exc)))

    try:
        hd = construct_hardy_measures(problem, u, pair, sigma, grid, waiver=run.waiver, sigma0=s0.sigma0)
    except ValueError as exc:
        rep.add(CheckRecord.flag("hardy.construct", False, str(exc)))
        _attach_series(rep, problem, u, grid, None)
        return rep
    res["hardy"] = hd.describe()
    for name, xi in library:
        m = hardy_margin(hd, xi, p, grid)
        rep.add(_margin_record("hardy." + name, m.lhs, m.rhs, run.tol))
    _attach_series(rep, problem, u, grid, hd)
    return rep


def _attach_series(rep: VerificationReport, problem: PDIProblem, u, grid: QuadratureGrid, hd: HardyData | None):
    rep.add_series("profile", ("r", "u"), grid.nodes, u.values)
    res = strong_residual(problem, u, grid)
    rep.add_series("residual", ("r", "residual"), res.grid, res.values)
    if hd is not None:
        rep.add_series("weights", ("r", "mu1", "mu2"), grid.nodes,
                       hd.mu1_density(grid.nodes), hd.mu2_density(grid.nodes))


# -- Hardy data from a config ---------------------------------------------------
def hardy_from_config(cfg: ProblemConfig, grid: QuadratureGrid) -> tuple[HardyData, float, float | None, dict]:
    """(HardyData, p, claimed constant or None, info)."""
    spec = _block(cfg.raw, "hardy")
    family = _get(spec, "family", "hardy", str)
    n = cfg.domain.n
    try:
        if family == "hardy-poincare":
            p = _get(spec, "p", "hardy")
            hd = hp_hardy_data(_get(spec, "n", "hardy", float, n), p, _get(spec, "gamma", "hardy"),
                               _get(spec, "r_param", "hardy", float, 1.0))
            claimed = hd.provenance["claimed_constant"]
            if hd.provenance["r_param"] != 1:
                hd.provenance["note"] = "extremal not known for r_param != 1; probe family is a guess"
        elif family == "classical":
            p = _get(spec, "p", "hardy")
            hd = classical_hardy_data(_get(spec, "n", "hardy", float, n), p)
            claimed = hd.provenance["claimed_constant"]
        elif family == "two-weight":
            p = _get(spec, "p", "hardy")
            mu1 = build_weight(_block(spec, "mu1", "hardy"), grid, None, cfg.base, "hardy.mu1")
            mu2 = build_weight(_block(spec, "mu2", "hardy"), grid, None, cfg.base, "hardy.mu2")
            u0 = None
            if "solution" in cfg.raw:
                u0 = build_solution(_block(cfg.raw, "solution"), grid, cfg.domain, cfg.base)
            hd = sharp_case_measures(mu2, mu1, p, cfg.domain, u0, grid)
            claimed = 1.0
        else:
            raise ConfigError("hardy.family", f"unknown Hardy family {family!r}")
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("hardy", str(exc)) from None
    if "claimed_constant" in spec:
        claimed = _get(spec, "claimed_constant", "hardy")
    info = {"family": family, "max_gap": _get(spec, "max_gap", "hardy", float, 0.10)}
    return hd, p, claimed, info


def _options(cfg: ProblemConfig) -> MinimizerOptions:
    spec = _block(cfg.raw, "minimize", required=False)
    try:
        return MinimizerOptions(
            max_iterations=_get(spec, "max_iterations", "minimize", int, 500),
            convergence_tol=_get(spec, "convergence_tol", "minimize", float, 1e-10),
            boundary=spec.get("boundary"),
            init=_get(spec, "init", "minimize", str, "talenti-like"),
        )
    except ValueError as exc:
        raise ConfigError("minimize", str(exc)) from None


def _constant_checks(rep: VerificationReport, value: float, claimed: float | None, max_gap: float, tol: float):
    rep.results["achieved"] = value
    rep.results["claimed_constant"] = claimed
    if claimed is None:
        return
    gap = (value - claimed) / claimed
    rep.results["gap"] = gap
    rep.add(CheckRecord.sides("quotient.not_below_claimed", claimed, value, tol * claimed))
    rep.add(CheckRecord.sides("quotient.gap", gap, max_gap, 0.0, f"relative gap {gap:.3e}"))


# -- minimize -------------------------------------------------------------------
def run_minimize(cfg: ProblemConfig) -> VerificationReport:
    grid = cfg.grid()
    hd, p, claimed, info = hardy_from_config(cfg, grid)
    opts = _options(cfg)
    rep = _new_report("minimize", cfg)
    rep.environment = {"grid": grid.describe(), "tolerances": {"quotient_rtol": cfg.run.tol,
                                                                "gradient_rtol": GRADIENT_TOL}}
    rep.results["hardy"] = hd.describe()
    spec = _block(cfg.raw, "minimize", required=False)
    sweep = spec.get("r_max_sweep")
    if sweep:
        rows = r_max_sweep(hd, p, cfg.domain.n, sweep, cfg.run.grid_size, cfg.run.r_first, opts)
        values = [v for _, v in rows]
        rep.results["sweep"] = [{"r_max": R, "value": v} for R, v in rows]
        rep.add_series("sweep", ("r_max", "quotient"), [R for R, _ in rows], values)
        steps = np.diff(values)
        rep.add(CheckRecord("sweep.monotone", -float(np.max(steps)) if steps.size else 0.0,
                            cfg.run.tol * values[0]))
        if claimed is not None:
            rep.add(CheckRecord.sides("sweep.never_below", claimed, float(min(values)), cfg.run.tol * claimed))
        _constant_checks(rep, values[-1], claimed, info["max_gap"], cfg.run.tol)
        return rep

    result = minimize_rayleigh(hd, p, grid, opts=opts)
    rep.results.update({"iterations": result.iterations, "converged": result.converged,
                        "boundary": result.boundary, "gradient_error": result.gradient_error})
    rep.add(CheckRecord.sides("minimizer.gradient_self_test", result.gradient_error, GRADIENT_TOL, 0.0))
    steps = np.diff(result.trace)
    rep.add(CheckRecord("minimizer.trace_monotone", -float(np.max(steps)) if steps.size else 0.0, 0.0))
    _constant_checks(rep, result.value, claimed, info["max_gap"], cfg.run.tol)
    rep.add_series("trace", ("iteration", "quotient"), np.arange(len(result.trace)), result.trace)
    rep.add_series("minimizer", ("r", "xi"), grid.nodes, result.minimizer.values)
    rep.add_series("weights", ("r", "mu1", "mu2"), grid.nodes, hd.mu1_density(grid.nodes), hd.raw_mu2(grid.nodes))
    return rep


# -- probe ----------------------------------------------------------------------
def run_probe(cfg: ProblemConfig) -> VerificationReport:
    grid = cfg.grid()
    hd, p, claimed, info = hardy_from_config(cfg, grid)
    spec = _block(cfg.raw, "probe", required=False)
    s = np.linspace(_get(spec, "s_min", "probe", float, 1.0), _get(spec, "s_max", "probe", float, 6.0),
                    _get(spec, "count", "probe", int, 51))
    family = talenti_like_family(grid, p, _get(spec, "cutoff_start", "probe", float, 0.5),
                                 _get(spec, "scale", "probe", float, 1.0))
    best, best_s = sharpness_probe(hd, family, s, p, grid)
    rep = _new_report("probe", cfg)
    rep.environment = {"grid": grid.describe(), "tolerances": {"quotient_rtol": cfg.run.tol}}
    rep.results.update({"hardy": hd.describe(), "best_param": best_s,
                        "family": "(1 + (r/scale)^(p/(p-1)))^(-s) * smooth cutoff"})
    _constant_checks(rep, best, claimed, info["max_gap"], cfg.run.tol)
    return rep


# -- transform ------------------------------------------------------------------
def run_transform(cfg: ProblemConfig) -> VerificationReport:
    spec = _block(cfg.raw, "transform")
    n = _get(spec, "n", "transform", float, cfg.domain.n)
    p = _get(spec, "p", "transform")
    beta = _get(spec, "beta", "transform", float, 0.0)
    gamma = _get(spec, "gamma", "transform")
    tol = _get(spec, "tol", "transform", float, 1e-4)
    grid = cfg.grid()
    rep = _new_report("transform", cfg)
    rep.environment = {"grid": grid.describe(), "tolerances": {"residual_rtol": tol, "round_trip": 1e-12}}
    try:
        for label, g in (("base", grid), ("refined", grid.refined())):
            w = make_talenti_profile(n, p, beta, gamma, g)
            v, m = radial_change_of_variable(beta, p, w)
            res = transformed_residual(v, n, p, gamma, beta)
            src = transformed_source(v, n, p, gamma, beta)
            rel = float(np.max(np.abs(res.values)) / np.max(np.abs(src)))
            rep.add(CheckRecord.sides(f"transform.residual.{label}", rel, tol, 0.0))
            if label == "base":
                trip = float(np.max(np.abs(m.r_of_t(m.t_of_r(g.nodes)) - g.nodes) / g.nodes))
                rep.add(CheckRecord.sides("transform.round_trip", trip, 1e-12, 0.0))
                rep.add_series("residual", ("t", "residual"), res.grid, res.values)
                rep.add_series("map", ("r", "t"), g.nodes, v.grid)
                rep.results["map"] = m.describe()
    except ValueError as exc:
        raise ConfigError("transform", str(exc)) from None
    return rep


# -- pairs ----------------------------------------------------------------------
EQUALITY_ROWS = ("power", "exp_over_t")


def run_pairs(cfg: ProblemConfig | None = None, seed: int = 0) -> VerificationReport:
    spec = _block(cfg.raw, "pairs", required=False) if cfg is not None else {}
    alpha = float(spec.get("alpha", 1.0))
    a = float(spec.get("a", math.e))
    C_exp = float(spec.get("C_exp", 1.0))
    p = float(spec.get("p", 2.0))
    t = np.geomspace(float(spec.get("t_min", 1e-3)), float(spec.get("t_max", 1e2)), int(spec.get("samples", 400)))
    rep = VerificationReport("pairs", cfg.name if cfg else "", cfg.sha256 if cfg else "", seed)
    rep.environment = {"samples": {"t_min": float(t[0]), "t_max": float(t[-1]), "count": int(t.size)},
                       "tolerances": {"psi_g_rtol": PSI_G_TOL}}
    rows = []
    for pair in table_pairs(alpha, a, C_exp):
        r = check_psi_g_condition(pair, t, PSI_G_TOL)
        tol = PSI_G_TOL * max(1.0, abs(pair.C))
        rep.add(CheckRecord(f"pair.{pair.name}", r.max_C - pair.C, tol, pair.C, r.max_C))
        if pair.name.split("(")[0] in EQUALITY_ROWS:
            rep.add(CheckRecord(f"pair.{pair.name}.equality", tol - abs(r.max_C - pair.C), 0.0, pair.C, r.max_C))
        th = check_theta_behavior(pair, p)
        rows.append({"pair": pair.describe(), "max_C": r.max_C, "worst_t": r.worst_t,
                     "theta": th.theta, "psi_over_g": th.psi_over_g})
    rep.results["table"] = rows
    return rep


VERBS = {
    "verify": run_verify,
    "minimize": run_minimize,
    "probe": run_probe,
    "transform": run_transform,
}

__all__ = ["run_verify", "run_minimize", "run_probe", "run_transform", "run_pairs", "hardy_from_config", "VERBS"]
