"""Problem configuration: a TOML file with nested blocks, resolved into
domain, weights, nonlinearity, pair, solution profile and run settings.

Every failure raises :class:`ConfigError` carrying the dotted field path.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .constants import make_talenti_profile
from .model import RadialDomain, RadialProfile, ScalarFunction
from .pairs import PsiGPair, pair_from_spec
from .radial import QuadratureGrid
from .weights import WeightFunction

GRADINGS = ("log-spaced", "uniform", "hybrid", "default")


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"config error at {path}: {message}")


def _get(block: dict, key: str, path: str, kind=float, default=...):
    if key not in block:
        if default is ...:
            raise ConfigError(f"{path}.{key}", "missing required field")
        return default
    value = block[key]
    try:
        if kind is float:
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        if kind is int:
            if isinstance(value, bool) or int(value) != value:
                raise TypeError
            return int(value)
        if kind is str:
            if not isinstance(value, str):
                raise TypeError
            return value
    except (TypeError, ValueError):
        raise ConfigError(f"{path}.{key}", f"expected {kind.__name__}, got {value!r}") from None
    return value


def _block(raw: dict, key: str, path: str = "", required: bool = True) -> dict:
    full = f"{path}.{key}" if path else key
    if key not in raw:
        if required:
            raise ConfigError(full, "missing block")
        return {}
    if not isinstance(raw[key], dict):
        raise ConfigError(full, "expected a block")
    return raw[key]


def read_csv_columns(path: Path, where: str, min_cols: int = 2) -> np.ndarray:
    """Numeric CSV with a header row; returns an array of shape (rows, cols)."""
    if not path.exists():
        raise ConfigError(where, f"file not found: {path}")
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as exc:
        raise ConfigError(where, f"unreadable CSV {path.name}: {exc}") from None
    if data.shape[1] < min_cols or data.shape[0] < 3:
        raise ConfigError(where, f"{path.name} needs >= {min_cols} columns and >= 3 rows")
    return data


@dataclass(frozen=True)
class RunConfig:
    grid_size: int = 4000
    grading: str = "default"
    r_first: float = 1e-6
    sigma: float | str = "sigma0"
    tol: float = 1e-9
    strong_tol: float = 1e-6
    weak_tol: float = 1e-6
    test_functions: int = 20
    seed: int = 0
    support: tuple[float, float] | None = None
    local_R: tuple[float, ...] = ()
    waiver: bool = False


@dataclass(frozen=True, eq=False)
class ProblemConfig:
    """Parsed configuration.  ``raw`` keeps the TOML mapping; ``base`` is the
    directory relative paths are resolved against."""

    raw: dict
    base: Path
    sha256: str
    domain: RadialDomain
    run: RunConfig
    p: float | None = None
    phi: ScalarFunction | None = None
    pair: PsiGPair | None = None
    name: str = "config"
    extras: dict = field(default_factory=dict)

    # -- resolution that needs the grid -----------------------------------------
    def grid(self) -> QuadratureGrid:
        run = self.run
        try:
            if run.grading == "log-spaced":
                return QuadratureGrid.log_spaced(self.domain, run.grid_size, run.r_first)
            if run.grading == "uniform":
                return QuadratureGrid.uniform(self.domain, run.grid_size)
            if run.grading == "hybrid":
                return QuadratureGrid.hybrid(self.domain, run.grid_size, r_first=run.r_first)
            return QuadratureGrid.default(self.domain, run.grid_size, run.r_first)
        except ValueError as exc:
            raise ConfigError("run", str(exc)) from None

    def solution(self, grid: QuadratureGrid) -> RadialProfile:
        return build_solution(_block(self.raw, "solution"), grid, self.domain, self.base, "solution")

    def weight(self, key: str, grid: QuadratureGrid, u: RadialProfile | None = None) -> WeightFunction:
        weights = _block(self.raw, "weights")
        return build_weight(_block(weights, key, "weights"), grid, u, self.base, f"weights.{key}")


def build_weight(spec: dict, grid: QuadratureGrid | None, u: RadialProfile | None, base: Path,
                 path: str) -> WeightFunction:
    family = _get(spec, "family", path, str)
    coef = _get(spec, "coef", path, float, 1.0)
    try:
        if family == "constant":
            w = WeightFunction.constant(_get(spec, "value", path, float, 1.0))
        elif family == "power":
            w = WeightFunction.power(_get(spec, "alpha", path))
        elif family == "talenti":
            w = WeightFunction.talenti(_get(spec, "gamma", path), _get(spec, "p", path))
        elif family == "hp-v1":
            w = WeightFunction.hp_v1(_get(spec, "gamma", path), _get(spec, "p", path),
                                     _get(spec, "r_param", path))
        elif family == "solution-power":
            if u is None:
                raise ConfigError(path, "solution-power weight needs a solution block")
            k = _get(spec, "power", path)
            w = WeightFunction.tabulated(RadialProfile(u.grid, np.abs(u.values) ** k))
        elif family == "csv":
            data = read_csv_columns(base / _get(spec, "path", path, str), f"{path}.path")
            signed = bool(spec.get("signed", False))
            w = WeightFunction.tabulated(RadialProfile(data[:, 0], data[:, 1]), signed=signed)
        else:
            raise ConfigError(f"{path}.family", f"unknown weight family {family!r}")
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None
    return w if coef == 1.0 else w.scaled(coef)


def build_phi(spec: dict, base: Path, path: str = "nonlinearity") -> ScalarFunction:
    family = _get(spec, "family", path, str)
    if family == "identity":
        return ScalarFunction.identity()
    if family == "power":
        return ScalarFunction.power(_get(spec, "q", path))
    if family == "csv":
        data = read_csv_columns(base / _get(spec, "path", path, str), f"{path}.path")
        return ScalarFunction.tabulated(data[:, 0], data[:, 1])
    raise ConfigError(f"{path}.family", f"unknown nonlinearity family {family!r}")


def build_solution(spec: dict, grid: QuadratureGrid, domain: RadialDomain, base: Path,
                   path: str = "solution") -> RadialProfile:
    kind = _get(spec, "profile", path, str)
    r = grid.nodes
    try:
        if kind == "talenti":
            return make_talenti_profile(_get(spec, "n", path, float, domain.n), _get(spec, "p", path),
                                        _get(spec, "beta", path, float, 0.0), _get(spec, "gamma", path), grid)
        if kind == "eigen-sin":
            k = _get(spec, "k", path, float, 1.0)
            L = domain.r_max - domain.r_min
            w = k * math.pi / L
            return RadialProfile(r, np.sin(w * (r - domain.r_min)), w * np.cos(w * (r - domain.r_min)))
        if kind == "constant":
            value = _get(spec, "value", path)
            return RadialProfile(r, np.full_like(r, value), np.zeros_like(r))
        if kind == "csv":
            data = read_csv_columns(base / _get(spec, "path", path, str), f"{path}.path")
            prof = RadialProfile(data[:, 0], data[:, 1])
            if not np.array_equal(prof.grid, r):
                prof = RadialProfile(r, prof(r))
            return prof
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None
    raise ConfigError(f"{path}.profile", f"unknown profile {kind!r}")


def parse_domain(raw: dict) -> RadialDomain:
    d = _block(raw, "domain")
    try:
        return RadialDomain(
            _get(d, "n", "domain", int),
            _get(d, "r_min", "domain", float, 0.0),
            _get(d, "r_max", "domain"),
            _get(d, "kind", "domain", str, "full-space-truncated"),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("domain", str(exc)) from None


def parse_run(raw: dict, overrides: dict | None = None) -> RunConfig:
    run = dict(_block(raw, "run", required=False))
    for key, value in (overrides or {}).items():
        if value is not None:
            run[key] = value
    sigma = run.get("sigma", "sigma0")
    if isinstance(sigma, str):
        if sigma != "sigma0":
            raise ConfigError("run.sigma", "expected a number or \"sigma0\"")
    else:
        sigma = _get(run, "sigma", "run")
    grading = _get(run, "grading", "run", str, "default")
    if grading not in GRADINGS:
        raise ConfigError("run.grading", f"expected one of {GRADINGS}")
    support = run.get("support")
    if support is not None:
        if not (isinstance(support, list) and len(support) == 2):
            raise ConfigError("run.support", "expected [lo, hi]")
        support = (float(support[0]), float(support[1]))
    local_R = tuple(float(x) for x in run.get("local_R", []))
    out = RunConfig(
        grid_size=_get(run, "grid_size", "run", int, 4000),
        grading=grading,
        r_first=_get(run, "r_first", "run", float, 1e-6),
        sigma=sigma,
        tol=_get(run, "tol", "run", float, 1e-9),
        strong_tol=_get(run, "strong_tol", "run", float, 1e-6),
        weak_tol=_get(run, "weak_tol", "run", float, 1e-6),
        test_functions=_get(run, "test_functions", "run", int, 20),
        seed=_get(run, "seed", "run", int, 0),
        support=support,
        local_R=local_R,
        waiver=bool(run.get("waiver", False)),
    )
    if out.grid_size < 16:
        raise ConfigError("run.grid_size", "need at least 16 nodes")
    if not out.tol > 0:
        raise ConfigError("run.tol", "must be positive")
    return out


def load_config(path: str | Path, overrides: dict | None = None) -> ProblemConfig:
    """Read and validate a TOML problem file (CLI overrides replace run.* keys)."""
    path = Path(path)
    if not path.exists():
        raise ConfigError("<file>", f"config file not found: {path}")
    data = path.read_bytes()
    try:
        raw = tomllib.loads(data.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError("<file>", f"not valid TOML: {exc}") from None
    return parse_config(raw, path.parent, hashlib.sha256(data).hexdigest(), path.stem, overrides)


def parse_config(raw: dict, base: Path, sha256: str = "", name: str = "config",
                 overrides: dict | None = None) -> ProblemConfig:
    domain = parse_domain(raw)
    run = parse_run(raw, overrides)
    p = phi = pair = None
    weights = _block(raw, "weights", required=False)
    if weights:
        p = _get(weights, "p", "weights")
        if not p > 1:
            raise ConfigError("weights.p", f"need p > 1, got {p}")
    if "nonlinearity" in raw:
        phi = build_phi(_block(raw, "nonlinearity"), base)
    if "pair" in raw:
        try:
            pair = pair_from_spec(_block(raw, "pair"))
        except ValueError as exc:
            raise ConfigError("pair", str(exc)) from None
    if "solution" in raw:
        _get(_block(raw, "solution"), "profile", "solution", str)
    return ProblemConfig(raw, base, sha256, domain, run, p, phi, pair, name)


__all__ = [
    "ConfigError",
    "ProblemConfig",
    "RunConfig",
    "load_config",
    "parse_config",
    "build_weight",
    "build_phi",
    "build_solution",
    "read_csv_columns",
]
