"""Domain types shared by every module: radial domains, sampled profiles,
scalar functions of the solution value, PDI problem instances and the
small result records the checks hand back."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator

DOMAIN_KINDS = ("ball", "annulus", "full-space-truncated", "interval-1d")


def sphere_area(n: float) -> float:
    """Surface area of the unit sphere S^{n-1} (n may be fractional)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def _frozen_array(x, name: str) -> np.ndarray:
    arr = np.array(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RadialDomain:
    """Radial slice of R^n: a ball, annulus, truncated full space or a 1-D interval."""

    n: int
    r_min: float
    r_max: float
    kind: str = "full-space-truncated"

    def __post_init__(self):
        if self.kind not in DOMAIN_KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}; expected one of {DOMAIN_KINDS}")
        if self.n < 1:
            raise ValueError(f"dimension n must be >= 1, got {self.n}")
        if not (0.0 <= self.r_min < self.r_max) or not math.isfinite(self.r_max):
            raise ValueError(f"need 0 <= r_min < r_max < inf, got ({self.r_min}, {self.r_max})")
        if self.kind == "interval-1d" and self.n != 1:
            raise ValueError("interval-1d domains require n = 1")
        if self.kind in ("ball", "full-space-truncated") and self.r_min != 0.0:
            raise ValueError(f"{self.kind} domains start at r = 0; use kind='annulus' for r_min > 0")
        if self.kind == "annulus" and self.r_min == 0.0:
            raise ValueError("annulus domains need r_min > 0")

    @property
    def contains_origin(self) -> bool:
        return self.kind in ("ball", "full-space-truncated")

    @property
    def inner_is_boundary(self) -> bool:
        """True when r_min is part of the boundary (test functions must vanish there)."""
        return not self.contains_origin

    def measure_factor(self, r, n: float | None = None) -> np.ndarray:
        """Density of dx in the radial variable: |S^{n-1}| r^{n-1}, or 1 on an interval."""
        r = np.asarray(r, dtype=float)
        if self.kind == "interval-1d":
            return np.ones_like(r)
        n = self.n if n is None else n
        return sphere_area(n) * r ** (n - 1)


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """A radial function w(r) sampled on a strictly increasing grid.

    ``derivative_values`` holds w'(r) at the nodes when it is known in closed
    form.  Off-grid evaluation interpolates (cubic Hermite when derivatives are
    present, PCHIP otherwise); outside the grid the profile is held constant
    or, with ``extrapolation="power-tail"``, continued as
    ``values[-1] * (r / grid[-1]) ** tail_exponent`` beyond the outer node.
    """

    grid: np.ndarray
    values: np.ndarray
    derivative_values: np.ndarray | None = None
    extrapolation: str = "clamp"
    tail_exponent: float = 0.0

    def __post_init__(self):
        grid = _frozen_array(self.grid, "grid")
        values = _frozen_array(self.values, "values")
        if grid.size < 3 or grid.size != values.size:
            raise ValueError(
                f"grid and values need equal length >= 3 (got {grid.size} and {values.size})"
            )
        if np.any(np.diff(grid) <= 0):
            raise ValueError("profile grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if self.derivative_values is not None:
            dv = _frozen_array(self.derivative_values, "derivative_values")
            if dv.size != grid.size:
                raise ValueError("derivative_values must match the grid length")
            object.__setattr__(self, "derivative_values", dv)
        if self.extrapolation not in ("clamp", "power-tail"):
            raise ValueError(f"unknown extrapolation {self.extrapolation!r}")

    @classmethod
    def from_function(cls, grid, f: Callable, df: Callable | None = None, **kwargs) -> RadialProfile:
        grid = np.asarray(grid, dtype=float)
        return cls(grid, f(grid), None if df is None else df(grid), **kwargs)

    @property
    def has_derivative(self) -> bool:
        return self.derivative_values is not None

    def __len__(self) -> int:
        return self.grid.size

    def with_values(self, values, derivative_values=None) -> RadialProfile:
        return RadialProfile(
            self.grid, values, derivative_values, self.extrapolation, self.tail_exponent
        )

    def scaled(self, factor: float) -> RadialProfile:
        dv = None if self.derivative_values is None else factor * self.derivative_values
        return self.with_values(factor * self.values, dv)

    @cached_property
    def _interpolant(self):
        if self.derivative_values is not None:
            return CubicHermiteSpline(self.grid, self.values, self.derivative_values, extrapolate=False)
        return PchipInterpolator(self.grid, self.values, extrapolate=False)

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        out = np.asarray(self._interpolant(r), dtype=float)
        # nodes return their samples exactly (PCHIP slopes under/overflow for extreme data)
        idx = np.clip(np.searchsorted(self.grid, r), 0, self.grid.size - 1)
        out = np.where(self.grid[idx] == r, self.values[idx], out)
        lo, hi = self.grid[0], self.grid[-1]
        out = np.where(r < lo, self.values[0], out)
        if self.extrapolation == "power-tail":
            with np.errstate(divide="ignore", invalid="ignore"):
                tail = self.values[-1] * (np.maximum(r, hi) / hi) ** self.tail_exponent
            out = np.where(r > hi, tail, out)
        else:
            out = np.where(r > hi, self.values[-1], out)
        return out


@dataclass(frozen=True, eq=False)
class ScalarFunction:
    """A named function of the solution value t (used for Phi, Psi and g)."""

    fn: Callable[[np.ndarray], np.ndarray]
    name: str = "custom"
    params: dict = field(default_factory=dict)
    derivative: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, t) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(t, dtype=float)), dtype=float)

    def describe(self) -> dict:
        return {"name": self.name, **self.params}

    @classmethod
    def power(cls, q: float) -> ScalarFunction:
        """t -> t^q on [0, inf); 0^0 is taken as 1."""
        q = float(q)
        return cls(
            lambda t: np.power(t, q),
            "power",
            {"q": q},
            lambda t: q * np.power(t, q - 1) if q != 0 else np.zeros_like(t),
        )

    @classmethod
    def identity(cls) -> ScalarFunction:
        return cls(lambda t: np.array(t, dtype=float), "identity", {}, lambda t: np.ones_like(t))

    @classmethod
    def tabulated(cls, t_values, f_values, name: str = "tabulated") -> ScalarFunction:
        t_values = np.asarray(t_values, dtype=float)
        f_values = np.asarray(f_values, dtype=float)
        if np.any(np.diff(t_values) <= 0):
            raise ValueError("tabulated abscissae must be strictly increasing")
        return cls(lambda t: np.interp(t, t_values, f_values), name, {"points": int(t_values.size)})


def p_flux(x: np.ndarray, p: float) -> np.ndarray:
    """|x|^{p-2} x with the degenerate convention 0 at x = 0 for every p > 1."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(ax > 0, np.power(ax, p - 2) * x, 0.0)
    return out


@dataclass(frozen=True, eq=False)
class PDIProblem:
    """The inequality -div(a |u'|^{p-2} u') >= b Phi(u) posed on a radial domain."""

    domain: RadialDomain
    p: float
    a: "WeightFunction"  # noqa: F821
    b: "WeightFunction"  # noqa: F821
    phi: ScalarFunction

    def __post_init__(self):
        from .weights import bp_power_criterion

        if not self.p > 1:
            raise ValueError(f"exponent p must exceed 1, got {self.p}")
        if self.a.signed:
            raise ValueError("weight a must be nonnegative")
        if bp_power_criterion(self.a, self.p, self.domain) is False:
            raise ValueError(
                f"weight a = {self.a.label()} fails the B_p condition at the origin for p={self.p}, "
                f"n={self.domain.n}"
            )


@dataclass(frozen=True)
class SigmaResult:
    """Admissibility threshold for the shift sigma.

    ``sigma0`` is +inf when no shift is admissible at grid resolution and
    -inf (with ``constant_profile`` set) when every shift is admissible,
    which only happens for profiles that are constant on the grid.
    """

    sigma0: float
    admissible_upper: float | None = None
    constant_profile: bool = False
    active_nodes: int = 0
    argmax_r: float | None = None

    @property
    def finite(self) -> bool:
        return math.isfinite(self.sigma0)

    def admits(self, sigma: float) -> bool:
        upper_ok = self.admissible_upper is None or sigma < self.admissible_upper
        return self.sigma0 <= sigma and upper_ok


@dataclass(frozen=True)
class Margin:
    """Both sides of an inequality lhs <= rhs with the tolerance used to judge it."""

    lhs: float
    rhs: float
    tol: float
    constant: float | None = None
    remainder: float | None = None

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.margin >= -self.tol
