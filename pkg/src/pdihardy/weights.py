"""Closed algebra of radial weights: constants, powers r^alpha, the
Talenti family (1 + r^{p/(p-1)})^{(p-1) gamma}, the Hardy-Poincare v1
family, finite products and tabulated fields."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import RadialDomain, RadialProfile

FORMS = ("constant", "power", "talenti", "hp-v1", "product", "tabulated")


@dataclass(frozen=True, eq=False)
class WeightFunction:
    form: str
    params: tuple[float, ...] = ()
    factors: tuple[WeightFunction, ...] = ()
    table: RadialProfile | None = None
    signed: bool = False

    def __post_init__(self):
        if self.form not in FORMS:
            raise ValueError(f"unknown weight form {self.form!r}")
        object.__setattr__(self, "params", tuple(float(x) for x in self.params))
        if self.form == "constant" and self.params[0] < 0 and not self.signed:
            raise ValueError("constant weight must be nonnegative")
        if self.form == "tabulated":
            if self.table is None:
                raise ValueError("tabulated weight needs a table")
            if not self.signed and np.any(self.table.values < 0):
                raise ValueError("tabulated weight has negative samples; pass signed=True")
            if not np.all(np.isfinite(self.table.values)):
                raise ValueError("tabulated weight has non-finite samples")

    # -- constructors --------------------------------------------------------
    @classmethod
    def constant(cls, kappa: float) -> WeightFunction:
        return cls("constant", (kappa,), signed=kappa < 0)

    @classmethod
    def power(cls, alpha: float) -> WeightFunction:
        return cls("power", (alpha,))

    @classmethod
    def talenti(cls, gamma: float, p: float) -> WeightFunction:
        if not p > 1:
            raise ValueError("talenti weight needs p > 1")
        return cls("talenti", (gamma, p))

    @classmethod
    def hp_v1(cls, gamma: float, p: float, r_param: float) -> WeightFunction:
        if not p > 1:
            raise ValueError("hp-v1 weight needs p > 1")
        return cls("hp-v1", (gamma, p, r_param))

    @classmethod
    def product(cls, *weights: WeightFunction) -> WeightFunction:
        flat: list[WeightFunction] = []
        for w in weights:
            flat.extend(w.factors if w.form == "product" else (w,))
        return cls("product", (), tuple(flat), signed=any(w.signed for w in flat))

    @classmethod
    def tabulated(cls, profile: RadialProfile, signed: bool = False) -> WeightFunction:
        return cls("tabulated", (), (), profile, signed)

    @classmethod
    def sample(cls, f, grid, signed: bool = False) -> WeightFunction:
        """Tabulate an arbitrary callable on ``grid`` (nodes or a QuadratureGrid)."""
        grid = np.asarray(getattr(grid, "nodes", grid), dtype=float)
        with np.errstate(over="ignore", divide="ignore", under="ignore"):
            values = np.asarray(f(grid), dtype=float)
        return cls.tabulated(RadialProfile(grid, values), signed=signed)

    # -- evaluation ----------------------------------------------------------
    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        form, prm = self.form, self.params
        if form == "constant":
            return np.full_like(r, prm[0])
        if form == "power":
            with np.errstate(divide="ignore"):
                return np.power(r, prm[0])
        if form == "talenti":
            gamma, p = prm
            return (1.0 + r ** (p / (p - 1))) ** ((p - 1) * gamma)
        if form == "hp-v1":
            gamma, p, rp = prm
            s = r ** (p / (p - 1))
            return (1.0 + rp * s) * (1.0 + s) ** (gamma * (p - 1) - p)
        if form == "product":
            out = np.ones_like(r)
            for w in self.factors:
                out = out * w(r)
            return out
        return self.table(r)

    def __mul__(self, other: WeightFunction) -> WeightFunction:
        return WeightFunction.product(self, other)

    def scaled(self, k: float) -> WeightFunction:
        return WeightFunction.product(WeightFunction.constant(k), self)

    def power_at_zero(self) -> float:
        """Exponent alpha with w(r) ~ const * r^alpha as r -> 0."""
        if self.form == "power":
            return self.params[0]
        if self.form == "product":
            return sum(w.power_at_zero() for w in self.factors)
        return 0.0

    @property
    def is_closed_form(self) -> bool:
        if self.form == "product":
            return all(w.is_closed_form for w in self.factors)
        return self.form != "tabulated"

    def label(self) -> str:
        if self.form == "product":
            return " * ".join(w.label() for w in self.factors)
        if self.form == "tabulated":
            return f"tabulated[{self.table.grid.size}]"
        return f"{self.form}({', '.join(f'{x:g}' for x in self.params)})"

    def describe(self) -> dict:
        if self.form == "product":
            return {"form": "product", "factors": [w.describe() for w in self.factors]}
        if self.form == "tabulated":
            return {"form": "tabulated", "points": int(self.table.grid.size), "signed": self.signed}
        names = {
            "constant": ("value",),
            "power": ("alpha",),
            "talenti": ("gamma", "p"),
            "hp-v1": ("gamma", "p", "r_param"),
        }[self.form]
        return {"form": self.form, **dict(zip(names, self.params))}


def bp_power_criterion(a: WeightFunction, p: float, domain: RadialDomain) -> bool | None:
    """Exact B_p verdict for closed-form weights, None when undecidable analytically.

    Closed-form weights are continuous and positive away from the origin, so
    a^{-1/(p-1)} can only fail to be locally integrable at r = 0, where it
    behaves like r^{-alpha/(p-1)} against the measure r^{n-1} dr.
    """
    if not a.is_closed_form:
        return None
    if not positive_closed_form(a):
        return False
    if not domain.contains_origin:
        return True
    alpha = a.power_at_zero()
    return alpha / (p - 1) < domain.n


def positive_closed_form(a: WeightFunction) -> bool:
    """True for closed-form weights that are strictly positive on (0, inf)."""
    if a.form == "product":
        return all(positive_closed_form(w) for w in a.factors)
    if a.form == "constant":
        return a.params[0] > 0
    if a.form == "hp-v1":
        return a.params[2] >= 0
    return a.form in ("power", "talenti")


__all__ = ["WeightFunction", "bp_power_criterion", "positive_closed_form", "FORMS"]
