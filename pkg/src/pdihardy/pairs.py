"""Auxiliary pairs (Psi, g) with g Psi' <= -C Psi, and the named families
that satisfy the condition."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ScalarFunction

PSI_MONOTONICITY = ("nonincreasing", "increasing")
THETA_BEHAVIOR = ("nonincreasing-near-0", "bounded-near-0")


@dataclass(frozen=True, eq=False)
class PsiGPair:
    psi: ScalarFunction
    g: ScalarFunction
    C: float
    psi_monotonicity: str = "nonincreasing"
    theta_behavior: str = "bounded-near-0"
    name: str = "custom"

    def __post_init__(self):
        if self.psi_monotonicity not in PSI_MONOTONICITY:
            raise ValueError(f"psi_monotonicity must be one of {PSI_MONOTONICITY}")
        if self.theta_behavior not in THETA_BEHAVIOR:
            raise ValueError(f"theta_behavior must be one of {THETA_BEHAVIOR}")
        if not math.isfinite(self.C):
            raise ValueError("compatibility constant C must be finite")

    def dpsi(self, t) -> np.ndarray:
        """Psi'(t): closed form when known, else fourth-order central differences
        with step 1e-5 t."""
        t = np.asarray(t, dtype=float)
        if self.psi.derivative is not None:
            return np.asarray(self.psi.derivative(t), dtype=float)
        h = 1e-5 * t
        f = self.psi
        return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h)

    def theta(self, t, p: float) -> np.ndarray:
        return self.psi(t) * self.g(t) ** (p - 1)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "psi": self.psi.describe(),
            "g": self.g.describe(),
            "C": self.C,
        }


def power_pair(alpha: float) -> PsiGPair:
    """Psi = t^{-alpha}, g = t, C = alpha."""
    alpha = float(alpha)
    psi = ScalarFunction(
        lambda t: t ** (-alpha), "t^-alpha", {"alpha": alpha}, lambda t: -alpha * t ** (-alpha - 1)
    )
    g = ScalarFunction(lambda t: np.array(t, dtype=float), "t", {}, lambda t: np.ones_like(t))
    mono = "nonincreasing" if alpha >= 0 else "increasing"
    return PsiGPair(psi, g, alpha, mono, "bounded-near-0", f"power(alpha={alpha:g})")


def log_pair(a: float) -> PsiGPair:
    """Psi = (t log(a + t))^{-1}, g = t log(a + t), C = log a, for a > 1."""
    a = float(a)
    if not a > 1:
        raise ValueError(f"log pair needs a > 1, got a={a}")

    def psi(t):
        return 1.0 / (t * np.log(a + t))

    def dpsi(t):
        L = np.log(a + t)
        return -(L + t / (a + t)) / (t * L) ** 2

    return PsiGPair(
        ScalarFunction(psi, "(t log(a+t))^-1", {"a": a}, dpsi),
        ScalarFunction(lambda t: t * np.log(a + t), "t log(a+t)", {"a": a}),
        math.log(a),
        "nonincreasing",
        "bounded-near-0",
        f"log(a={a:g})",
    )


def exp_pair(C: float, g: ScalarFunction | None = None) -> PsiGPair:
    """Psi = e^{-t} with a bounded g satisfying g >= C and g' >= -C.

    The default g(t) = C (2 + t)/(1 + t) decreases from 2C to C.
    """
    C = float(C)
    if not C > 0:
        raise ValueError(f"exp pair needs C > 0, got C={C}")
    if g is None:
        g = ScalarFunction(lambda t: C * (2 + t) / (1 + t), "C(2+t)/(1+t)", {"C": C})
    psi = ScalarFunction(lambda t: np.exp(-t), "e^-t", {}, lambda t: -np.exp(-t))
    return PsiGPair(psi, g, C, "nonincreasing", "nonincreasing-near-0", f"exp(C={C:g})")


def exp_over_t_pair() -> PsiGPair:
    """Psi = e^{-t}/t, g = t/(1 + t), C = 1 (equality case)."""
    psi = ScalarFunction(
        lambda t: np.exp(-t) / t, "e^-t/t", {}, lambda t: -np.exp(-t) * (t + 1) / t**2
    )
    g = ScalarFunction(lambda t: t / (1 + t), "t/(1+t)", {})
    return PsiGPair(psi, g, 1.0, "nonincreasing", "bounded-near-0", "exp_over_t")


def table_pairs(alpha: float = 1.0, a: float = math.e, C_exp: float = 1.0) -> list[PsiGPair]:
    """The four reference couples, in table order."""
    return [power_pair(alpha), log_pair(a), exp_pair(C_exp), exp_over_t_pair()]


def pair_from_spec(spec: dict) -> PsiGPair:
    """Build a pair from a config mapping {family, ...}; an explicit C overrides the family's."""
    family = spec.get("family")
    if family == "power":
        pair = power_pair(spec.get("alpha", spec.get("C", 1.0)))
    elif family == "log":
        pair = log_pair(spec.get("a", math.e))
    elif family == "exp":
        pair = exp_pair(spec.get("C", 1.0))
    elif family == "exp_over_t":
        pair = exp_over_t_pair()
    else:
        raise ValueError(f"unknown pair family {family!r}")
    if "C" in spec and float(spec["C"]) != pair.C:
        pair = PsiGPair(pair.psi, pair.g, float(spec["C"]), pair.psi_monotonicity,
                        pair.theta_behavior, pair.name)
    return pair
