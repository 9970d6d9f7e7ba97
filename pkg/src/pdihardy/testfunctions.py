"""Compactly supported radial test functions with closed-form derivatives:
tents, smooth bumps, p-th powers and seeded random knot tents."""

from __future__ import annotations

import numpy as np

from .model import RadialProfile
from .radial import QuadratureGrid


def _nodes(grid) -> np.ndarray:
    return grid.nodes if isinstance(grid, QuadratureGrid) else np.asarray(grid, dtype=float)


def piecewise_linear(grid, knots, heights) -> RadialProfile:
    """Linear interpolation through (knots, heights), zero outside the knots.

    The derivative is the slope on each open piece and 0 at the knots
    themselves (an a.e. derivative of a Lipschitz function).
    """
    r = _nodes(grid)
    knots = np.asarray(knots, dtype=float)
    heights = np.asarray(heights, dtype=float)
    if knots.size < 2 or np.any(np.diff(knots) <= 0):
        raise ValueError("knots must be strictly increasing")
    vals = np.interp(r, knots, heights, left=0.0, right=0.0)
    slopes = np.diff(heights) / np.diff(knots)
    piece = np.searchsorted(knots, r, side="right") - 1
    inside = (piece >= 0) & (piece < slopes.size) & ~np.isin(r, knots)
    d = np.zeros_like(r)
    d[inside] = slopes[piece[inside]]
    return RadialProfile(r, vals, d)


def tent(grid, r0: float, r1: float, peak: float | None = None, height: float = 1.0) -> RadialProfile:
    """Hat function on [r0, r1] with its apex at ``peak`` (midpoint by default)."""
    if not 0 <= r0 < r1:
        raise ValueError(f"tent needs 0 <= r0 < r1, got ({r0}, {r1})")
    peak = 0.5 * (r0 + r1) if peak is None else peak
    return piecewise_linear(grid, [r0, peak, r1], [0.0, height, 0.0])


def bump(grid, r0: float, r1: float, log_scale: bool = False) -> RadialProfile:
    """exp(1 - 1/(1 - s^2)) on (r0, r1), peak 1, with s linear in r or in log r."""
    if not 0 <= r0 < r1 or (log_scale and r0 <= 0):
        raise ValueError(f"bad bump support ({r0}, {r1})")
    r = _nodes(grid)
    if log_scale:
        c, h = 0.5 * (np.log(r0) + np.log(r1)), 0.5 * (np.log(r1) - np.log(r0))
        with np.errstate(divide="ignore"):
            s = (np.log(r) - c) / h
        ds = 1.0 / (h * r)
    else:
        c, h = 0.5 * (r0 + r1), 0.5 * (r1 - r0)
        s = (r - c) / h
        ds = np.full_like(r, 1.0 / h)
    inside = np.abs(s) < 1
    vals = np.zeros_like(r)
    d = np.zeros_like(r)
    q = 1.0 - s[inside] ** 2
    vals[inside] = np.exp(1.0 - 1.0 / q)
    d[inside] = vals[inside] * (-2.0 * s[inside] / q**2) * ds[inside]
    return RadialProfile(r, vals, d)


def power(xi: RadialProfile, p: float) -> RadialProfile:
    """|xi|^p with derivative p |xi|^{p-1} sign(xi) xi'."""
    v = np.abs(xi.values)
    vals = v**p
    if xi.has_derivative:
        d = p * v ** (p - 1) * np.sign(xi.values) * xi.derivative_values
    else:
        d = None
    return RadialProfile(xi.grid, vals, d)


def random_tent(grid, rng: np.random.Generator, support: tuple[float, float], knots: int = 4) -> RadialProfile:
    """Piecewise-linear function with random interior knots and heights in (0.1, 1)."""
    lo, hi = support
    inner = np.sort(rng.uniform(lo, hi, size=knots))
    inner = np.unique(inner)
    xs = np.concatenate([[lo], inner, [hi]])
    hs = np.concatenate([[0.0], rng.uniform(0.1, 1.0, size=inner.size), [0.0]])
    return piecewise_linear(grid, xs, hs)


def library(grid, p: float, seed: int = 0, count: int = 20,
            support: tuple[float, float] | None = None) -> list[tuple[str, RadialProfile]]:
    """Seeded mix of bumps, log-bumps, tents, p-th powers and random knot tents.

    Supports are drawn inside ``support`` (by default the middle decades of
    the grid).  Returns (label, profile) pairs.
    """
    r = _nodes(grid)
    if support is None:
        lo, hi = r[0], r[-1]
        if lo <= 0:
            lo = r[1]
        support = (lo * (hi / lo) ** 0.1, lo * (hi / lo) ** 0.9)
    lo, hi = support
    if not 0 < lo < hi:
        raise ValueError("support must satisfy 0 < lo < hi")
    rng = np.random.default_rng(seed)
    log_lo, log_hi = np.log(lo), np.log(hi)
    out = []
    kinds = ["bump", "log-bump", "bump^p", "tent^p", "random-tent^p", "tent"]
    for k in range(count):
        kind = kinds[k % len(kinds)]
        a, b = np.sort(rng.uniform(log_lo, log_hi, size=2))
        if b - a < 0.3:
            b = min(log_hi, a + 0.3)
            a = b - 0.3
        r0, r1 = float(np.exp(a)), float(np.exp(b))
        if kind == "bump":
            f = bump(r, r0, r1)
        elif kind == "log-bump":
            f = bump(r, r0, r1, log_scale=True)
        elif kind == "bump^p":
            f = power(bump(r, r0, r1, log_scale=True), p)
        elif kind == "tent^p":
            f = power(tent(r, r0, r1, float(np.sqrt(r0 * r1))), p)
        elif kind == "random-tent^p":
            f = power(random_tent(r, rng, (r0, r1)), p)
        else:
            f = tent(r, r0, r1, float(np.sqrt(r0 * r1)))
        out.append((f"{kind}[{r0:.3g},{r1:.3g}]", f))
    return out


def smooth_family(grid, seed: int = 0, count: int = 5, support: tuple[float, float] | None = None,
                  min_decades: float = 1.0) -> list[tuple[str, RadialProfile]]:
    """Seeded log-bumps spanning at least ``min_decades`` decades each, so that
    weak-form integrals are resolved by a log-spaced grid."""
    r = _nodes(grid)
    lo, hi = support if support is not None else (r[1] if r[0] <= 0 else r[0], r[-1])
    span = np.log10(hi / lo)
    if span <= min_decades:
        raise ValueError("support too narrow for the requested bump width")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        width = rng.uniform(min_decades, min(span, 2 * min_decades))
        start = rng.uniform(0.0, span - width)
        r0 = float(lo * 10**start)
        r1 = float(r0 * 10**width)
        out.append((f"log-bump[{r0:.3g},{r1:.3g}]", bump(r, r0, r1, log_scale=True)))
    return out


__all__ = ["piecewise_linear", "tent", "bump", "power", "random_tent", "library", "smooth_family"]
