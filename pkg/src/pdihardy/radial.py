"""Radial quadrature and discrete differential operators.

Integrals over a radial domain are reduced to
``int f(r) |S^{n-1}| r^{n-1} dr`` and evaluated with composite Simpson
weights in the grid's index variable times the exact Jacobian of the
grading map, so uniform and log-spaced grids both integrate smooth
integrands to fourth order.  The part of a ball below the first node is
handled by a power-law cell (see :func:`integrate_radial`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import RadialDomain, RadialProfile, p_flux, sphere_area
from .weights import WeightFunction

DEFAULT_SIZE = 4000
DEFAULT_R_FIRST = 1e-6


def simpson_index_weights(m: int) -> np.ndarray:
    """Composite Simpson weights for m equispaced nodes with unit spacing.

    An odd number of intervals closes with Simpson's 3/8 rule on the last three.
    """
    if m < 2:
        raise ValueError("need at least two nodes")
    w = np.zeros(m)
    k = m - 1
    if k == 1:
        w[:] = 0.5
        return w
    if k == 2:
        return np.array([1.0, 4.0, 1.0]) / 3.0
    n_simpson = k if k % 2 == 0 else k - 3
    if n_simpson > 0:
        w[: n_simpson + 1 : 2] += 2.0 / 3.0
        w[1 : n_simpson : 2] += 4.0 / 3.0
        w[0] -= 1.0 / 3.0
        w[n_simpson] -= 1.0 / 3.0
    if k % 2 == 1:
        w[n_simpson : n_simpson + 4] += np.array([3.0, 9.0, 9.0, 3.0]) / 8.0
    return w


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Nodes in [r_min, r_max] with positive weights for int f(r) dr.

    ``grading`` is "uniform", "log-spaced" or "hybrid" (log-spaced up to
    ``split``, uniform beyond).  On domains that contain the origin the first
    node is positive; the gap below it is the inner cell.
    """

    nodes: np.ndarray
    weights: np.ndarray
    grading: str
    domain: RadialDomain
    split: float | None = None

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if nodes.size < 3 or np.any(np.diff(nodes) <= 0):
            raise ValueError("quadrature nodes must be strictly increasing, at least 3")
        if np.any(weights <= 0):
            raise ValueError("quadrature weights must be positive")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    # -- constructors --------------------------------------------------------
    @staticmethod
    def _first_node(domain: RadialDomain, r_first: float) -> float:
        if domain.kind == "interval-1d" or not domain.contains_origin:
            return domain.r_min
        if not 0 < r_first < domain.r_max:
            raise ValueError(f"r_first={r_first} must lie in (0, r_max)")
        return r_first

    @classmethod
    def log_spaced(cls, domain: RadialDomain, size: int = DEFAULT_SIZE,
                   r_first: float = DEFAULT_R_FIRST) -> QuadratureGrid:
        lo = cls._first_node(domain, r_first)
        if lo <= 0:
            raise ValueError("log-spaced grading needs a positive first node")
        s = np.linspace(np.log(lo), np.log(domain.r_max), size)
        nodes = np.exp(s)
        nodes[0], nodes[-1] = lo, domain.r_max
        h = s[1] - s[0]
        return cls(nodes, simpson_index_weights(size) * h * nodes, "log-spaced", domain)

    @classmethod
    def uniform(cls, domain: RadialDomain, size: int = DEFAULT_SIZE) -> QuadratureGrid:
        if domain.contains_origin and domain.kind != "interval-1d":
            # r = 0 is never a node; the first cell [0, h] is the inner cell
            h = domain.r_max / size
            nodes = h * np.arange(1, size + 1)
        else:
            nodes = np.linspace(domain.r_min, domain.r_max, size)
            h = nodes[1] - nodes[0]
        return cls(nodes, simpson_index_weights(size) * h, "uniform", domain)

    @classmethod
    def hybrid(cls, domain: RadialDomain, size: int = DEFAULT_SIZE, split: float | None = None,
               r_first: float = DEFAULT_R_FIRST, n_log: int | None = None) -> QuadratureGrid:
        lo = cls._first_node(domain, r_first)
        if lo <= 0:
            raise ValueError("hybrid grading needs a positive first node")
        split = float(np.sqrt(lo * domain.r_max) if split is None else split)
        if not lo < split < domain.r_max:
            raise ValueError(f"split radius {split} must lie inside ({lo}, {domain.r_max})")
        n_log = max(3, size // 2) if n_log is None else n_log
        n_uni = max(3, size - n_log + 1)
        s = np.linspace(np.log(lo), np.log(split), n_log)
        r_log = np.exp(s)
        r_log[0], r_log[-1] = lo, split
        w_log = simpson_index_weights(n_log) * (s[1] - s[0]) * r_log
        r_uni = np.linspace(split, domain.r_max, n_uni)
        w_uni = simpson_index_weights(n_uni) * (r_uni[1] - r_uni[0])
        nodes = np.concatenate([r_log, r_uni[1:]])
        weights = np.concatenate([w_log, w_uni[1:]])
        weights[n_log - 1] += w_uni[0]
        return cls(nodes, weights, "hybrid", domain, split)

    @classmethod
    def default(cls, domain: RadialDomain, size: int = DEFAULT_SIZE,
                r_first: float = DEFAULT_R_FIRST) -> QuadratureGrid:
        """Log-spaced when the radii span decades (or reach the origin), uniform otherwise."""
        if domain.kind == "interval-1d" and domain.r_min == 0:
            return cls.uniform(domain, size)
        if domain.contains_origin or domain.r_max / domain.r_min > 100:
            return cls.log_spaced(domain, size, r_first)
        return cls.uniform(domain, size)

    def refined(self) -> QuadratureGrid:
        """Grid with every interval halved (the old nodes are a subset)."""
        size = 2 * (self.nodes.size - 1) + 1
        if self.grading == "log-spaced":
            return QuadratureGrid.log_spaced(self.domain, size, self.nodes[0])
        if self.grading == "uniform":
            if self.domain.contains_origin and self.domain.kind != "interval-1d":
                return QuadratureGrid.uniform(self.domain, 2 * self.nodes.size)
            return QuadratureGrid.uniform(self.domain, size)
        n_log = int(np.searchsorted(self.nodes, self.split)) + 1
        return QuadratureGrid.hybrid(self.domain, size, self.split, self.nodes[0], 2 * n_log - 1)

    # -- helpers -------------------------------------------------------------
    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def has_inner_cell(self) -> bool:
        return self.nodes[0] > self.domain.r_min

    def measure(self, n: float | None = None) -> np.ndarray:
        return self.domain.measure_factor(self.nodes, n)

    def describe(self) -> dict:
        out = {
            "grading": self.grading,
            "size": int(self.nodes.size),
            "r_first": float(self.nodes[0]),
            "r_last": float(self.nodes[-1]),
            "kind": self.domain.kind,
            "n": self.domain.n,
        }
        if self.split is not None:
            out["split"] = float(self.split)
        return out


def nodal_values(f, nodes: np.ndarray) -> np.ndarray:
    """Sample an integrand given as array, profile, weight or callable."""
    if isinstance(f, np.ndarray) or isinstance(f, (list, tuple)):
        vals = np.asarray(f, dtype=float)
        if vals.shape != nodes.shape:
            raise ValueError(f"integrand has {vals.size} samples for {nodes.size} nodes")
        return vals
    if isinstance(f, RadialProfile):
        if f.grid.size == nodes.size and np.array_equal(f.grid, nodes):
            return np.asarray(f.values, dtype=float)
        return f(nodes)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        return np.asarray(f(nodes), dtype=float) * np.ones_like(nodes)


def integrate_radial(f, grid: QuadratureGrid, n: float | None = None,
                     power_at_zero: float | None = None) -> float:
    """Approximate the integral of f(|x|) over the grid's domain.

    When the grid leaves an inner cell [0, r_0] on a ball, f is continued there
    as f(r_0) (r / r_0)^alpha, alpha being ``power_at_zero`` (taken from the
    weight family when f is a WeightFunction, else 0, i.e. the left-endpoint
    limit), and the cell is integrated exactly.
    """
    vals = nodal_values(f, grid.nodes)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        r_bad = grid.nodes[np.argmax(bad)]
        raise ValueError(f"integrand is not finite at r = {r_bad:.6g}")
    total = float(np.sum(grid.weights * vals * grid.measure(n)))
    if grid.has_inner_cell:
        if power_at_zero is None:
            power_at_zero = f.power_at_zero() if isinstance(f, WeightFunction) else 0.0
        r0 = grid.nodes[0]
        if grid.domain.kind == "interval-1d":
            dim, area = 1.0, 1.0
        else:
            dim = grid.domain.n if n is None else n
            area = sphere_area(dim)
        if dim + power_at_zero <= 0:
            raise ValueError(
                f"integrand ~ r^{power_at_zero:g} is not integrable at the origin in dimension {dim:g}"
            )
        total += float(vals[0] * area * r0**dim / (dim + power_at_zero))
    return total


def lagrange_derivative(x: np.ndarray, y: np.ndarray, width: int = 5) -> np.ndarray:
    """dy/dx at every node from the interpolating polynomial through ``width``
    neighbouring nodes (centred in the interior, shifted at the ends)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    m = x.size
    if m < width:
        return np.gradient(y, x, edge_order=2)
    idx = np.arange(m)
    start = np.clip(idx - width // 2, 0, m - width)
    cols = start[:, None] + np.arange(width)[None, :]
    xs = x[cols]
    dx = xs - x[:, None]  # stencil offsets relative to the target node
    coef = np.zeros_like(xs)
    for k in range(width):
        others = [j for j in range(width) if j != k]
        denom = np.ones(m)
        for j in others:
            denom = denom * (xs[:, k] - xs[:, j])
        # derivative at the target of prod_{j != k} (t - x_j)
        acc = np.zeros(m)
        for j in others:
            term = np.ones(m)
            for l in others:
                if l != j:
                    term = term * (-dx[:, l])
            acc += term
        coef[:, k] = acc / denom
    return np.sum(coef * y[cols], axis=1)


def radial_derivative(w: RadialProfile) -> RadialProfile:
    """w' on the same grid: the closed-form derivative when the profile carries
    one, otherwise second-order finite differences (one-sided at the ends)."""
    if w.has_derivative:
        d = w.derivative_values
    else:
        d = np.gradient(w.values, w.grid, edge_order=2)
    return RadialProfile(w.grid, d, extrapolation="clamp")


def p_laplace_radial(w: RadialProfile, a: WeightFunction, p: float, n: float,
                     grid: QuadratureGrid | None = None) -> RadialProfile:
    """-div(a |w'|^{p-2} w') at the interior nodes of ``w.grid``.

    With a closed-form derivative the flux r^{n-1} a |w'|^{p-2} w' is formed at
    the nodes and differentiated with five-point stencils.  Otherwise the flux
    lives on the staggered midpoints (chord slopes) and its divergence is a
    compact difference, which avoids odd-even decoupling.
    """
    r = w.grid
    if grid is not None and grid.domain.kind == "interval-1d":
        n = 1
    if w.has_derivative:
        flux = r ** (n - 1) * a(r) * p_flux(w.derivative_values, p)
        div = lagrange_derivative(r, flux)[1:-1]
    else:
        mid = 0.5 * (r[1:] + r[:-1])
        slope = np.diff(w.values) / np.diff(r)
        flux = mid ** (n - 1) * a(mid) * p_flux(slope, p)
        div = np.diff(flux) / np.diff(mid)
    ri = r[1:-1]
    return RadialProfile(ri, -div / ri ** (n - 1))
