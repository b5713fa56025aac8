"""Uniform grids on boxes (1-D / 2-D), quadrature, and ball families.

Every supremum-over-balls quantity in the toolkit is approximated over a
finite, deterministic ball family enumerated here.  Balls are clipped to the
box: averages use B intersect box with its own measure, which makes the
average of a constant exactly that constant and keeps all class constants at
their unit anchors for w == 1.

Conventions
-----------
* 1-D balls are closed intervals; the nodes inside form a contiguous range
  and quadrature over the ball is the composite trapezoid rule on the node
  hull.  A ball holding a single node averages to the node value (measure 0).
* 2-D balls are Euclidean disks rasterized by node membership; quadrature
  uses the global tensor-trapezoid cell weights restricted to inside nodes.
* Any finite family under-estimates a true supremum over all balls, so the
  constants built on top of these families are reported as lower bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Literal, Sequence

import numpy as np

__all__ = [
    "Grid",
    "GridFunction",
    "Ball",
    "BallFamily",
    "integrate",
    "average_on_ball",
    "enumerate_balls",
    "segment_integrals",
]


@dataclass(frozen=True)
class Grid:
    """Uniform tensor grid over a box; resolution = points per axis."""

    dimension: int
    box: tuple
    resolution: int

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        if self.resolution < 8:
            raise ValueError("resolution must be >= 8")
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        if len(box) != self.dimension:
            raise ValueError("box must have one (lo, hi) pair per axis")
        for lo, hi in box:
            if not lo < hi:
                raise ValueError("box bounds must satisfy lo < hi")
        object.__setattr__(self, "box", box)

    @property
    def shape(self) -> tuple:
        return (self.resolution,) * self.dimension

    @property
    def node_count(self) -> int:
        return self.resolution ** self.dimension

    @property
    def spacings(self) -> tuple:
        return tuple((hi - lo) / (self.resolution - 1) for lo, hi in self.box)

    @property
    def spacing(self) -> float:
        return min(self.spacings)

    @property
    def diameter(self) -> float:
        return float(np.sqrt(sum((hi - lo) ** 2 for lo, hi in self.box)))

    @property
    def volume(self) -> float:
        v = 1.0
        for lo, hi in self.box:
            v *= hi - lo
        return v

    def axis(self, i: int) -> np.ndarray:
        lo, hi = self.box[i]
        return np.linspace(lo, hi, self.resolution)

    def points(self) -> np.ndarray:
        """All nodes as an (node_count, dimension) array, C-order."""
        if self.dimension == 1:
            return self.axis(0)[:, None]
        xx, yy = np.meshgrid(self.axis(0), self.axis(1), indexing="ij")
        return np.column_stack([xx.ravel(), yy.ravel()])

    def axis_weights(self, i: int) -> np.ndarray:
        h = self.spacings[i]
        w = np.full(self.resolution, h)
        w[0] = w[-1] = h / 2
        return w

    def quadrature_weights(self) -> np.ndarray:
        """Trapezoid weights shaped like the grid (tensor product in 2-D)."""
        if self.dimension == 1:
            return self.axis_weights(0)
        return np.outer(self.axis_weights(0), self.axis_weights(1))

    def refine(self) -> "Grid":
        """Halve the spacing while keeping all existing nodes."""
        return Grid(self.dimension, self.box, 2 * self.resolution - 1)


@dataclass(frozen=True)
class GridFunction:
    """Sampled function on a grid; values shaped like grid.shape."""

    grid: Grid
    values: np.ndarray
    sign_mode: Literal["nonnegative", "signed"] = "nonnegative"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.shape:
            vals = vals.reshape(self.grid.shape)
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid function values must be finite")
        if self.sign_mode == "nonnegative" and np.any(vals < 0):
            raise ValueError("negative values in nonnegative mode")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, grid: Grid, fn, sign_mode="nonnegative") -> "GridFunction":
        pts = grid.points()
        if grid.dimension == 1:
            vals = np.asarray(fn(pts[:, 0]), dtype=float)
        else:
            vals = np.asarray(fn(pts[:, 0], pts[:, 1]), dtype=float)
        return cls(grid, np.broadcast_to(vals, (grid.node_count,)).reshape(grid.shape), sign_mode)

    @classmethod
    def constant(cls, grid: Grid, c: float) -> "GridFunction":
        mode = "nonnegative" if c >= 0 else "signed"
        return cls(grid, np.full(grid.shape, float(c)), mode)

    @classmethod
    def indicator(cls, grid: Grid, lo: float, hi: float) -> "GridFunction":
        """1-D indicator of [lo, hi] sampled at nodes (closed endpoints)."""
        if grid.dimension != 1:
            raise ValueError("indicator helper is 1-D")
        x = grid.axis(0)
        return cls(grid, ((x >= lo) & (x <= hi)).astype(float))

    def abs(self) -> "GridFunction":
        return GridFunction(self.grid, np.abs(self.values), "nonnegative")

    def scaled(self, c: float) -> "GridFunction":
        mode = self.sign_mode if c >= 0 else "signed"
        return GridFunction(self.grid, c * self.values, mode)

    def __mul__(self, other: "GridFunction") -> "GridFunction":
        if other.grid is not self.grid and other.grid != self.grid:
            raise ValueError("grid mismatch")
        mode = "nonnegative" if (self.sign_mode == other.sign_mode == "nonnegative") else "signed"
        return GridFunction(self.grid, self.values * other.values, mode)

    def to_csv(self, path) -> None:
        pts = self.grid.points()
        cols = [pts[:, i] for i in range(self.grid.dimension)]
        cols.append(self.values.ravel())
        header = ",".join([f"x{i}" for i in range(self.grid.dimension)] + ["value"])
        np.savetxt(path, np.column_stack(cols), delimiter=",", header=header, comments="")


@dataclass(frozen=True)
class Ball:
    """Ball in real units: closed interval in 1-D, Euclidean disk in 2-D."""

    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))


@dataclass
class BallQuadrature:
    """Discretized ball: inside nodes (flat indices), weights, clipped measure."""

    indices: np.ndarray
    weights: np.ndarray
    measure: float
    # 1-D only: contiguous node range [a, b] on the axis
    node_range: tuple | None = None


class BallFamily:
    """A deterministic finite family of balls tied to a grid.

    ``policy`` is one of all-pairs | dyadic-radii | centered-only | custom.
    Per-ball quadrature data is computed lazily and cached; loops over the
    family are order-independent (suprema may be merged in any order).
    """

    def __init__(self, grid: Grid, balls: Sequence[Ball], policy: str = "custom"):
        self.grid = grid
        self.balls: List[Ball] = list(balls)
        self.policy = policy
        self._quads: List[BallQuadrature] | None = None

    def __len__(self) -> int:
        return len(self.balls)

    def __iter__(self):
        return iter(self.balls)

    def quadratures(self) -> List[BallQuadrature]:
        if self._quads is None:
            self._quads = [ball_quadrature(self.grid, b) for b in self.balls]
        return self._quads

    def extended(self, extra: Iterable[Ball]) -> "BallFamily":
        return BallFamily(self.grid, self.balls + list(extra), policy="custom")

    def describe(self) -> str:
        return f"{self.policy}[{len(self.balls)} balls @ res {self.grid.resolution}]"


def ball_quadrature(grid: Grid, ball: Ball) -> BallQuadrature:
    """Inside nodes, quadrature weights, and clipped measure for one ball."""
    if grid.dimension == 1:
        x = grid.axis(0)
        lo = max(ball.center[0] - ball.radius, grid.box[0][0])
        hi = min(ball.center[0] + ball.radius, grid.box[0][1])
        # closed containment with a relative guard against roundoff
        eps = 1e-12 * max(1.0, abs(lo), abs(hi))
        inside = np.nonzero((x >= lo - eps) & (x <= hi + eps))[0]
        if inside.size == 0:
            raise ValueError("ball below resolution")
        a, b = int(inside[0]), int(inside[-1])
        if a == b:
            return BallQuadrature(np.array([a]), np.array([1.0]), 0.0, (a, a))
        h = grid.spacings[0]
        w = np.full(b - a + 1, h)
        w[0] = w[-1] = h / 2
        return BallQuadrature(np.arange(a, b + 1), w, float(x[b] - x[a]), (a, b))

    pts = grid.points()
    d2 = ((pts - np.asarray(ball.center)) ** 2).sum(axis=1)
    r2 = ball.radius ** 2 * (1 + 1e-12)
    idx = np.nonzero(d2 <= r2)[0]
    if idx.size == 0:
        raise ValueError("ball below resolution")
    cellw = grid.quadrature_weights().ravel()[idx]
    return BallQuadrature(idx, cellw, float(cellw.sum()), None)


# ---------------------------------------------------------------------------
# quadrature over the whole box
# ---------------------------------------------------------------------------

def integrate(f: GridFunction) -> float:
    """Composite (tensor-)trapezoid integral over the box."""
    return float(np.sum(f.grid.quadrature_weights() * f.values))


def segment_integrals(f: GridFunction) -> np.ndarray:
    """1-D cumulative trapezoid: T[i] = integral from x_0 to x_i.

    Integral over a node-endpoint interval [x_a, x_b] is T[b] - T[a]; this is
    the fast path behind all-pairs interval sweeps.
    """
    if f.grid.dimension != 1:
        raise ValueError("segment integrals are 1-D")
    v = f.values
    h = f.grid.spacings[0]
    T = np.empty(v.size)
    T[0] = 0.0
    np.cumsum(h * (v[:-1] + v[1:]) / 2.0, out=T[1:])
    return T


def average_on_ball(f: GridFunction, ball: Ball) -> float:
    """Quadrature average of f over the clipped ball."""
    q = ball_quadrature(f.grid, ball)
    flat = f.values.ravel()
    if q.indices.size == 1:
        return float(flat[q.indices[0]])
    return float(np.dot(q.weights, flat[q.indices]) / q.weights.sum())


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------

def enumerate_balls(grid: Grid, policy: str) -> BallFamily:
    """Deterministic ball family for the given policy.

    all-pairs (1-D oracle policy): every interval with node endpoints,
    C(N, 2) balls.  dyadic-radii (fast policy): radii h*2^k around every
    node until the box diameter.  centered-only: dyadic radii, but each ball
    counts only at its own center in maximal-type sweeps.
    """
    if policy == "all-pairs":
        if grid.dimension != 1:
            raise ValueError("all-pairs families are 1-D only")
        x = grid.axis(0)
        balls = [
            Ball(((x[a] + x[b]) / 2,), (x[b] - x[a]) / 2)
            for a in range(grid.resolution)
            for b in range(a + 1, grid.resolution)
        ]
        return BallFamily(grid, balls, policy)

    if policy in ("dyadic-radii", "centered-only"):
        h = grid.spacing
        diam = grid.diameter
        kmax = int(np.ceil(np.log2(diam / h)))
        radii = [h * 2 ** k for k in range(kmax)]
        pts = grid.points()
        balls = [Ball(tuple(c), r) for c in pts for r in radii]
        return BallFamily(grid, balls, policy)

    raise ValueError(f"unknown ball policy: {policy!r}")
