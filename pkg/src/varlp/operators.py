"""Discrete realizations of the maximal-type and singular operators.

All maximal variants are uncentered: the value at a node is the supremum over
family balls *containing* that node (a centered-only family policy exists for
speed and restricts each ball to its own center).  Outputs are nodewise
independent; families may be swept in any order.

The Hilbert transform and the Riesz potential are quadrature evaluations used
as inequality test subjects, not spectral-accuracy transforms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .exponent import ExponentFunction
from .grids import Ball, BallFamily, Grid, GridFunction, segment_integrals
from .norms import NormSettings, DEFAULT_SETTINGS, weighted_norm

__all__ = [
    "OperatorHandle",
    "apply_maximal",
    "apply_fractional_maximal",
    "apply_riesz_potential",
    "apply_sharp_maximal",
    "apply_hilbert",
    "estimate_operator_norm",
]

_ALLPAIRS_FAST_LIMIT = 4000


def _center_flat_index(grid: Grid, ball: Ball) -> int:
    idx = []
    for ax in range(grid.dimension):
        lo, _ = grid.box[ax]
        h = grid.spacings[ax]
        k = int(round((ball.center[ax] - lo) / h))
        if not 0 <= k < grid.resolution:
            raise ValueError("centered-only ball center is not a grid node")
        idx.append(k)
    if grid.dimension == 1:
        return idx[0]
    return idx[0] * grid.resolution + idx[1]


def _maximal_allpairs_1d(vals: np.ndarray, grid: Grid) -> np.ndarray:
    """O(N^2) sweep over every node-endpoint interval via running maxima."""
    x = grid.axis(0)
    f = GridFunction(grid, vals)
    T = segment_integrals(f)
    with np.errstate(divide="ignore", invalid="ignore"):
        avg = (T[None, :] - T[:, None]) / (x[None, :] - x[:, None])
    avg[np.tril_indices_from(avg)] = -np.inf
    # suffix max over right endpoints, then prefix max over left endpoints
    suf = np.maximum.accumulate(avg[:, ::-1], axis=1)[:, ::-1]
    pre = np.maximum.accumulate(suf, axis=0)
    return pre.diagonal().copy()


def _sweep_maximal(f: GridFunction, balls: BallFamily, per_ball) -> np.ndarray:
    """Generic family sweep: per_ball(quad, flat_values) -> ball value."""
    flat = f.values.ravel()
    out = np.full(flat.size, -np.inf)
    centered = balls.policy == "centered-only"
    for ball, quad in zip(balls.balls, balls.quadratures()):
        val = per_ball(quad, flat)
        if centered:
            target = _center_flat_index(balls.grid, ball)
            out[target] = max(out[target], val)
        elif quad.node_range is not None:
            a, b = quad.node_range
            view = out[a:b + 1]
            np.maximum(view, val, out=view)
        else:
            idx = quad.indices
            out[idx] = np.maximum(out[idx], val)
    if np.any(np.isneginf(out)):
        raise ValueError("ball family does not cover grid")
    return out


def _ball_average(quad, flat: np.ndarray) -> float:
    if quad.indices.size == 1:
        return float(flat[quad.indices[0]])
    return float(np.dot(quad.weights, flat[quad.indices]) / quad.weights.sum())


def apply_maximal(f: GridFunction, balls: BallFamily) -> GridFunction:
    """Hardy-Littlewood maximal function over the family (uncentered)."""
    vals = np.abs(f.values)
    grid = f.grid
    if (balls.policy == "all-pairs" and grid.dimension == 1
            and grid.resolution <= _ALLPAIRS_FAST_LIMIT):
        out = _maximal_allpairs_1d(vals.ravel(), grid)
    else:
        out = _sweep_maximal(GridFunction(grid, vals), balls, _ball_average)
    return GridFunction(grid, out.reshape(grid.shape), "nonnegative")


def apply_fractional_maximal(f: GridFunction, alpha: float,
                             balls: BallFamily) -> GridFunction:
    """sup over balls of |B n box|^(alpha/n) times the average of |f|."""
    n = f.grid.dimension
    if not 0 < alpha < n:
        raise ValueError("fractional order must satisfy 0 < alpha < dimension")
    expo = alpha / n

    def per_ball(quad, flat):
        return quad.measure ** expo * _ball_average(quad, flat)

    out = _sweep_maximal(f.abs(), balls, per_ball)
    return GridFunction(f.grid, out.reshape(f.grid.shape), "nonnegative")


def apply_sharp_maximal(f: GridFunction, balls: BallFamily) -> GridFunction:
    """sup over balls of the mean oscillation around the ball average."""
    flat = f.values.ravel()

    def per_ball(quad, _flat_abs):
        sub = flat[quad.indices]
        if quad.indices.size == 1:
            return 0.0
        wsum = quad.weights.sum()
        mean = np.dot(quad.weights, sub) / wsum
        return float(np.dot(quad.weights, np.abs(sub - mean)) / wsum)

    out = _sweep_maximal(f, balls, per_ball)
    return GridFunction(f.grid, out.reshape(f.grid.shape), "nonnegative")


def apply_riesz_potential(f: GridFunction, alpha: float,
                          row_chunk: int = 512) -> GridFunction:
    """Fractional integral: quadrature of f(y)/|x-y|^(n-alpha).

    The diagonal cell integrates the kernel in closed form with f frozen at
    the node (1-D exact; 2-D equal-area-disk approximation), which keeps the
    scheme finite and order-h accurate at the singularity.
    """
    grid = f.grid
    n = grid.dimension
    if not 0 < alpha < n:
        raise ValueError("fractional order must satisfy 0 < alpha < dimension")
    pts = grid.points()
    qw = grid.quadrature_weights().ravel()
    vals = f.values.ravel()
    weighted = qw * vals
    out = np.empty(vals.size)

    if n == 1:
        # node's own cell: 2*(h/2)^a / a interior, one-sided half at the box edge
        h = grid.spacings[0]
        diag = np.full(vals.size, 2.0 * (h / 2.0) ** alpha / alpha)
        diag[0] = diag[-1] = (h / 2.0) ** alpha / alpha
    else:
        r_eq = np.sqrt(qw / np.pi)
        diag = 2.0 * np.pi * r_eq ** alpha / alpha

    for start in range(0, vals.size, row_chunk):
        stop = min(start + row_chunk, vals.size)
        diff = pts[start:stop, None, :] - pts[None, :, :]
        dist = np.sqrt((diff ** 2).sum(axis=2))
        with np.errstate(divide="ignore"):
            kern = dist ** (alpha - n)
        rows = np.arange(start, stop)
        kern[rows - start, rows] = 0.0
        out[start:stop] = kern @ weighted
    out += diag * vals
    mode = "nonnegative" if f.sign_mode == "nonnegative" else "signed"
    return GridFunction(grid, out.reshape(grid.shape), mode)


def apply_hilbert(f: GridFunction, epsilon: float,
                  row_chunk: int = 1024) -> GridFunction:
    """Truncated principal value (1/pi) integral of f(y)/(x-y) over |x-y|>eps."""
    grid = f.grid
    if grid.dimension != 1:
        raise ValueError("the Hilbert transform is 1-D")
    h = grid.spacings[0]
    if epsilon < h:
        raise ValueError("truncation must be at least the grid spacing")
    x = grid.axis(0)
    weighted = grid.quadrature_weights() * f.values
    out = np.empty(x.size)
    for start in range(0, x.size, row_chunk):
        stop = min(start + row_chunk, x.size)
        diff = x[start:stop, None] - x[None, :]
        with np.errstate(divide="ignore"):
            kern = np.where(np.abs(diff) > epsilon, 1.0 / diff, 0.0)
        out[start:stop] = kern @ weighted
    return GridFunction(grid, out / np.pi, "signed")


@dataclass(frozen=True)
class OperatorHandle:
    """A named operator with its parameters and (for maximal kinds) family.

    kinds: hardy-littlewood | fractional-maximal | riesz-potential |
    sharp-maximal | hilbert-1d.
    """

    kind: str
    balls: Optional[BallFamily] = None
    alpha: Optional[float] = None
    epsilon: Optional[float] = None

    KINDS = ("hardy-littlewood", "fractional-maximal", "riesz-potential",
             "sharp-maximal", "hilbert-1d")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown operator kind: {self.kind!r}")
        if self.kind in ("hardy-littlewood", "fractional-maximal", "sharp-maximal") \
                and self.balls is None:
            raise ValueError(f"{self.kind} requires a ball family")
        if self.kind in ("fractional-maximal", "riesz-potential") and self.alpha is None:
            raise ValueError(f"{self.kind} requires alpha")

    @property
    def reverses_inequality(self) -> bool:
        """Sharp-maximal comparisons run as ||f|| <= C ||M# f||."""
        return self.kind == "sharp-maximal"

    def apply(self, f: GridFunction) -> GridFunction:
        if self.kind == "hardy-littlewood":
            return apply_maximal(f, self.balls)
        if self.kind == "fractional-maximal":
            return apply_fractional_maximal(f, self.alpha, self.balls)
        if self.kind == "riesz-potential":
            return apply_riesz_potential(f, self.alpha)
        if self.kind == "sharp-maximal":
            return apply_sharp_maximal(f, self.balls)
        eps = self.epsilon if self.epsilon is not None else 2 * f.grid.spacing
        return apply_hilbert(f, eps)


def estimate_operator_norm(op: OperatorHandle, p: ExponentFunction, w,
                           probes: Sequence[GridFunction],
                           settings: NormSettings = DEFAULT_SETTINGS) -> float:
    """Max probe ratio ||T f|| / ||f|| in the weighted space.

    This is a LOWER bound on the true operator norm: enlarging the probe
    family can only increase it.
    """
    if not probes:
        raise ValueError("probe family is empty")
    ratios = []
    for k, f in enumerate(probes):
        den = weighted_norm(f, w, p, settings).value
        if den <= 0.0:
            warnings.warn(f"probe {k} has zero norm; skipped")
            continue
        num = weighted_norm(op.apply(f), w, p, settings).value
        ratios.append(num / den)
    if not ratios:
        raise ValueError("all probes had zero norm")
    return max(ratios)
