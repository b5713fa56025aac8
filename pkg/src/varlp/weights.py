"""Weights and weight-class constant estimation over ball families.

A weight is either sampled grid data (strictly positive, finite) or a
symbolic radial power |x|^e bound lazily to grids.  Class constants are
suprema over a finite ball family of the defining ball quantity, so every
estimate is a lower bound on the true constant; divergence is diagnosed by
a refinement trend, never certified.

Power weights rasterize with the origin cell replaced by the cell average of
the profile (closed form in 1-D, equal-area-disk approximation in 2-D) when
the profile is locally integrable, and by the half-cell sample otherwise;
this keeps node values finite while preserving (non-)integrability behavior
under refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .exponent import ExponentFunction, conjugate, transform
from .grids import BallFamily, Grid, GridFunction, segment_integrals
from .norms import (DEFAULT_SETTINGS, NormSettings, holder_budget,
                    masked_luxemburg_norms)
from .rationals import XRational

__all__ = [
    "Weight",
    "ApSpec", "A1Spec", "RHSpec", "ApVarSpec", "ApqSpec", "ApqVarSpec",
    "ClassConstantReport",
    "class_constant",
    "classify_trend",
    "refinement_report",
    "reverse_factorization",
    "jn_exponent",
    "apq_to_ar",
    "apqvar_sigma_check",
    "ainfty_weaker_check",
    "power_weight_admissible",
    "DIVERGENCE_GROWTH",
]

# growth per refinement level (on every level) that classifies an estimate
# trend as diverging
DIVERGENCE_GROWTH = 0.25


class Weight:
    """Positive weight: grid samples, a constant, or a radial power |x|^e."""

    def __init__(self, *, grid_function: GridFunction | None = None,
                 power: float | None = None, constant: float | None = None,
                 _inverse_of: "Weight | None" = None):
        reps = sum(x is not None for x in (grid_function, power, constant))
        if reps != 1:
            raise ValueError("exactly one representation required")
        if grid_function is not None:
            v = grid_function.values
            if np.any(v <= 0) or not np.all(np.isfinite(v)):
                raise ValueError("grid weight must be strictly positive and finite")
        if constant is not None and constant <= 0:
            raise ValueError("constant weight must be positive")
        self._gf = grid_function
        self._power = None if power is None else float(power)
        self._const = None if constant is None else float(constant)
        self._inverse_of = _inverse_of
        self._grid_cache: dict = {}
        self.constant_cache: dict = {}

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_grid(cls, gf: GridFunction) -> "Weight":
        return cls(grid_function=gf)

    @classmethod
    def from_values(cls, grid: Grid, values) -> "Weight":
        return cls(grid_function=GridFunction(grid, values))

    @classmethod
    def power_weight(cls, exponent: float) -> "Weight":
        """|x|^exponent (use a negative exponent for the decaying |x|^-a)."""
        return cls(power=exponent)

    @classmethod
    def one(cls) -> "Weight":
        return cls(constant=1.0)

    @property
    def kind(self) -> str:
        if self._gf is not None:
            return "grid"
        if self._power is not None:
            return "power"
        return "constant"

    @property
    def power_exponent(self) -> float | None:
        return self._power

    def describe(self) -> str:
        if self._gf is not None:
            return f"grid[{self._gf.grid.resolution}]"
        if self._power is not None:
            return f"|x|^{self._power:g}"
        return f"const {self._const:g}"

    # -- rasterization --------------------------------------------------------

    def on_grid(self, grid: Grid) -> GridFunction:
        key = id(grid)
        if key not in self._grid_cache:
            self._grid_cache[key] = self._materialize(grid)
        return self._grid_cache[key]

    def values_on(self, grid: Grid) -> np.ndarray:
        return self.on_grid(grid).values.ravel()

    def _materialize(self, grid: Grid) -> GridFunction:
        if self._gf is not None:
            if self._gf.grid != grid:
                raise ValueError("grid weight queried on a different grid")
            return self._gf
        if self._const is not None:
            return GridFunction.constant(grid, self._const)
        e = self._power
        pts = grid.points()
        r = np.sqrt((pts ** 2).sum(axis=1))
        with np.errstate(divide="ignore"):
            vals = r ** e
        origin = r == 0.0
        if origin.any():
            n = grid.dimension
            cellw = grid.quadrature_weights().ravel()[origin]
            if n == 1:
                half = grid.spacings[0] / 2.0
                fill = half ** e / (1.0 + e) if e > -1.0 else half ** e
                vals[origin] = fill
            else:
                r_eq = np.sqrt(cellw / np.pi)
                fill = 2.0 * r_eq ** e / (2.0 + e) if e > -2.0 else r_eq ** e
                vals[origin] = fill
        return GridFunction(grid, vals.reshape(grid.shape))

    # -- algebra ---------------------------------------------------------------

    def inverse(self) -> "Weight":
        """Pointwise reciprocal; an exact involution (double inverse is
        the original object for grid weights, the same closed form for
        power/constant weights)."""
        if self._inverse_of is not None:
            return self._inverse_of
        if self._power is not None:
            return Weight(power=-self._power)
        if self._const is not None:
            return Weight(constant=1.0 / self._const)
        inv = GridFunction(self._gf.grid, 1.0 / self._gf.values)
        return Weight(grid_function=inv, _inverse_of=self)

    def pow(self, t: float) -> "Weight":
        t = float(t)
        if t == 1.0:
            return self
        if self._power is not None:
            return Weight(power=self._power * t)
        if self._const is not None:
            return Weight(constant=self._const ** t)
        vals = self._gf.values ** t
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise ValueError("weight not locally invertible")
        return Weight(grid_function=GridFunction(self._gf.grid, vals))

    def __mul__(self, other: "Weight") -> "Weight":
        if self._gf is None or other._gf is None:
            raise ValueError("product weights need grid representations")
        return Weight(grid_function=self._gf * other._gf)


# ---------------------------------------------------------------------------
# class specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ApSpec:
    """Classical A_p (constant p > 1): avg(w) * avg(w^(1-p'))^(p-1)."""
    p: float

    def __post_init__(self):
        if not self.p > 1:
            raise ValueError("A_p requires p > 1")

    tag = "A_p"

    def params(self):
        return {"p": self.p}


@dataclass(frozen=True)
class A1Spec:
    """A_1: avg(w) / min(w) per ball (node minimum stands in for essinf)."""
    tag = "A_1"

    def params(self):
        return {}


@dataclass(frozen=True)
class RHSpec:
    """Reverse Holder RH_s (s > 1): avg(w^s)^(1/s) / avg(w)."""
    s: float

    def __post_init__(self):
        if not self.s > 1:
            raise ValueError("RH_s requires s > 1")

    tag = "RH_s"

    def params(self):
        return {"s": self.s}


@dataclass(frozen=True)
class ApVarSpec:
    """Variable A_p: |B|^-1 ||w chi_B||_p ||w^-1 chi_B||_p'."""
    p: ExponentFunction
    tag = "A_pvar"

    def params(self):
        return {"p": self.p.family_tag}


@dataclass(frozen=True)
class ApqSpec:
    """Off-diagonal A_pq (constants 1 <= p <= q): the two-average product;
    p = 1 uses avg(w^q)/min(w^q)."""
    p: float
    q: float

    def __post_init__(self):
        if not (1 <= self.p <= self.q):
            raise ValueError("A_pq requires 1 <= p <= q")

    tag = "A_pq"

    def params(self):
        return {"p": self.p, "q": self.q}


@dataclass(frozen=True)
class ApqVarSpec:
    """Variable off-diagonal class with gap 1/p(x) - 1/q(x) = gamma in (0,1)."""
    p: ExponentFunction
    q: ExponentFunction
    gamma: float

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0,1)")

    tag = "A_pqvar"

    def params(self):
        return {"gamma": self.gamma}


@dataclass
class ClassConstantReport:
    class_tag: str
    params: dict
    family: str
    resolution: int
    estimate: float
    trend: Optional[List[float]] = None
    verdict: str = "single-level"

    def csv_row(self) -> list:
        return [self.class_tag, repr(self.params), self.family,
                self.resolution, self.estimate, self.verdict]


# ---------------------------------------------------------------------------
# per-ball building blocks
# ---------------------------------------------------------------------------

def _inverse_values(w: Weight, grid: Grid) -> np.ndarray:
    """Node values of w^-1 via the Weight object (keeps duality symmetric:
    both orientations see bitwise-identical rasterizations)."""
    try:
        return w.inverse().values_on(grid)
    except ValueError as exc:
        raise ValueError("weight not locally invertible") from exc


def _ball_averages(vals: np.ndarray, balls: BallFamily) -> np.ndarray:
    """Quadrature average of vals over each ball (1-D uses segment sums)."""
    quads = balls.quadratures()
    out = np.empty(len(quads))
    if balls.grid.dimension == 1:
        gf = GridFunction(balls.grid, vals, "signed")
        T = segment_integrals(gf)
        x = balls.grid.axis(0)
        flat = vals.ravel()
        for i, q in enumerate(quads):
            a, b = q.node_range
            out[i] = flat[a] if a == b else (T[b] - T[a]) / (x[b] - x[a])
        return out
    flat = vals.ravel()
    for i, q in enumerate(quads):
        out[i] = np.dot(q.weights, flat[q.indices]) / q.weights.sum() \
            if q.indices.size > 1 else flat[q.indices[0]]
    return out


def _ball_minima(vals: np.ndarray, balls: BallFamily) -> np.ndarray:
    quads = balls.quadratures()
    flat = vals.ravel()
    if balls.grid.dimension == 1:
        # sparse table for O(1) range-min queries
        n = flat.size
        levels = [flat]
        k = 1
        while 2 ** k <= n:
            prev = levels[-1]
            levels.append(np.minimum(prev[: n - 2 ** k + 1],
                                     prev[2 ** (k - 1): n - 2 ** (k - 1) + 1]))
            k += 1
        out = np.empty(len(quads))
        for i, q in enumerate(quads):
            a, b = q.node_range
            span = b - a + 1
            lvl = span.bit_length() - 1
            out[i] = min(levels[lvl][a], levels[lvl][b - 2 ** lvl + 1])
        return out
    return np.array([flat[q.indices].min() for q in quads])


def _ball_measures(balls: BallFamily) -> np.ndarray:
    m = np.array([q.measure for q in balls.quadratures()])
    if np.any(m <= 0):
        raise ValueError("ball below resolution")
    return m


def _ball_norms(vals: np.ndarray, p: ExponentFunction, balls: BallFamily,
                settings: NormSettings) -> np.ndarray:
    """Luxemburg norm of (vals restricted to B) for every ball, chunked."""
    grid = balls.grid
    quads = balls.quadratures()
    pv = p.on_grid(grid).ravel()
    flat = np.asarray(vals, dtype=float).ravel()
    n_nodes = flat.size
    chunk = max(16, 4_000_000 // n_nodes)
    out = np.empty(len(quads))
    for start in range(0, len(quads), chunk):
        block = quads[start:start + chunk]
        V = np.zeros((len(block), n_nodes))
        W = np.zeros((len(block), n_nodes))
        for r, q in enumerate(block):
            V[r, q.indices] = flat[q.indices]
            W[r, q.indices] = q.weights
        out[start:start + len(block)] = masked_luxemburg_norms(V, W, pv, settings)
    return out


# ---------------------------------------------------------------------------
# class constants
# ---------------------------------------------------------------------------

def _ball_quantities(w: Weight, spec, balls: BallFamily,
                     settings: NormSettings) -> np.ndarray:
    grid = balls.grid
    vals = w.values_on(grid)

    if isinstance(spec, ApSpec):
        pc = spec.p / (spec.p - 1.0)
        dual = vals ** (1.0 - pc)
        if not np.all(np.isfinite(dual)):
            raise ValueError("weight not locally invertible")
        return _ball_averages(vals, balls) * \
            _ball_averages(dual, balls) ** (spec.p - 1.0)

    if isinstance(spec, A1Spec):
        return _ball_averages(vals, balls) / _ball_minima(vals, balls)

    if isinstance(spec, RHSpec):
        return _ball_averages(vals ** spec.s, balls) ** (1.0 / spec.s) / \
            _ball_averages(vals, balls)

    if isinstance(spec, ApVarSpec):
        inv = _inverse_values(w, grid)
        measures = _ball_measures(balls)
        n1 = _ball_norms(vals, spec.p, balls, settings)
        n2 = _ball_norms(inv, conjugate(spec.p), balls, settings)
        return n1 * n2 / measures

    if isinstance(spec, ApqSpec):
        if spec.p == 1.0:
            wq = vals ** spec.q
            return _ball_averages(wq, balls) / _ball_minima(wq, balls)
        pc = spec.p / (spec.p - 1.0)
        dual = vals ** (-pc)
        if not np.all(np.isfinite(dual)):
            raise ValueError("weight not locally invertible")
        return _ball_averages(vals ** spec.q, balls) ** (1.0 / spec.q) * \
            _ball_averages(dual, balls) ** (1.0 / pc)

    if isinstance(spec, ApqVarSpec):
        _check_gap(spec.p, spec.q, spec.gamma, balls.grid)
        inv = _inverse_values(w, grid)
        measures = _ball_measures(balls)
        nq = _ball_norms(vals, spec.q, balls, settings)
        npc = _ball_norms(inv, conjugate(spec.p), balls, settings)
        return measures ** (spec.gamma - 1.0) * nq * npc

    raise ValueError(f"unknown class spec: {spec!r}")


def _check_gap(p: ExponentFunction, q: ExponentFunction, gamma: float,
               grid: Grid, tol: float = 1e-9) -> None:
    pv = p.on_grid(grid)
    qv = q.on_grid(grid)
    gap = 1.0 / pv - 1.0 / qv
    if np.max(np.abs(gap - gamma)) > tol:
        raise ValueError("exponent gap 1/p - 1/q does not match gamma")


def _spec_token(spec) -> tuple:
    if isinstance(spec, ApVarSpec):
        return (spec.tag, id(spec.p))
    if isinstance(spec, ApqVarSpec):
        return (spec.tag, id(spec.p), id(spec.q), spec.gamma)
    return (spec.tag, tuple(sorted(spec.params().items())))


def class_constant(w: Weight, spec, balls: BallFamily,
                   settings: NormSettings = DEFAULT_SETTINGS) -> ClassConstantReport:
    """Supremum of the defining ball quantity over the family (a lower bound
    on the true constant; cached per (spec, family))."""
    key = (_spec_token(spec), id(balls))
    if key in w.constant_cache:
        return w.constant_cache[key]
    quantities = _ball_quantities(w, spec, balls, settings)
    report = ClassConstantReport(
        class_tag=spec.tag,
        params=spec.params(),
        family=balls.describe(),
        resolution=balls.grid.resolution,
        estimate=float(np.max(quantities)),
    )
    w.constant_cache[key] = report
    return report


def classify_trend(estimates: Sequence[float],
                   growth: float = DIVERGENCE_GROWTH) -> str:
    """'diverging' when the estimate grows by >= `growth` on every one of at
    least two successive refinement steps, else 'bounded-looking'."""
    if len(estimates) < 3:
        return "single-level" if len(estimates) < 2 else "bounded-looking"
    ratios = [b / a for a, b in zip(estimates, estimates[1:])]
    return "diverging" if all(r >= 1.0 + growth for r in ratios) else "bounded-looking"


def refinement_report(make_level: Callable[[int], tuple],
                      spec, resolutions: Sequence[int],
                      settings: NormSettings = DEFAULT_SETTINGS) -> ClassConstantReport:
    """Estimate the class constant at several resolutions and classify.

    ``make_level(resolution)`` returns the (Weight, BallFamily) pair for that
    level; the spec (and any exponents inside it) is shared across levels.
    """
    estimates = []
    last = None
    for res in resolutions:
        weight, balls = make_level(res)
        last = class_constant(weight, spec, balls, settings)
        estimates.append(last.estimate)
    report = ClassConstantReport(
        class_tag=last.class_tag, params=last.params, family=last.family,
        resolution=resolutions[-1], estimate=estimates[-1],
        trend=estimates, verdict=classify_trend(estimates))
    return report


# ---------------------------------------------------------------------------
# weight algebra
# ---------------------------------------------------------------------------

def reverse_factorization(mu1: Weight, mu2: Weight, p: float, grid: Grid) -> Weight:
    """mu1 * mu2^(1-p): builds an A_p-type weight from two A_1-type ones."""
    if not p > 1:
        raise ValueError("reverse factorization requires p > 1")
    v1 = mu1.values_on(grid)
    v2 = mu2.values_on(grid)
    return Weight.from_values(grid, v1 * v2 ** (1.0 - p))


def jn_exponent(p, s) -> XRational:
    """Johnson-Neugebauer coupling: w in A_p n RH_s iff w^s in A_tau,
    tau = s(p-1) + 1.  Exact for rational inputs."""
    p, s = XRational(p), XRational(s)
    if not (p > 1 and s > 1):
        raise ValueError("requires p > 1 and s > 1")
    return s * (p - 1) + 1


def apq_to_ar(p, q) -> XRational:
    """w in A_pq (1 <= p < q) implies w^q in A_r with r = 1 + q/p'."""
    p, q = XRational(p), XRational(q)
    if not (XRational(1) <= p and p < q):
        raise ValueError("requires 1 <= p < q")
    return 1 + q / p.conjugate()


def power_weight_admissible(a: float, p: ExponentFunction, n: int) -> bool:
    """|x|^-a lies in the variable class exactly when 0 <= a < n/p_+."""
    if a < 0:
        raise ValueError("decay exponent a must be nonnegative")
    return a < n / p.p_plus


# ---------------------------------------------------------------------------
# structural checks
# ---------------------------------------------------------------------------

def apqvar_sigma_check(w: Weight, p: ExponentFunction, q: ExponentFunction,
                       sigma: float, balls: BallFamily,
                       settings: NormSettings = DEFAULT_SETTINGS) -> dict:
    """Two-sided check of the off-diagonal/diagonal class equivalence.

    With 1/p(x) - 1/q(x) = 1/sigma' pointwise, the membership of w in the
    off-diagonal class is equivalent to w^sigma lying in the variable class
    with exponent q/sigma, and ball by ball the second quantity equals the
    first raised to sigma.  Verifies the conjugate identity
    sigma*(q/sigma)' = p' pointwise first.
    """
    if not sigma > 1:
        raise ValueError("sigma must exceed 1")
    gamma = 1.0 - 1.0 / sigma  # 1/sigma'
    _check_gap(p, q, gamma, balls.grid)

    q_over_sigma = transform(q, "divide", sigma)
    ident = sigma * conjugate(q_over_sigma).on_grid(balls.grid) \
        - conjugate(p).on_grid(balls.grid)
    identity_max_err = float(np.max(np.abs(ident)))

    vals = w.values_on(balls.grid)
    inv = _inverse_values(w, balls.grid)
    measures = _ball_measures(balls)

    a_ball = measures ** (gamma - 1.0) \
        * _ball_norms(vals, q, balls, settings) \
        * _ball_norms(inv, conjugate(p), balls, settings)
    b_ball = measures ** (-1.0) \
        * _ball_norms(w.pow(sigma).values_on(balls.grid), q_over_sigma,
                      balls, settings) \
        * _ball_norms(w.pow(-sigma).values_on(balls.grid),
                      conjugate(q_over_sigma), balls, settings)

    target = a_ball ** sigma
    dev = np.abs(b_ball - target) / np.maximum(1.0, np.abs(target))
    return {
        "sigma": sigma,
        "gamma": gamma,
        "identity_max_error": identity_max_err,
        "apqvar_constant": float(a_ball.max()),
        "diagonal_constant": float(b_ball.max()),
        "max_ball_deviation": float(dev.max()),
        "ball_count": len(balls),
    }


def ainfty_weaker_check(w: Weight, p: ExponentFunction, s: float,
                        balls: BallFamily,
                        settings: NormSettings = DEFAULT_SETTINGS) -> dict:
    """Check that raising to s in (0,1) lands in the rescaled class with
    constant at most [w]^s times the Holder budget, ball by ball."""
    if not 0 < s < 1:
        raise ValueError("s must lie in (0,1)")
    grid = balls.grid
    vals = w.values_on(grid)
    inv = _inverse_values(w, grid)
    measures = _ball_measures(balls)
    p_over_s = transform(p, "divide", s)

    base_ball = _ball_norms(vals, p, balls, settings) \
        * _ball_norms(inv, conjugate(p), balls, settings) / measures
    raised_ball = _ball_norms(w.pow(s).values_on(grid), p_over_s, balls, settings) \
        * _ball_norms(w.pow(-s).values_on(grid), conjugate(p_over_s),
                      balls, settings) / measures

    budget = holder_budget(p)
    per_ball_bound = budget * base_ball ** s
    ratios = raised_ball / per_ball_bound
    return {
        "s": s,
        "constant_w": float(base_ball.max()),
        "constant_ws": float(raised_ball.max()),
        "holder_budget": budget,
        "family_bound": budget * float(base_ball.max()) ** s,
        "family_ok": float(raised_ball.max()) <= budget * float(base_ball.max()) ** s,
        "max_ball_ratio": float(ratios.max()),
        "ball_ok": bool(np.all(ratios <= 1.0 + 1e-9)),
    }
