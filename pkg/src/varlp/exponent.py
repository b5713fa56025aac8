"""Variable exponent functions p(.) on a box, with conjugation and diagnostics.

An exponent function maps points of a box in R^1 or R^2 to [1, inf] (or to
(0, inf) after rescaling transforms, the quasi-norm regime).  Infinity is a
first-class value, represented as ``numpy.inf`` and tracked through a
dedicated region predicate rather than left to float overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "ExponentFunction",
    "constant_exponent",
    "affine_exponent",
    "smooth_exponent",
    "log_holder_model_exponent",
    "step_exponent",
    "with_infinity_region",
    "conjugate",
    "essential_range",
    "lh_constants",
    "lh_refinement_diagnostic",
    "transform",
    "exponent_from_spec",
]

Box = Sequence[Sequence[float]]


def _as_points(x) -> np.ndarray:
    """Normalize input to an (m, dim) point array."""
    pts = np.atleast_1d(np.asarray(x, dtype=float))
    if pts.ndim == 1:
        pts = pts[:, None]
    return pts


@dataclass(frozen=True)
class ExponentFunction:
    """Pointwise exponent with cached essential bounds.

    ``evaluator`` takes an (m, dim) array of points and returns an (m,) array
    of exponent values (np.inf allowed).  Instances are immutable; all
    operations derive new instances.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    domain_box: tuple
    p_minus: float
    p_plus: float
    infinity_region: Callable[[np.ndarray], np.ndarray]
    family_tag: str
    params: dict = field(default_factory=dict)
    # set on instances produced by conjugate() so the involution is exact
    conjugate_source: Optional["ExponentFunction"] = None

    @property
    def dimension(self) -> int:
        return len(self.domain_box)

    @property
    def is_quasi(self) -> bool:
        """True when p_- < 1 (quasi-norm regime; triangle inequality waived)."""
        return self.p_minus < 1.0

    @property
    def is_constant(self) -> bool:
        return self.p_minus == self.p_plus

    def __call__(self, x) -> np.ndarray:
        pts = _as_points(x)
        vals = np.asarray(self.evaluator(pts), dtype=float)
        return vals

    def eval_scalar(self, x) -> float:
        pt = np.atleast_1d(np.asarray(x, dtype=float)).reshape(1, -1)
        return float(self.evaluator(pt)[0])

    def on_grid(self, grid) -> np.ndarray:
        """Exponent values at the grid nodes, shaped like the grid."""
        vals = self(grid.points())
        return vals.reshape(grid.shape)

    def infinity_mask(self, grid) -> np.ndarray:
        mask = np.asarray(self.infinity_region(grid.points()), dtype=bool)
        return mask.reshape(grid.shape)


def _no_infinity(pts: np.ndarray) -> np.ndarray:
    return np.zeros(pts.shape[0], dtype=bool)


def _box_tuple(box: Box) -> tuple:
    return tuple((float(lo), float(hi)) for lo, hi in box)


def constant_exponent(value: float, box: Box) -> ExponentFunction:
    value = float(value)
    if value < 1 and not value > 0:
        raise ValueError("exponent must be positive")
    if math.isinf(value):
        b = _box_tuple(box)
        return ExponentFunction(
            evaluator=lambda pts: np.full(pts.shape[0], np.inf),
            domain_box=b,
            p_minus=np.inf,
            p_plus=np.inf,
            infinity_region=lambda pts: np.ones(pts.shape[0], dtype=bool),
            family_tag="constant",
            params={"value": value},
        )
    return ExponentFunction(
        evaluator=lambda pts: np.full(pts.shape[0], value),
        domain_box=_box_tuple(box),
        p_minus=value,
        p_plus=value,
        infinity_region=_no_infinity,
        family_tag="constant",
        params={"value": value},
    )


def affine_exponent(base: float, slopes, box: Box) -> ExponentFunction:
    """p(x) = base + sum_i slopes[i] * x_i, clipped bounds from box corners."""
    b = _box_tuple(box)
    slopes = np.atleast_1d(np.asarray(slopes, dtype=float))
    if len(slopes) != len(b):
        raise ValueError("one slope per axis required")

    def ev(pts):
        return base + pts @ slopes

    corners = [base]
    vals = []
    from itertools import product
    for corner in product(*b):
        vals.append(base + float(np.dot(corner, slopes)))
    lo, hi = min(vals), max(vals)
    if lo < 1:
        raise ValueError(f"affine exponent dips below 1 on the box (min {lo})")
    return ExponentFunction(ev, b, lo, hi, _no_infinity, "affine",
                            {"base": float(base), "slopes": [float(s) for s in slopes]})


def smooth_exponent(base: float, amplitude: float, frequency: float, box: Box) -> ExponentFunction:
    """p(x) = base + amplitude * sin(frequency * sum(x)); smooth LH model."""
    b = _box_tuple(box)
    if base - abs(amplitude) < 1:
        raise ValueError("smooth exponent must stay >= 1")

    def ev(pts):
        return base + amplitude * np.sin(frequency * pts.sum(axis=1))

    return ExponentFunction(ev, b, base - abs(amplitude), base + abs(amplitude),
                            _no_infinity, "smooth-sample",
                            {"base": base, "amplitude": amplitude, "frequency": frequency})


def log_holder_model_exponent(p_inf: float, c_inf: float, box: Box) -> ExponentFunction:
    """p(x) = p_inf + c_inf/log(e + |x|): decays to p_inf at the LH rate."""
    b = _box_tuple(box)
    if p_inf < 1 or (p_inf + c_inf) < 1:
        raise ValueError("model exponent must stay >= 1")

    def ev(pts):
        r = np.sqrt((pts ** 2).sum(axis=1))
        return p_inf + c_inf / np.log(math.e + r)

    lo = min(p_inf, p_inf + c_inf)
    hi = max(p_inf, p_inf + c_inf)
    return ExponentFunction(ev, b, lo, hi, _no_infinity, "log-holder-model",
                            {"p_inf": p_inf, "c_inf": c_inf})


def step_exponent(left: float, right: float, split: float, box: Box) -> ExponentFunction:
    """Discontinuous exponent (left for x < split, right for x >= split), 1-D.

    Not log-Holder; used to exercise the refinement diagnostic.
    """
    b = _box_tuple(box)
    if len(b) != 1:
        raise ValueError("step exponent is 1-D only")

    def ev(pts):
        return np.where(pts[:, 0] < split, float(left), float(right))

    return ExponentFunction(ev, b, min(left, right), max(left, right),
                            _no_infinity, "step",
                            {"left": left, "right": right, "split": split})


def with_infinity_region(finite: ExponentFunction, inf_from: float) -> ExponentFunction:
    """1-D exponent equal to ``finite`` for x < inf_from and infinity beyond."""
    if finite.dimension != 1:
        raise ValueError("infinity regions are supported in 1-D only")

    def ev(pts):
        vals = finite.evaluator(pts).astype(float).copy()
        vals[pts[:, 0] >= inf_from] = np.inf
        return vals

    def region(pts):
        return pts[:, 0] >= inf_from

    return ExponentFunction(ev, finite.domain_box, finite.p_minus, np.inf,
                            region, "piecewise-infinity",
                            {"inf_from": inf_from, "finite_tag": finite.family_tag})


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def _conj_values(vals: np.ndarray) -> np.ndarray:
    """Pointwise t -> t/(t-1) with 1 <-> inf."""
    out = np.empty_like(vals)
    inf_mask = np.isinf(vals)
    one_mask = vals == 1.0
    reg = ~(inf_mask | one_mask)
    out[inf_mask] = 1.0
    out[one_mask] = np.inf
    v = vals[reg]
    out[reg] = v / (v - 1.0)
    return out


def conjugate(p: ExponentFunction) -> ExponentFunction:
    """Pointwise conjugate exponent; an exact involution by construction."""
    if p.conjugate_source is not None:
        return p.conjugate_source

    def ev(pts):
        return _conj_values(p.evaluator(pts))

    def region(pts):
        # conjugate is infinite exactly where p = 1
        return np.asarray(p.evaluator(pts), dtype=float) == 1.0

    lo = 1.0 if math.isinf(p.p_plus) else _conj_values(np.array([p.p_plus]))[0]
    hi = np.inf if p.p_minus == 1.0 else _conj_values(np.array([p.p_minus]))[0]
    return ExponentFunction(ev, p.domain_box, float(lo), float(hi), region,
                            "conjugate", {"of": p.family_tag},
                            conjugate_source=p)


def essential_range(p: ExponentFunction, region_box: Box | None = None,
                    samples_per_axis: int = 513) -> tuple[float, float]:
    """Min and max of the exponent over a sub-box, by dense sampling."""
    dom = p.domain_box
    if region_box is None:
        region_box = dom
    axes = []
    for (lo, hi), (dlo, dhi) in zip(region_box, dom):
        lo, hi = max(float(lo), dlo), min(float(hi), dhi)
        if not lo < hi:
            raise ValueError("degenerate region")
        axes.append(np.linspace(lo, hi, samples_per_axis))
    if len(axes) == 1:
        pts = axes[0][:, None]
    else:
        xx, yy = np.meshgrid(axes[0], axes[1], indexing="ij")
        pts = np.column_stack([xx.ravel(), yy.ravel()])
    vals = np.asarray(p.evaluator(pts), dtype=float)
    return float(np.min(vals)), float(np.max(vals))


def lh_constants(p: ExponentFunction, samples_per_axis: int = 256) -> dict:
    """Sampled log-Holder constants on the box.

    C0 is the max of |p(x)-p(y)| * (-log|x-y|) over sampled pairs closer than
    1/2; C_inf uses the value at the farthest sampled point as a proxy for the
    exponent at infinity (a bounded box cannot see true spatial infinity, so
    the proxy is recorded as such).  Estimates are always finite on a finite
    sample; divergence only shows up under refinement (see
    ``lh_refinement_diagnostic``).
    """
    dom = p.domain_box
    axes = [np.linspace(lo, hi, samples_per_axis) for lo, hi in dom]
    if len(axes) == 1:
        pts = axes[0][:, None]
    else:
        n2 = max(24, int(math.isqrt(samples_per_axis)) * 4)
        a0 = np.linspace(dom[0][0], dom[0][1], n2)
        a1 = np.linspace(dom[1][0], dom[1][1], n2)
        xx, yy = np.meshgrid(a0, a1, indexing="ij")
        pts = np.column_stack([xx.ravel(), yy.ravel()])
    vals = np.asarray(p.evaluator(pts), dtype=float)
    finite = np.isfinite(vals)
    pts, vals = pts[finite], vals[finite]
    if pts.shape[0] < 2:
        raise ValueError("not enough finite-exponent samples")

    diff = np.abs(vals[:, None] - vals[None, :])
    dist = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
    mask = (dist > 0) & (dist < 0.5)
    c0 = 0.0
    if mask.any():
        c0 = float(np.max(diff[mask] * (-np.log(dist[mask]))))

    norms = np.sqrt((pts ** 2).sum(axis=1))
    far = int(np.argmax(norms))
    p_inf_proxy = float(vals[far])
    cinf = float(np.max(np.abs(vals - p_inf_proxy) * np.log(math.e + norms)))
    return {
        "C0_estimate": c0,
        "Cinf_estimate": cinf,
        "p_inf_estimate": p_inf_proxy,
        "p_inf_is_proxy": True,
        "is_LH": bool(np.isfinite(c0) and np.isfinite(cinf)),
    }


def lh_refinement_diagnostic(p: ExponentFunction, base_samples: int = 64,
                             levels: int = 3) -> dict:
    """Track C0 across sample refinements and flag likely non-log-Holder.

    A smooth exponent's sampled C0 converges (increments shrink); a jump makes
    it grow by ~log 2 per doubling without decay.  The classifier flags
    non-LH when increments stay above 0.05 and the last increment is at least
    60% of the previous one.
    """
    ns = [base_samples * (2 ** k) for k in range(levels)]
    estimates = [lh_constants(p, n)["C0_estimate"] for n in ns]
    incs = [b - a for a, b in zip(estimates, estimates[1:])]
    diverging = (
        len(incs) >= 2
        and all(i > 0.05 for i in incs)
        and incs[-1] >= 0.6 * incs[-2]
    )
    return {"samples": ns, "C0_estimates": estimates, "looks_non_LH": diverging}


def transform(p: ExponentFunction, kind: str, scale: float) -> ExponentFunction:
    """Pointwise rescaling: 'divide' (p/s), 'conjugate-quotient' ((p/s)'),
    or 'multiply' (r*p)."""
    s = float(scale)
    if s <= 0:
        raise ValueError("invalid scale")
    if kind == "divide":
        def ev(pts):
            return p.evaluator(pts) / s
        lo, hi = p.p_minus / s, p.p_plus / s
        tag = "divide"
    elif kind == "multiply":
        def ev(pts):
            return p.evaluator(pts) * s
        lo, hi = p.p_minus * s, p.p_plus * s
        tag = "multiply"
    elif kind == "conjugate-quotient":
        return conjugate(transform(p, "divide", s))
    else:
        raise ValueError(f"unknown transform kind: {kind}")

    def region(pts):
        return np.isinf(np.asarray(p.evaluator(pts), dtype=float))

    return ExponentFunction(ev, p.domain_box, lo, hi, region,
                            tag, {"scale": s, "of": p.family_tag})


# ---------------------------------------------------------------------------
# config (de)serialization
# ---------------------------------------------------------------------------

def exponent_from_spec(spec: dict, box: Box) -> ExponentFunction:
    """Build an exponent from a scenario-config mapping (tag + parameters)."""
    kind = spec.get("family")
    if kind == "constant":
        return constant_exponent(spec["value"], box)
    if kind == "affine":
        return affine_exponent(spec["base"], spec["slopes"], box)
    if kind == "smooth":
        return smooth_exponent(spec["base"], spec["amplitude"], spec["frequency"], box)
    if kind == "log-holder-model":
        return log_holder_model_exponent(spec["p_inf"], spec["c_inf"], box)
    if kind == "step":
        return step_exponent(spec["left"], spec["right"], spec["split"], box)
    if kind == "piecewise-infinity":
        inner = exponent_from_spec(spec["finite"], box)
        return with_infinity_region(inner, spec["inf_from"])
    raise ValueError(f"unknown exponent family: {kind!r}")
