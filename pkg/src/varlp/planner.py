"""Exact-rational parameter solver for the extrapolation scenarios.

Each planner produces an ExtrapolationPlan: the chosen parameters (all exact
rationals, +infinity allowed), the open feasibility window for the dual-space
parameter s, and the structured list of obligations the plan induces --
either "the maximal operator must be bounded on L^expr(w^power)" or a
weight-class membership "w^power in A_expr".  Obligation expressions are
machine-checkable descriptors (inner scale, conjugate flag, outer scale), so
the verification harness can instantiate them on concrete exponent functions
without parsing text.

Where a scenario admits two printed variants of a formula, the planner uses
the variant under which the reduction identities close exactly in rational
arithmetic (alpha_1 = (q0-s)/(q0/sigma-1) off-diagonal; the "+1" form of
tau_0 in the limited-range scenario); plans record a note when the variants
disagree at the chosen parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import List, Optional

from .rationals import INF, XRational

__all__ = [
    "ExponentExpr",
    "MaximalObligation",
    "WeightClassObligation",
    "FeasibilityWindow",
    "ExtrapolationPlan",
    "InfeasibleParameterError",
    "PlannerRedirect",
    "m_pair_obligations",
    "plan_diagonal",
    "plan_offdiagonal",
    "plan_limited",
    "plan_limited_constant_reduction",
    "plan_a1",
    "plan_ainfty",
    "plan_corollary_delta",
    "plan_rough_sio",
    "limited_merge_constant",
]


def _xr(value) -> XRational:
    return value if isinstance(value, XRational) else XRational(value)


def _xr_opt(value) -> Optional[XRational]:
    return None if value is None else _xr(value)


class InfeasibleParameterError(ValueError):
    def __init__(self, message: str, window: "FeasibilityWindow | None" = None):
        super().__init__(message)
        self.window = window


class PlannerRedirect(Exception):
    """Raised when a degenerate request belongs to a different scenario."""

    def __init__(self, target: str):
        super().__init__(f"use {target}")
        self.target = target


@dataclass(frozen=True)
class ExponentExpr:
    """Descriptor for ((base(.)/inner)['] )/outer applied to a variable
    exponent named ``base`` ("p" or "q")."""

    base: str = "p"
    inner: XRational = field(default_factory=lambda: XRational(1))
    conjugated: bool = False
    outer: XRational = field(default_factory=lambda: XRational(1))

    @staticmethod
    def _scale_str(value: XRational) -> str:
        text = str(value)
        return text if "/" not in text else f"({text})"

    def render(self) -> str:
        s = f"{self.base}(.)"
        if self.inner != 1:
            s = f"{s}/{self._scale_str(self.inner)}"
        if self.conjugated:
            s = f"({s})'"
        if self.outer != 1:
            s = f"({s})/{self._scale_str(self.outer)}"
        return s

    def instantiate(self, exponent):
        """Materialize on an ExponentFunction via the norm-dilation transforms."""
        from .exponent import transform
        out = exponent
        if self.inner != 1:
            out = transform(out, "divide", float(self.inner))
        if self.conjugated:
            from .exponent import conjugate
            out = conjugate(out)
        if self.outer != 1:
            out = transform(out, "divide", float(self.outer))
        return out

    def as_json(self) -> dict:
        return {"base": self.base, "inner": self.inner.as_json(),
                "conjugated": self.conjugated, "outer": self.outer.as_json()}


@dataclass(frozen=True)
class MaximalObligation:
    """M must be bounded on L^expr(w^weight_power)."""

    expr: ExponentExpr
    weight_power: XRational

    kind = "maximal-bounded"

    def render(self) -> str:
        if self.weight_power == 0:
            return f"M bounded on L^{{{self.expr.render()}}}"
        return f"M bounded on L^{{{self.expr.render()}}}(w^{{{self.weight_power}}})"

    def as_json(self) -> dict:
        return {"kind": self.kind, "expr": self.expr.as_json(),
                "weight_power": self.weight_power.as_json()}


@dataclass(frozen=True)
class WeightClassObligation:
    """w^weight_power must lie in the variable class with exponent expr."""

    expr: ExponentExpr
    weight_power: XRational

    kind = "weight-class"

    def render(self) -> str:
        return f"w^{{{self.weight_power}}} in A_{{{self.expr.render()}}}"

    def as_json(self) -> dict:
        return {"kind": self.kind, "expr": self.expr.as_json(),
                "weight_power": self.weight_power.as_json()}


@dataclass(frozen=True)
class FeasibilityWindow:
    """Open interval (lo, hi) of admissible values for s."""

    lo: XRational
    hi: XRational

    def contains(self, s: XRational) -> bool:
        return self.lo < s < self.hi

    @property
    def is_empty(self) -> bool:
        return not self.lo < self.hi

    def render(self) -> str:
        return f"({self.lo}, {self.hi})"

    def as_json(self) -> dict:
        return {"lo": self.lo.as_json(), "hi": self.hi.as_json()}

    def midpoint(self) -> XRational:
        if self.hi.is_infinite:
            raise ArithmeticError("no midpoint for an unbounded window")
        return (self.lo + self.hi) / 2


@dataclass
class ExtrapolationPlan:
    scenario: str
    parameters: dict
    obligations: List
    window: Optional[FeasibilityWindow] = None
    notes: List[str] = field(default_factory=list)

    def param(self, name: str) -> XRational:
        return self.parameters[name]

    def as_json(self) -> dict:
        return {
            "scenario": self.scenario,
            "parameters": {k: v.as_json() for k, v in self.parameters.items()},
            "obligations": [ob.as_json() for ob in self.obligations],
            "window": self.window.as_json() if self.window else None,
            "notes": list(self.notes),
        }

    def render_table(self) -> str:
        lines = [f"scenario: {self.scenario}"]
        if self.window is not None:
            lines.append(f"s-window: {self.window.render()}")
        for k, v in self.parameters.items():
            lines.append(f"  {k:>10} = {v}")
        lines.append("obligations:")
        for ob in self.obligations:
            lines.append(f"  - {ob.render()}")
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines)


def m_pair_obligations(base: str = "p") -> list:
    """The pair: M bounded on L^{base(.)}(w) and on L^{base'(.)}(w^-1)."""
    one = XRational(1)
    return [
        MaximalObligation(ExponentExpr(base, one, False, one), one),
        MaximalObligation(ExponentExpr(base, one, True, one), XRational(-1)),
    ]


# ---------------------------------------------------------------------------
# diagonal
# ---------------------------------------------------------------------------

def plan_diagonal(p0, p_minus, p_plus=None, s=None, beta1=None) -> ExtrapolationPlan:
    """Same-exponent extrapolation from a single weighted-integral hypothesis.

    Feasibility window: max(0, p0 - p_-(p0 - 1)) < s < min(p_-, p0).  The
    defaults s = 1, beta_1 = 0 reduce the two maximal-operator conditions to
    exactly the M-pair for (p(.), w).
    """
    p0 = _xr(p0)
    p_minus = _xr(p_minus)
    p_plus = _xr_opt(p_plus)
    if p0 == 1:
        raise PlannerRedirect("plan_a1")
    if not (p0 > 1 and not p0.is_infinite):
        raise ValueError("base exponent must satisfy 1 < p0 < inf")
    if not p_minus > 1:
        raise ValueError("requires p_- > 1")
    if p_plus is not None and (p_plus.is_infinite or p_plus < p_minus):
        raise ValueError("requires p_- <= p_+ < inf")

    window = FeasibilityWindow(
        lo=max(XRational(0), p0 - p_minus * (p0 - 1)),
        hi=min(p_minus, p0),
    )
    s = _xr(s) if s is not None else XRational(1)
    beta1 = _xr(beta1) if beta1 is not None else XRational(0)
    if not window.contains(s):
        raise InfeasibleParameterError(
            f"infeasible s: {s} outside {window.render()}", window)

    alpha1 = (p0 - s) / (p0 - 1)
    beta2 = s - beta1 * (1 - p0)
    gamma = s / (p0 / s).conjugate()
    obligations = [
        MaximalObligation(ExponentExpr("p", alpha1, False, XRational(1)),
                          alpha1 - beta1),
        MaximalObligation(ExponentExpr("p", s, True, XRational(1)), -beta2),
    ]
    return ExtrapolationPlan(
        scenario="diagonal",
        parameters={"p0": p0, "s": s, "beta1": beta1, "alpha1": alpha1,
                    "alpha2": XRational(1), "beta2": beta2, "gamma": gamma},
        obligations=obligations,
        window=window,
    )


# ---------------------------------------------------------------------------
# off-diagonal
# ---------------------------------------------------------------------------

def plan_offdiagonal(p0, q0, p_minus=None, q_minus=None, s=None,
                     beta1=None) -> ExtrapolationPlan:
    """Extrapolation between two exponent scales with 1/sigma' = 1/p0 - 1/q0.

    Consistency of the pointwise gap (1/p(x) - 1/q(x) equal to the scalar
    gap) is the caller's responsibility and is checked when exponent
    functions are attached in the harness.  With the defaults s = sigma,
    beta_1 = 0 the obligations are the M-pair for (q(.)/sigma, w^sigma);
    p0 = 1 switches to the single endpoint obligation.
    """
    p0, q0 = _xr(p0), _xr(q0)
    if not (XRational(1) <= p0 <= q0 and not q0.is_infinite):
        raise ValueError("requires 1 <= p0 <= q0 < inf")
    gap = XRational(1) / p0 - XRational(1) / q0
    if gap == 0:
        raise PlannerRedirect("plan_diagonal")
    sigma = (XRational(1) / gap).conjugate()

    if p0 == 1:
        ob = MaximalObligation(ExponentExpr("q", q0, True, XRational(1)), -q0)
        return ExtrapolationPlan(
            scenario="offdiagonal-endpoint",
            parameters={"p0": p0, "q0": q0, "sigma": sigma},
            obligations=[ob],
            notes=["endpoint branch: single dual obligation, no free parameters"],
        )

    if q_minus is None:
        raise ValueError("q_minus is required when p0 > 1")
    q_minus = _xr(q_minus)
    window = FeasibilityWindow(
        lo=max(XRational(0), q0 - q_minus * (q0 / sigma - 1)),
        hi=min(q0, q_minus),
    )
    s = _xr(s) if s is not None else sigma
    beta1 = _xr(beta1) if beta1 is not None else XRational(0)
    if not window.contains(s):
        raise InfeasibleParameterError(
            f"infeasible s: {s} outside {window.render()}", window)

    r0 = q0 / s
    alpha1 = (q0 - s) / (q0 / sigma - 1)
    beta2 = s - beta1 * (1 - q0 / sigma)
    obligations = [
        MaximalObligation(ExponentExpr("q", alpha1, False, XRational(1)),
                          alpha1 - beta1),
        MaximalObligation(ExponentExpr("q", s, True, XRational(1)), -beta2),
    ]
    notes = []
    if alpha1 != s:
        notes.append("alpha1 formula differs from its printed variant "
                     "(alpha1 = s) away from s = sigma; using the derived form")
    return ExtrapolationPlan(
        scenario="offdiagonal",
        parameters={"p0": p0, "q0": q0, "sigma": sigma, "s": s, "r0": r0,
                    "beta1": beta1, "alpha1": alpha1,
                    "alpha2": XRational(1), "beta2": beta2},
        obligations=obligations,
        window=window,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# limited range
# ---------------------------------------------------------------------------

def plan_limited(q_minus, q_plus, p_minus, p_plus, p_star=None, s=None,
                 beta1=None, mode: str = "weighted") -> ExtrapolationPlan:
    """Limited-range extrapolation: hypothesis only for exponents in
    (q_-, q_+) with doubly restricted weights.

    A working base exponent p_* in (q_-, q_+ p_- / p_+) exists iff
    p_+/p_- < q_+/q_-; within it the admissible s fill the open interval
    max(p_- - p_*(p_-/q_- - 1), p_* p_+ / q_+) < s < min(p_-, p_*).

    modes: "weighted" forces beta_2 = 0, yielding the single weight-class
    obligation w^sigma in A_{p(.)/(c sigma)} with sigma = p_* q_-/(p_* - q_-)
    and c = 1 - s/p_*; "unweighted" takes w = 1 (two unweighted maximal
    obligations); "general" keeps beta_1 free and emits both weighted
    obligations.
    """
    q_minus, p_minus, p_plus = _xr(q_minus), _xr(p_minus), _xr(p_plus)
    q_plus = _xr(q_plus)
    if not (XRational(1) < q_minus < q_plus):
        raise ValueError("requires 1 < q_- < q_+")
    if not (XRational(1) < p_minus <= p_plus):
        raise ValueError("requires 1 < p_- <= p_+")
    if p_plus.is_infinite:
        raise ValueError("p_+ must be finite")
    if mode not in ("weighted", "unweighted", "general"):
        raise ValueError(f"unknown mode {mode!r}")
    # under the intended regime q_- < p_- <= p_+ < q_+ the ratio condition
    # below holds automatically and some s always exists; wider range data is
    # accepted so that infeasibility is reported rather than rejected

    upper = INF if q_plus.is_infinite else q_plus * p_minus / p_plus
    if not q_minus < upper:
        raise InfeasibleParameterError(
            "oscillation too large: p_+/p_- >= q_+/q_- leaves no base exponent",
            FeasibilityWindow(q_minus, upper))
    if p_star is None:
        p_star = q_minus * 2 if upper.is_infinite \
            else FeasibilityWindow(q_minus, upper).midpoint()
    else:
        p_star = _xr(p_star)
        if not (q_minus < p_star < q_plus):
            raise InfeasibleParameterError(
                f"requested base exponent {p_star} outside ({q_minus}, {q_plus})",
                FeasibilityWindow(q_minus, q_plus))

    lo1 = p_minus - p_star * (p_minus / q_minus - 1)
    lo2 = XRational(0) if q_plus.is_infinite else p_star * p_plus / q_plus
    window = FeasibilityWindow(lo=max(lo1, lo2), hi=min(p_minus, p_star))
    effective_lo = max(window.lo, XRational(0))
    if s is None:
        s = (effective_lo + window.hi) / 2
    else:
        s = _xr(s)
    if not (window.contains(s) and s > 0):
        raise InfeasibleParameterError(
            f"infeasible s: {s} outside {window.render()}", window)

    qp_conj = (q_plus / p_star).conjugate()
    tau0 = qp_conj * (p_star / q_minus - 1) + 1
    alpha1 = q_minus * (p_star - s) / (p_star - q_minus)
    alpha2 = qp_conj
    sigma = p_star * q_minus / (p_star - q_minus)
    c = 1 - s / p_star

    notes = ["tau0 uses the reduction-consistent '+1' form"]
    params = {"q_minus": q_minus, "q_plus": q_plus, "p_minus": p_minus,
              "p_plus": p_plus, "p_star": p_star, "s": s, "tau0": tau0,
              "alpha1": alpha1, "alpha2": alpha2, "sigma": sigma, "c": c}

    if mode == "weighted":
        beta1 = -(s * sigma / p_star)
        beta2 = s * qp_conj - beta1 * (1 - tau0)
        if beta2 != 0:
            raise AssertionError("beta2 did not vanish in weighted mode")
        if alpha1 - beta1 != sigma:
            raise AssertionError("alpha1 - beta1 != sigma in weighted mode")
        params.update({"beta1": beta1, "beta2": beta2})
        obligations = [WeightClassObligation(
            ExponentExpr("p", c * sigma, False, XRational(1)), sigma)]
        notes.append("weighted conclusion: the dual condition trivializes "
                     "(weight power 0)")
    else:
        beta1 = _xr(beta1) if beta1 is not None else XRational(0)
        beta2 = s * qp_conj - beta1 * (1 - tau0)
        params.update({"beta1": beta1, "beta2": beta2})
        if mode == "unweighted":
            obligations = [
                MaximalObligation(ExponentExpr("p", alpha1, False, XRational(1)),
                                  XRational(0)),
                MaximalObligation(ExponentExpr("p", s, True, alpha2),
                                  XRational(0)),
            ]
            notes.append("unweighted conclusion: w = 1")
        else:
            obligations = [
                MaximalObligation(ExponentExpr("p", alpha1, False, XRational(1)),
                                  alpha1 - beta1),
                MaximalObligation(ExponentExpr("p", s, True, alpha2), -beta2),
            ]
    return ExtrapolationPlan(
        scenario=f"limited-{mode}",
        parameters=params,
        obligations=obligations,
        window=window,
        notes=notes,
    )


def limited_merge_constant(q_minus, q_plus, p_star, s) -> XRational:
    """The unique constant exponent at which the two limited-range weight
    conditions could merge into one: (s*alpha2 - alpha1)/(alpha2 - 1).

    For a genuinely variable exponent no merge is possible.
    """
    q_minus, q_plus, p_star, s = map(_xr, (q_minus, q_plus, p_star, s))
    alpha2 = (q_plus / p_star).conjugate()
    alpha1 = q_minus * (p_star - s) / (p_star - q_minus)
    if alpha2 == 1:
        raise ArithmeticError("merge constant undefined when alpha2 = 1")
    return (s * alpha2 - alpha1) / (alpha2 - 1)


def plan_limited_constant_reduction(p, q_minus, q_plus) -> dict:
    """Recover the constant-exponent limited-range statement two ways.

    Route 1 matches the primal weight condition (fixing alpha_1, beta_1 and
    solving for s, beta_2); route 2 matches the dual condition.  The two
    (s, beta_2) pairs must agree exactly; the result also re-checks that the
    common s sits in the feasibility window at p_- = p_+ = p.
    """
    p, q_minus, q_plus = _xr(p), _xr(q_minus), _xr(q_plus)
    if not (XRational(1) < q_minus < p < q_plus):
        raise ValueError("requires 1 < q_- < p < q_+")

    qp_conj = (q_plus / p).conjugate()
    tau_p = qp_conj * (p / q_minus - 1) + 1

    # route 1: primal condition fixes alpha1 = p/tau_p
    alpha1 = p / tau_p
    beta1 = alpha1 * (1 - qp_conj)
    s1 = alpha1 * (1 - p / q_minus) + p
    beta2_1 = s1 * qp_conj - beta1 * (1 - tau_p)

    # route 2: dual condition fixes (p/s)'/alpha2 = tau_p'
    alpha2 = qp_conj
    dual_exp = tau_p.conjugate() * alpha2          # the value of (p/s)'
    s2 = p / dual_exp.conjugate()
    beta2_2 = alpha1 * qp_conj

    lo = max(p - p * (p / q_minus - 1),
             XRational(0) if q_plus.is_infinite else p * p / q_plus)
    window = FeasibilityWindow(lo, p)

    return {
        "p": p, "q_minus": q_minus, "q_plus": q_plus,
        "tau_p": tau_p, "alpha1": alpha1, "beta1": beta1, "alpha2": alpha2,
        "s_route1": s1, "s_route2": s2,
        "beta2_route1": beta2_1, "beta2_route2": beta2_2,
        "routes_agree": s1 == s2 and beta2_1 == beta2_2,
        "s_in_window": window.contains(s1) and s1 > 0,
        "window": window,
    }


# ---------------------------------------------------------------------------
# endpoint / A_infinity
# ---------------------------------------------------------------------------

def plan_a1(p0, p_minus) -> ExtrapolationPlan:
    """Endpoint extrapolation from the smallest weight class: only goes up
    (p_- >= p0) and admits quasi-norm exponents p0 < 1.  The single
    obligation is the dual one; no free parameters exist."""
    p0, p_minus = _xr(p0), _xr(p_minus)
    if not p0 > 0 or p0.is_infinite:
        raise ValueError("requires 0 < p0 < inf")
    if p_minus < p0:
        raise InfeasibleParameterError("A1 extrapolation only goes up "
                                       f"(p_- = {p_minus} < p0 = {p0})")
    ob = MaximalObligation(ExponentExpr("p", p0, True, XRational(1)), -p0)
    notes = ["no free parameters: alpha2 = 1 and beta2 = p0 are forced"]
    if p0 < 1 or p_minus < 1:
        notes.append("quasi-norm regime (exponents below 1); "
                     "triangle inequality not asserted")
    return ExtrapolationPlan(
        scenario="a1",
        parameters={"p0": p0, "alpha2": XRational(1), "beta2": p0},
        obligations=[ob],
        notes=notes,
    )


def plan_ainfty(p0, s, p_minus) -> ExtrapolationPlan:
    """Extrapolation from the union class: pick s <= p_- with w^s in the
    rescaled class; reduces to the endpoint plan at exponent s."""
    p0, s, p_minus = _xr(p0), _xr(s), _xr(p_minus)
    if not p0 > 0:
        raise ValueError("requires p0 > 0")
    if not (s > 0 and s <= p_minus):
        raise InfeasibleParameterError(f"requires 0 < s <= p_- (got s = {s}, "
                                       f"p_- = {p_minus})")
    obligations = [
        WeightClassObligation(ExponentExpr("p", s, False, XRational(1)), s),
        MaximalObligation(ExponentExpr("p", s, True, XRational(1)), -s),
    ]
    return ExtrapolationPlan(
        scenario="ainfty",
        parameters={"p0": p0, "s": s},
        obligations=obligations,
        notes=[f"reduction chain: hypothesis at {p0} -> hypothesis at {s} "
               f"-> endpoint plan at {s}"],
    )


# ---------------------------------------------------------------------------
# application corollaries
# ---------------------------------------------------------------------------

@dataclass
class DeltaRange:
    """Exponent range induced by a delta-interpolated weighted hypothesis."""

    delta: XRational
    q_minus: XRational
    q_plus: XRational
    jn_tau: XRational
    jn_s: XRational

    def window(self) -> FeasibilityWindow:
        return FeasibilityWindow(self.q_minus, self.q_plus)

    def as_json(self) -> dict:
        return {"delta": self.delta.as_json(),
                "q_minus": self.q_minus.as_json(),
                "q_plus": self.q_plus.as_json(),
                "jn": {"tau": self.jn_tau.as_json(), "s": self.jn_s.as_json()}}


def plan_corollary_delta(delta) -> DeltaRange:
    """q_- = 2/(1+delta), q_+ = 2/(1-delta) (delta = 1 gives q_+ = inf).

    Also records the reverse-Holder bridge: the delta-power hypothesis class
    is A_{2/q_-} intersect RH_{(q_+/2)'}, whose coupling exponent is exactly
    2 (checked in rational arithmetic).
    """
    delta = _xr(delta)
    if not (XRational(0) < delta <= XRational(1)):
        raise ValueError("delta must lie in (0, 1]")
    q_minus = XRational(2) / (1 + delta)
    q_plus = INF if delta == 1 else XRational(2) / (1 - delta)
    jn_s = XRational(1) / delta
    tau = jn_s * (XRational(2) / q_minus - 1) + 1
    if tau != 2:
        raise AssertionError("reverse-Holder bridge failed to close")
    if not q_plus.is_infinite and (q_plus / 2).conjugate() != jn_s:
        raise AssertionError("reverse-Holder index mismatch")
    return DeltaRange(delta=delta, q_minus=q_minus, q_plus=q_plus,
                      jn_tau=tau, jn_s=jn_s)


def plan_rough_sio(r) -> ExtrapolationPlan:
    """Rescaled diagonal plan for rough homogeneous kernels with profile in
    L^r of the sphere: the M-pair obligation moves to (p(.)/r', w^{r'}).

    r = inf collapses to the plain diagonal defaults (r' = 1)."""
    r = _xr(r)
    if not r > 1:
        raise ValueError("requires r > 1 (inf allowed)")
    rp = r.conjugate()
    obligations = [
        MaximalObligation(ExponentExpr("p", rp, False, XRational(1)), rp),
        MaximalObligation(ExponentExpr("p", rp, True, XRational(1)), -rp),
    ]
    notes = [f"dilation bookkeeping: |T f|^{rp} is tested with exponent p(.)/{rp}",
             f"requires p_- > {rp} for the rescaled exponent to admit an M-pair"]
    if rp == 1:
        notes.append("r' = 1: reduces to the diagonal defaults")
    return ExtrapolationPlan(
        scenario="rough-sio",
        parameters={"r": r, "r_prime": rp, "required_p_minus": rp},
        obligations=obligations,
        notes=notes,
    )
