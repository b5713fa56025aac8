"""End-to-end empirical verification of planned norm inequalities.

A scenario bundles grids, exponents, a weight, an operator, a plan and a
probe family.  The harness instantiates the plan's obligations (weight-class
constants plus maximal-operator probe estimates), then estimates the best
constant of the concluded inequality over the probes at several resolutions.

Conclusions are reported as "best constant stable under refinement", never as
"inequality true": a finite probe family cannot certify a supremum over all
functions.  Obligation failures degrade a run to a warning rather than
aborting it, because class-constant verdicts are themselves heuristic.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .exponent import ExponentFunction, transform
from .grids import BallFamily, Grid, GridFunction, enumerate_balls
from .norms import DEFAULT_SETTINGS, NormSettings, weighted_norm
from .operators import OperatorHandle, estimate_operator_norm
from .planner import (ExtrapolationPlan, MaximalObligation,
                      WeightClassObligation)
from .probes import ProbeFamily
from .weights import (ApVarSpec, ClassConstantReport, Weight, class_constant,
                      classify_trend)

__all__ = [
    "ProbeRow",
    "ObligationReport",
    "VerificationReport",
    "verify_norm_inequality",
    "vector_valued_check",
    "run_scenario",
]

# tight bisection for ratio-level comparisons (duplicate-list homogeneity
# must close to 1e-10)
VECTOR_VALUED_SETTINGS = NormSettings(bracket_tol=1e-13, max_iterations=500)

STABILITY_DEFAULT = 0.10


@dataclass
class ProbeRow:
    index: int
    label: str
    left: float
    right: float
    ratio: float

    def as_list(self) -> list:
        return [self.index, self.label, self.left, self.right, self.ratio]


@dataclass
class ObligationReport:
    description: str
    kind: str
    weight_class: Optional[ClassConstantReport] = None
    operator_norm_estimate: Optional[float] = None
    status: str = "ok"

    def as_json(self) -> dict:
        out = {"description": self.description, "kind": self.kind,
               "status": self.status}
        if self.weight_class is not None:
            out["class_constant"] = {
                "estimate": self.weight_class.estimate,
                "trend": self.weight_class.trend,
                "verdict": self.weight_class.verdict,
            }
        if self.operator_norm_estimate is not None:
            out["operator_norm_lower_bound"] = self.operator_norm_estimate
        return out


@dataclass
class VerificationReport:
    scenario_id: str
    seed: Optional[int]
    rows: List[ProbeRow] = field(default_factory=list)
    best_constant: float = 0.0
    trend: List[tuple] = field(default_factory=list)   # (resolution, best)
    verdict: str = "single-level"
    obligations: List[ObligationReport] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def as_json(self) -> dict:
        return {
            "scenario": self.scenario_id,
            "seed": self.seed,
            "best_constant": self.best_constant,
            "trend": [[r, b] for r, b in self.trend],
            "verdict": self.verdict,
            "rows": [row.as_list() for row in self.rows],
            "obligations": [ob.as_json() for ob in self.obligations],
            "warnings": list(self.warnings),
            "extras": self.extras,
        }

    def body_text(self) -> str:
        """Deterministic serialized body (no timestamps anywhere)."""
        return json.dumps(self.as_json(), sort_keys=True)

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.body_text() + "\n")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["probe", "label", "left_norm", "right_norm", "ratio"])
            for row in self.rows:
                writer.writerow(row.as_list())

    @property
    def exit_code(self) -> int:
        return 1 if self.warnings else 0


def _probe_ratios(T: OperatorHandle, probes: Sequence[GridFunction],
                  labels: Sequence[str], p: ExponentFunction, w: Weight,
                  q: Optional[ExponentFunction], settings: NormSettings,
                  reverse: bool) -> tuple[List[ProbeRow], List[str]]:
    rows: List[ProbeRow] = []
    warnings: List[str] = []
    for k, f in enumerate(probes):
        tf = T.apply(f)
        if reverse:
            num = weighted_norm(f, w, p, settings).value
            den = weighted_norm(tf, w, p, settings).value
        else:
            num = weighted_norm(tf, w, q or p, settings).value
            den = weighted_norm(f, w, p, settings).value
        if den <= 0.0:
            warnings.append(f"probe {k} skipped (zero denominator)")
            continue
        rows.append(ProbeRow(k, labels[k] if k < len(labels) else "?",
                             num, den, num / den))
    return rows, warnings


def verify_norm_inequality(T: OperatorHandle, probes, p: ExponentFunction,
                           w: Weight, q: Optional[ExponentFunction] = None,
                           settings: NormSettings = DEFAULT_SETTINGS,
                           reverse: Optional[bool] = None) -> VerificationReport:
    """Per-probe ratios left/right of the concluded inequality.

    Forward mode tests ||T f|| <= C ||f||; ``reverse`` (automatic for the
    sharp maximal kind) tests ||f|| <= C ||T f|| and skips probes that the
    operator annihilates (constants).  Fractional kinds require the natural
    upper restriction p_+ < n/alpha; the target exponent q is derived from
    the gap relation when not supplied.
    """
    if reverse is None:
        reverse = T.reverses_inequality
    if isinstance(probes, ProbeFamily):
        raise TypeError("materialize the probe family on a grid first")
    if not probes:
        raise ValueError("probe family is empty")
    grid = probes[0].grid
    labels = [f"probe{k}" for k in range(len(probes))]

    if T.kind in ("fractional-maximal", "riesz-potential"):
        n = grid.dimension
        if p.p_plus >= n / T.alpha:
            raise ValueError("p_+ < n/alpha required")
        if q is None:
            # 1/q = 1/p - alpha/n pointwise
            gap = T.alpha / n
            def ev(pts, _p=p, _gap=gap):
                pv = np.asarray(_p.evaluator(pts), dtype=float)
                return 1.0 / (1.0 / pv - _gap)
            q = ExponentFunction(ev, p.domain_box,
                                 1.0 / (1.0 / p.p_minus - gap),
                                 1.0 / (1.0 / p.p_plus - gap),
                                 p.infinity_region, "derived-gap",
                                 {"alpha": T.alpha})

    rows, warns = _probe_ratios(T, probes, labels, p, w, q, settings, reverse)
    if not rows:
        raise ValueError("all probes were skipped")
    best = max(r.ratio for r in rows)
    return VerificationReport(
        scenario_id=f"{T.kind}-inequality", seed=None, rows=rows,
        best_constant=best, warnings=warns,
        extras={"reverse": reverse},
    )


def vector_valued_check(probe_lists: Sequence[Sequence[GridFunction]],
                        q: float, p: ExponentFunction, w: Weight,
                        M_handle: OperatorHandle,
                        settings: NormSettings = VECTOR_VALUED_SETTINGS
                        ) -> VerificationReport:
    """Square-function style comparison for finite families:

        || (sum (M f_k)^q)^(1/q) ||  vs  || (sum |f_k|^q)^(1/q) ||

    in the weighted space, one ratio per list."""
    if not 1 < q < np.inf:
        raise ValueError("q must lie in (1, inf)")
    rows: List[ProbeRow] = []
    warnings: List[str] = []
    for i, fam in enumerate(probe_lists):
        if not fam:
            raise ValueError("empty inner list")
        grid = fam[0].grid
        num_stack = np.stack([M_handle.apply(f).values for f in fam])
        den_stack = np.stack([np.abs(f.values) for f in fam])
        num_f = GridFunction(grid, (num_stack ** q).sum(axis=0) ** (1.0 / q))
        den_f = GridFunction(grid, (den_stack ** q).sum(axis=0) ** (1.0 / q))
        den = weighted_norm(den_f, w, p, settings).value
        if den <= 0:
            warnings.append(f"list {i} skipped (zero denominator)")
            continue
        num = weighted_norm(num_f, w, p, settings).value
        rows.append(ProbeRow(i, f"list[{len(fam)}]", num, den, num / den))
    if not rows:
        raise ValueError("all lists were skipped")
    return VerificationReport(
        scenario_id="vector-valued", seed=None, rows=rows,
        best_constant=max(r.ratio for r in rows), warnings=warnings,
    )


# ---------------------------------------------------------------------------
# scenario orchestration
# ---------------------------------------------------------------------------

def _instantiate_obligations(plan: ExtrapolationPlan, p: ExponentFunction,
                             q: Optional[ExponentFunction], w: Weight,
                             levels: list, probes_by_level: dict,
                             settings: NormSettings) -> tuple[list, list]:
    """Check each plan obligation on the concrete data.

    ``levels`` is a list of (resolution, grid, balls); weight-class constants
    get a refinement trend over all levels, maximal obligations get a probe
    lower-bound estimate at the finest level plus the class trend of the
    induced variable class.
    """
    reports: List[ObligationReport] = []
    warnings: List[str] = []
    for ob in plan.obligations:
        base_exp = q if (ob.expr.base == "q" and q is not None) else p
        expr_exp = ob.expr.instantiate(base_exp)
        w_pow = w.pow(float(ob.weight_power)) if ob.weight_power != 0 else Weight.one()
        estimates = []
        for _res, _grid, balls in levels:
            rep = class_constant(w_pow, ApVarSpec(expr_exp), balls, settings)
            estimates.append(rep.estimate)
        trend_report = ClassConstantReport(
            class_tag="A_pvar", params={"obligation": ob.render()},
            family=levels[-1][2].describe(), resolution=levels[-1][0],
            estimate=estimates[-1], trend=estimates,
            verdict=classify_trend(estimates))
        status = "ok"
        if trend_report.verdict == "diverging":
            status = "warning"
            warnings.append(f"obligation looks diverging: {ob.render()}")
        op_est = None
        if isinstance(ob, MaximalObligation):
            res, grid, balls = levels[-1]
            M = OperatorHandle("hardy-littlewood", balls=balls)
            op_est = estimate_operator_norm(M, expr_exp, w_pow,
                                            probes_by_level[res], settings)
        reports.append(ObligationReport(
            description=ob.render(), kind=ob.kind,
            weight_class=trend_report, operator_norm_estimate=op_est,
            status=status))
    return reports, warnings


def run_scenario(config) -> VerificationReport:
    """Run a validated ScenarioConfig end to end; deterministic given the seed.

    Planner-only configs (no grid section) return just the plan.  Obligation
    verdicts of "diverging" downgrade the run to warnings; schema violations
    and infeasible plans raise.
    """
    from .config import ScenarioConfig, build_operator, build_plan
    if not isinstance(config, ScenarioConfig):
        config = ScenarioConfig.from_dict(config)

    plan = build_plan(config.plan) if config.plan else None
    if config.grid is None:
        if plan is None:
            raise ValueError("config needs a grid section or a plan section")
        report = VerificationReport(scenario_id=config.name, seed=config.seed)
        report.extras["plan"] = plan.as_json() if hasattr(plan, "as_json") else plan
        report.verdict = "plan-only"
        return report

    settings = NormSettings(bracket_tol=config.tolerances["norm_bracket"])
    resolutions = config.resolutions
    box = config.grid["box"]
    dim = config.grid["dimension"]

    p = config.build_exponent("exponent")
    q = config.build_exponent("exponent_q") if config.exponent_q else None
    w = config.build_weight()
    family = ProbeFamily.generate(config.probes["recipe"],
                                  config.probes["count"], config.seed, box)

    levels = []
    probes_by_level = {}
    for res in resolutions:
        grid = Grid(dim, box, res)
        balls = enumerate_balls(grid, config.balls["policy"])
        levels.append((res, grid, balls))
        probes_by_level[res] = family.materialize(grid)

    report = VerificationReport(scenario_id=config.name, seed=config.seed)
    if plan is not None:
        report.extras["plan"] = plan.as_json() if hasattr(plan, "as_json") else plan
        if isinstance(plan, ExtrapolationPlan):
            ob_reports, ob_warnings = _instantiate_obligations(
                plan, p, q, w, levels, probes_by_level, settings)
            report.obligations = ob_reports
            report.warnings.extend(ob_warnings)

    trend = []
    for res, grid, balls in levels:
        T = build_operator(config.operator, balls)
        sub = verify_norm_inequality(T, probes_by_level[res], p, w, q, settings)
        report.warnings.extend(f"res {res}: {w_}" for w_ in sub.warnings)
        trend.append((res, sub.best_constant))
        if res == resolutions[-1]:
            report.rows = sub.rows
            report.best_constant = sub.best_constant
    report.trend = trend
    if len(trend) >= 2:
        rel = max(abs(b2 - b1) / b1 for (_, b1), (_, b2) in zip(trend, trend[1:]))
        stable = rel <= config.tolerances["stability"]
        report.verdict = "stable" if stable else "unstable"
        report.extras["max_relative_change"] = rel
        if not stable:
            report.warnings.append(
                f"best constant unstable across refinement ({rel:.3f})")
    else:
        report.verdict = "single-level"

    if config.vector_valued:
        vv = config.vector_valued
        rng_lists = []
        probes = probes_by_level[resolutions[-1]]
        sizes = vv.get("list_sizes", [3])
        k = 0
        for size in sizes:
            fam = [probes[(k + j) % len(probes)] for j in range(size)]
            rng_lists.append(fam)
            k += size
        _res, _grid, balls = levels[-1]
        M = OperatorHandle("hardy-littlewood", balls=balls)
        vv_report = vector_valued_check(rng_lists, vv["q"], p, w, M)
        report.extras["vector_valued"] = vv_report.as_json()

    return report
