"""Scenario configuration: a single JSON document, validated before any
computation runs.

Unknown keys are rejected and every violation is collected (not just the
first), so a bad config fails with the complete list.  Rational-valued plan
parameters are carried as strings ("6/5", "inf") and never round-trip
through floats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Optional

from .exponent import exponent_from_spec
from .grids import BallFamily, Grid
from .operators import OperatorHandle
from .planner import (plan_a1, plan_ainfty, plan_corollary_delta,
                      plan_diagonal, plan_limited,
                      plan_limited_constant_reduction, plan_offdiagonal,
                      plan_rough_sio)
from .weights import Weight

__all__ = ["ConfigError", "ScenarioConfig", "build_operator", "build_plan",
           "build_function"]

SCHEMA_VERSION = 1

_TOP_KEYS = {"schema_version", "name", "seed", "grid", "refinement",
             "exponent", "exponent_q", "weight", "operator", "balls",
             "probes", "plan", "vector_valued", "tolerances", "output",
             "function", "rdf", "weight_class"}

_SECTION_KEYS = {
    "grid": {"dimension", "box", "resolution"},
    "refinement": {"resolutions"},
    "weight": {"kind", "exponent", "value"},
    "operator": {"kind", "alpha", "epsilon"},
    "balls": {"policy"},
    "probes": {"recipe", "count"},
    "vector_valued": {"q", "list_sizes"},
    "tolerances": {"norm_bracket", "stability"},
    "output": {"csv", "json"},
    "function": {"kind", "value", "base", "slope", "lo", "hi"},
    "rdf": {"operator_norm_bound", "max_terms", "tail_tolerance",
            "alpha", "beta"},
    "weight_class": {"class", "p", "q", "s", "gamma"},
}

_EXPONENT_KEYS = {"family", "value", "base", "slopes", "amplitude",
                  "frequency", "p_inf", "c_inf", "left", "right", "split",
                  "finite", "inf_from"}

_PLAN_KEYS = {"scenario", "p0", "q0", "p_minus", "p_plus", "q_minus",
              "q_plus", "p_star", "s", "beta1", "delta", "r", "mode", "p"}


class ConfigError(ValueError):
    def __init__(self, violations: List[str]):
        super().__init__("invalid config:\n" + "\n".join(f"  - {v}" for v in violations))
        self.violations = violations


def _check_keys(section: str, obj: dict, allowed: set, violations: list) -> None:
    for key in obj:
        if key not in allowed:
            violations.append(f"{section}: unknown key {key!r}")


@dataclass
class ScenarioConfig:
    name: str
    seed: int
    grid: Optional[dict]
    exponent: Optional[dict]
    exponent_q: Optional[dict]
    weight: Optional[dict]
    operator: Optional[dict]
    balls: dict
    probes: dict
    plan: Optional[dict]
    vector_valued: Optional[dict]
    tolerances: dict
    output: dict
    resolutions: List[int]
    function: Optional[dict] = None
    rdf: Optional[dict] = None
    weight_class: Optional[dict] = None

    @classmethod
    def from_dict(cls, raw: dict) -> "ScenarioConfig":
        violations: List[str] = []
        if not isinstance(raw, dict):
            raise ConfigError(["top level must be a mapping"])
        _check_keys("top", raw, _TOP_KEYS, violations)
        if raw.get("schema_version") != SCHEMA_VERSION:
            violations.append(f"schema_version must be {SCHEMA_VERSION}")

        for section, keys in _SECTION_KEYS.items():
            if section in raw and isinstance(raw[section], dict):
                _check_keys(section, raw[section], keys, violations)
        for section in ("exponent", "exponent_q"):
            if section in raw and isinstance(raw[section], dict):
                _check_keys(section, raw[section], _EXPONENT_KEYS, violations)
                finite = raw[section].get("finite")
                if isinstance(finite, dict):
                    _check_keys(f"{section}.finite", finite, _EXPONENT_KEYS,
                                violations)
        if "plan" in raw and isinstance(raw["plan"], dict):
            _check_keys("plan", raw["plan"], _PLAN_KEYS, violations)

        grid = raw.get("grid")
        if grid is not None:
            for req in ("dimension", "box", "resolution"):
                if req not in grid:
                    violations.append(f"grid: missing {req!r}")
            if "dimension" in grid and grid["dimension"] not in (1, 2):
                violations.append("grid: dimension must be 1 or 2")
            if "resolution" in grid and (not isinstance(grid["resolution"], int)
                                         or grid["resolution"] < 8):
                violations.append("grid: resolution must be an integer >= 8")
        if grid is not None and "exponent" not in raw:
            violations.append("exponent section required with a grid")

        balls = raw.get("balls", {"policy": "dyadic-radii"})
        if balls.get("policy") not in ("all-pairs", "dyadic-radii",
                                       "centered-only"):
            violations.append(f"balls: unknown policy {balls.get('policy')!r}")

        probes = raw.get("probes", {"recipe": "steps", "count": 10})
        if not isinstance(probes.get("count", 10), int) or probes.get("count", 10) < 1:
            violations.append("probes: count must be a positive integer")

        tol = {"norm_bracket": 1e-10, "stability": 0.10}
        tol.update(raw.get("tolerances", {}))

        refinement = raw.get("refinement")
        if refinement is not None:
            res_list = refinement.get("resolutions")
            if (not isinstance(res_list, list) or not res_list
                    or not all(isinstance(r, int) and r >= 8 for r in res_list)):
                violations.append("refinement: resolutions must be a list of ints >= 8")
        if violations:
            raise ConfigError(violations)

        resolutions = (refinement["resolutions"] if refinement
                       else ([grid["resolution"]] if grid else []))
        return cls(
            name=raw.get("name", "scenario"),
            seed=int(raw.get("seed", 0)),
            grid=grid,
            exponent=raw.get("exponent"),
            exponent_q=raw.get("exponent_q"),
            weight=raw.get("weight", {"kind": "constant", "value": 1.0}),
            operator=raw.get("operator", {"kind": "hardy-littlewood"}),
            balls=balls,
            probes=probes,
            plan=raw.get("plan"),
            vector_valued=raw.get("vector_valued"),
            tolerances=tol,
            output=raw.get("output", {}),
            resolutions=resolutions,
            function=raw.get("function"),
            rdf=raw.get("rdf"),
            weight_class=raw.get("weight_class"),
        )

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    # -- builders -------------------------------------------------------------

    def build_grid(self, resolution: Optional[int] = None) -> Grid:
        g = self.grid
        return Grid(g["dimension"], g["box"], resolution or g["resolution"])

    def build_exponent(self, which: str = "exponent"):
        spec = getattr(self, which)
        if spec is None:
            raise ValueError(f"no {which} section in config")
        return exponent_from_spec(spec, self.grid["box"])

    def build_weight(self) -> Weight:
        spec = self.weight
        if spec["kind"] == "power":
            return Weight.power_weight(float(spec["exponent"]))
        if spec["kind"] == "constant":
            return Weight(constant=float(spec.get("value", 1.0)))
        raise ValueError(f"unknown weight kind {spec['kind']!r}")


def build_function(spec: dict, grid: Grid):
    """Deterministic test functions for the norm/modular/rdf subcommands."""
    from .grids import GridFunction
    import numpy as np
    kind = spec.get("kind")
    if kind == "constant":
        return GridFunction.constant(grid, float(spec["value"]))
    if kind == "affine":
        base, slope = float(spec.get("base", 0.0)), float(spec.get("slope", 1.0))
        return GridFunction.from_callable(grid, lambda x: base + slope * x)
    if kind == "indicator":
        return GridFunction.indicator(grid, float(spec["lo"]), float(spec["hi"]))
    raise ValueError(f"unknown function kind {kind!r}")


def build_operator(spec: dict, balls: BallFamily) -> OperatorHandle:
    kind = spec["kind"]
    return OperatorHandle(kind, balls=balls,
                          alpha=spec.get("alpha"), epsilon=spec.get("epsilon"))


def build_plan(spec: dict):
    """Dispatch a plan section to the matching planner (exact rationals)."""
    from .rationals import XRational

    def xr(key, default=None):
        if key not in spec:
            return default
        return XRational(str(spec[key]))

    scenario = spec.get("scenario")
    if scenario == "diagonal":
        return plan_diagonal(xr("p0"), xr("p_minus"), xr("p_plus"),
                             s=xr("s"), beta1=xr("beta1"))
    if scenario == "offdiagonal":
        return plan_offdiagonal(xr("p0"), xr("q0"), p_minus=xr("p_minus"),
                                q_minus=xr("q_minus"), s=xr("s"),
                                beta1=xr("beta1"))
    if scenario == "limited":
        return plan_limited(xr("q_minus"), xr("q_plus"), xr("p_minus"),
                            xr("p_plus"), p_star=xr("p_star"), s=xr("s"),
                            beta1=xr("beta1"),
                            mode=spec.get("mode", "weighted"))
    if scenario == "limited-reduction":
        return plan_limited_constant_reduction(xr("p"), xr("q_minus"),
                                               xr("q_plus"))
    if scenario == "a1":
        return plan_a1(xr("p0"), xr("p_minus"))
    if scenario == "ainfty":
        return plan_ainfty(xr("p0"), xr("s"), xr("p_minus"))
    if scenario == "delta":
        return plan_corollary_delta(xr("delta"))
    if scenario == "rough-sio":
        return plan_rough_sio(xr("r"))
    raise ValueError(f"unknown plan scenario {scenario!r}")
