"""Command-line entry point.

Subcommands: norm, modular, weight-const, rdf, plan, verify, report.
Exit codes: 0 all pass, 1 completed with warnings, 2 errors/bad usage.
Rational plan flags ("6/5", "inf") are parsed exactly, never through floats;
--json output carries the same numeric content as the human tables.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .config import ConfigError, ScenarioConfig, build_function, build_plan
from .grids import Grid, enumerate_balls
from .harness import run_scenario
from .norms import NormSettings, luxemburg_norm, modular
from .operators import OperatorHandle
from .planner import InfeasibleParameterError, PlannerRedirect
from .rdf import RdFConfig, rdf_iterate_with_log
from .weights import (A1Spec, ApqSpec, ApqVarSpec, ApSpec, ApVarSpec, RHSpec,
                      refinement_report)

__all__ = ["main", "run"]


def _load_config(path) -> ScenarioConfig:
    return ScenarioConfig.load(path)


def _norm_inputs(cfg: ScenarioConfig, resolution=None):
    grid = cfg.build_grid(resolution)
    f = build_function(cfg.function, grid)
    p = cfg.build_exponent()
    return grid, f, p


def _cmd_norm(args) -> int:
    cfg = _load_config(args.config)
    grid, f, p = _norm_inputs(cfg, args.resolution)
    settings = NormSettings(bracket_tol=cfg.tolerances["norm_bracket"])
    res = luxemburg_norm(f, p, settings)
    payload = {"value": res.value, "iterations": res.bisection_iterations,
               "bracket_width": res.bracket_width,
               "modular_at_value": res.modular_at_value,
               "resolution": grid.resolution}
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(f"norm value={res.value:.8f} iterations={res.bisection_iterations} "
              f"bracket={res.bracket_width:.3e} modular={res.modular_at_value:.8f}")
    return 0


def _cmd_modular(args) -> int:
    cfg = _load_config(args.config)
    grid, f, p = _norm_inputs(cfg, args.resolution)
    value = modular(f, p)
    if args.json:
        print(json.dumps({"modular": value, "resolution": grid.resolution},
                         sort_keys=True))
    else:
        print(f"modular value={value:.8f}")
    return 0


def _weight_class_spec(cfg: ScenarioConfig):
    wc = cfg.weight_class
    if wc is None:
        raise ConfigError(["weight_class section required"])
    tag = wc["class"]
    if tag == "A_p":
        return ApSpec(float(wc["p"]))
    if tag == "A_1":
        return A1Spec()
    if tag == "RH_s":
        return RHSpec(float(wc["s"]))
    if tag == "A_pvar":
        return ApVarSpec(cfg.build_exponent())
    if tag == "A_pq":
        return ApqSpec(float(wc["p"]), float(wc["q"]))
    if tag == "A_pqvar":
        return ApqVarSpec(cfg.build_exponent("exponent"),
                          cfg.build_exponent("exponent_q"),
                          float(wc["gamma"]))
    raise ConfigError([f"unknown weight class {tag!r}"])


def _cmd_weight_const(args) -> int:
    cfg = _load_config(args.config)
    spec = _weight_class_spec(cfg)
    weight = cfg.build_weight()
    policy = cfg.balls["policy"]

    def make_level(res):
        grid = cfg.build_grid(res)
        return weight, enumerate_balls(grid, policy)

    report = refinement_report(make_level, spec, cfg.resolutions)
    writer = csv.writer(sys.stdout)
    writer.writerow(["class", "params", "family", "resolution",
                     "estimate", "verdict"])
    for res, est in zip(cfg.resolutions, report.trend):
        writer.writerow([report.class_tag, json.dumps(report.params),
                         report.family, res, f"{est:.10g}", report.verdict])
    return 1 if report.verdict == "diverging" else 0


def _cmd_rdf(args) -> int:
    cfg = _load_config(args.config)
    grid = cfg.build_grid(args.resolution)
    h = build_function(cfg.function, grid)
    balls = enumerate_balls(grid, cfg.balls["policy"])
    M = OperatorHandle("hardy-littlewood", balls=balls)
    rinfo = cfg.rdf or {}
    rcfg = RdFConfig(
        operator_norm_bound=float(rinfo.get("operator_norm_bound", 2.0)),
        max_terms=int(rinfo.get("max_terms", 20)),
        tail_tolerance=rinfo.get("tail_tolerance"),
        alpha=float(rinfo.get("alpha", 1.0)),
        beta=float(rinfo.get("beta", 0.0)),
    )
    out, log = rdf_iterate_with_log(h, M, rcfg)
    print(f"seed={cfg.seed} bound={rcfg.operator_norm_bound} "
          f"terms={log.included_terms} tail_tol={log.tail_tolerance:.3e}")
    for k, sup in enumerate(log.term_sups):
        print(f"term {k}: sup={sup:.10e}")
    print(f"sum sup={float(out.values.max()):.10e}")
    return 0


def _plan_from_args(args):
    spec = {"scenario": args.scenario}
    for key in ("p0", "q0", "p_minus", "p_plus", "q_minus", "q_plus",
                "p_star", "s", "beta1", "delta", "r", "p"):
        val = getattr(args, key, None)
        if val is not None:
            spec[key] = val
    if args.mode:
        spec["mode"] = args.mode
    return build_plan(spec)


def _cmd_plan(args) -> int:
    try:
        plan = _plan_from_args(args)
    except PlannerRedirect as exc:
        print(f"redirect: {exc}", file=sys.stderr)
        return 2
    except InfeasibleParameterError as exc:
        msg = str(exc)
        if exc.window is not None:
            msg += f" [window {exc.window.render()}]"
        print(f"infeasible: {msg}", file=sys.stderr)
        return 2
    if args.json:
        if hasattr(plan, "as_json"):
            print(json.dumps(plan.as_json(), sort_keys=True))
        else:
            print(json.dumps({k: (v.as_json() if hasattr(v, "as_json") else v)
                              for k, v in plan.items()}, sort_keys=True,
                             default=str))
    else:
        if hasattr(plan, "render_table"):
            print(plan.render_table())
        elif hasattr(plan, "as_json"):
            print(json.dumps(plan.as_json(), indent=2, sort_keys=True))
        else:
            for k, v in plan.items():
                print(f"{k} = {v}")
    return 0


def _cmd_verify(args) -> int:
    cfg = _load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.resolution is not None:
        cfg.resolutions = [args.resolution]
    if args.policy is not None:
        cfg.balls = {"policy": args.policy}
    report = run_scenario(cfg)
    print(f"scenario={report.scenario_id} seed={report.seed} "
          f"best_constant={report.best_constant:.6g} verdict={report.verdict}")
    for ob in report.obligations:
        print(f"obligation [{ob.status}] {ob.description}")
    for warning in report.warnings:
        print(f"warning: {warning}")
    out = cfg.output
    if args.csv or out.get("csv"):
        report.write_csv(args.csv or out["csv"])
    if args.json_out or out.get("json"):
        report.write_json(args.json_out or out["json"])
    return report.exit_code


def _cmd_report(args) -> int:
    writer = csv.writer(sys.stdout)
    header_written = False
    for path in args.inputs:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            continue
        if not header_written:
            writer.writerow(rows[0])
            header_written = True
        writer.writerows(rows[1:])
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="varlp",
        description="Weighted variable-exponent Lebesgue space toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn in (("norm", _cmd_norm), ("modular", _cmd_modular)):
        p = sub.add_parser(name, help=f"compute the {name} from a config")
        p.add_argument("--config", required=True)
        p.add_argument("--resolution", type=int)
        p.add_argument("--json", action="store_true")
        p.set_defaults(handler=fn)

    p = sub.add_parser("weight-const", help="weight class constant rows (CSV)")
    p.add_argument("--config", required=True)
    p.set_defaults(handler=_cmd_weight_const)

    p = sub.add_parser("rdf", help="run the majorant iteration, print decay log")
    p.add_argument("--config", required=True)
    p.add_argument("--resolution", type=int)
    p.set_defaults(handler=_cmd_rdf)

    p = sub.add_parser("plan", help="exact-rational extrapolation plan")
    p.add_argument("--scenario", required=True,
                   choices=["diagonal", "offdiagonal", "limited",
                            "limited-reduction", "a1", "ainfty", "delta",
                            "rough-sio"])
    for flag in ("p0", "q0", "p-minus", "p-plus", "q-minus", "q-plus",
                 "p-star", "s", "beta1", "delta", "r", "p"):
        p.add_argument(f"--{flag}", dest=flag.replace("-", "_"))
    p.add_argument("--mode", choices=["weighted", "unweighted", "general"])
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_plan)

    p = sub.add_parser("verify", help="run a scenario config end to end")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--resolution", type=int)
    p.add_argument("--policy")
    p.add_argument("--csv")
    p.add_argument("--json-out")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("report", help="merge CSV outputs")
    p.add_argument("inputs", nargs="+")
    p.set_defaults(handler=_cmd_report)
    return parser


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
