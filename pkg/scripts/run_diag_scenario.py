#!/usr/bin/env python3
"""Run the bundled power-weight scenario end to end and write reports.

Usage: python3 scripts/run_diag_scenario.py [--resolution N] [--seed S]
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from varlp.config import ScenarioConfig
from varlp.harness import run_scenario

CONFIG = pathlib.Path(__file__).resolve().parents[1] / "configs" / "diag_m_powerweight.cfg"


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--resolution", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", default="diag_m_powerweight")
    args = ap.parse_args()

    cfg = ScenarioConfig.load(CONFIG)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.resolution is not None:
        cfg.resolutions = [args.resolution]

    report = run_scenario(cfg)
    print(f"seed={report.seed}")
    print(f"best constant: {report.best_constant:.6f}")
    print(f"trend: {report.trend}")
    print(f"verdict: {report.verdict}")
    for ob in report.obligations:
        print(f"obligation [{ob.status}] {ob.description} "
              f"trend={ob.weight_class.trend}")
    report.write_csv(args.out + ".csv")
    report.write_json(args.out + ".json")
    print(f"wrote {args.out}.csv / {args.out}.json")
    return report.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
