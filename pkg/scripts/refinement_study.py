#!/usr/bin/env python3
"""Refinement study for power-weight class membership.

Sweeps the decay exponent of |x|^-a against the admissibility threshold
n/p_+ and prints the class-constant trend at three resolutions, showing the
bounded/diverging split around the threshold.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from varlp.exponent import affine_exponent
from varlp.grids import Grid, enumerate_balls
from varlp.weights import (ApVarSpec, Weight, power_weight_admissible,
                           refinement_report)

BOX = [(0.0, 1.0)]
RESOLUTIONS = [65, 129, 257]


def main() -> int:
    p = affine_exponent(2.0, [0.25], BOX)
    threshold = 1 / p.p_plus
    print(f"p(x) = 2 + x/4 on [0,1]; admissibility threshold a < {threshold:.4f}")
    for a in (0.0, 0.125, 0.25, 0.4, 0.444, 0.6, 1.0):
        w = Weight.power_weight(-a)

        def make_level(res):
            grid = Grid(1, BOX, res)
            return w, enumerate_balls(grid, "dyadic-radii")

        report = refinement_report(make_level, ApVarSpec(p), RESOLUTIONS)
        admissible = power_weight_admissible(a, p, 1)
        trend = ", ".join(f"{e:.4g}" for e in report.trend)
        print(f"a = {a:5.3f}  admissible = {str(admissible):5}  "
              f"trend = [{trend}]  verdict = {report.verdict}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
