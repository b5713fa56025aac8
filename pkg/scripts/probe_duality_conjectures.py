#!/usr/bin/env python3
"""Optional experiment: probe two open duality questions, drawing no conclusions.

(a) Does probe-level boundedness of the maximal operator on the weighted
    primal space come with comparable probe-level boundedness on the dual
    side (conjugate exponent, inverse weight)?
(b) Do an unweighted bound plus class membership of the weight come with a
    weighted bound at comparable size?

Both are printed as empirical lower-bound estimates only: a finite probe
family can refute nothing and confirm nothing here.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from varlp.exponent import affine_exponent, conjugate
from varlp.grids import Grid, enumerate_balls
from varlp.operators import OperatorHandle, estimate_operator_norm
from varlp.probes import ProbeFamily
from varlp.weights import ApVarSpec, Weight, class_constant

BOX = [(0.0, 1.0)]


def main() -> int:
    grid = Grid(1, BOX, 257)
    balls = enumerate_balls(grid, "dyadic-radii")
    M = OperatorHandle("hardy-littlewood", balls=balls)
    p = affine_exponent(2.0, [0.25], BOX)
    probes = ProbeFamily.generate("steps", 25, seed=42, box=BOX).materialize(grid)

    for a in (0.125, 0.25):
        w = Weight.power_weight(-a)
        primal = estimate_operator_norm(M, p, w, probes)
        dual = estimate_operator_norm(M, conjugate(p), w.inverse(), probes)
        const = class_constant(w, ApVarSpec(p), balls).estimate
        unweighted = estimate_operator_norm(M, p, Weight.one(), probes)
        print(f"w = |x|^-{a}:")
        print(f"  (a) primal estimate {primal:.4f}   dual estimate {dual:.4f}")
        print(f"  (b) unweighted estimate {unweighted:.4f}   "
              f"class constant {const:.4f}   weighted estimate {primal:.4f}")
    print("estimates are probe lower bounds; no conclusions drawn")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
