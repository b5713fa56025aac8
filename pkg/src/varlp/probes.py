"""Seeded probe families for empirical norm-inequality testing.

A probe is described in real coordinates (breakpoints, centers, amplitudes),
drawn once from a seeded generator, and can then be sampled onto any grid.
That makes refinement trends meaningful: the same function family is seen at
every resolution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np

from .grids import Grid, GridFunction

__all__ = ["ProbeFamily", "RECIPES"]

RECIPES = ("steps", "bumps", "random-piecewise", "oscillatory", "constant")


def _draw(kind: str, rng: np.random.Generator, box) -> dict:
    lo, hi = box[0]
    length = hi - lo
    if kind == "constant":
        return {"level": rng.uniform(0.5, 1.5)}
    if kind == "steps":
        k = int(rng.integers(3, 9))
        breaks = np.sort(rng.uniform(lo, hi, size=k - 1))
        levels = rng.uniform(0.2, 2.0, size=k)
        return {"breaks": breaks, "levels": levels}
    if kind == "bumps":
        m = int(rng.integers(2, 6))
        return {
            "centers": rng.uniform(lo, hi, size=m),
            "widths": rng.uniform(0.05, 0.3, size=m) * length,
            "amps": rng.uniform(0.3, 1.5, size=m),
            "baseline": 0.1,
        }
    if kind == "random-piecewise":
        k = int(rng.integers(4, 10))
        knots = np.concatenate([[lo], np.sort(rng.uniform(lo, hi, size=k)), [hi]])
        vals = rng.uniform(0.1, 2.0, size=knots.size)
        return {"knots": knots, "vals": vals}
    if kind == "oscillatory":
        return {
            "a": rng.uniform(0.8, 1.5),
            "b": rng.uniform(0.2, 0.6),
            "omega": rng.uniform(1.0, 6.0) * 2 * np.pi / length,
            "phase": rng.uniform(0.0, 2 * np.pi),
        }
    raise ValueError(f"unknown probe recipe: {kind!r}")


def _sample(kind: str, desc: dict, grid: Grid) -> GridFunction:
    if grid.dimension == 1:
        x = grid.axis(0)
        if kind == "constant":
            vals = np.full_like(x, desc["level"])
        elif kind == "steps":
            vals = desc["levels"][np.searchsorted(desc["breaks"], x)]
        elif kind == "bumps":
            vals = np.full_like(x, desc["baseline"])
            for c, w, a in zip(desc["centers"], desc["widths"], desc["amps"]):
                vals = vals + a * np.exp(-((x - c) / w) ** 2)
        elif kind == "random-piecewise":
            vals = np.interp(x, desc["knots"], desc["vals"])
        else:
            vals = desc["a"] + desc["b"] * np.sin(desc["omega"] * x + desc["phase"])
        return GridFunction(grid, vals)

    pts = grid.points()
    if kind == "constant":
        vals = np.full(grid.node_count, desc["level"])
    elif kind == "bumps":
        vals = np.full(grid.node_count, desc["baseline"])
        for c, w, a in zip(desc["centers"], desc["widths"], desc["amps"]):
            d2 = (pts[:, 0] - c) ** 2 + (pts[:, 1] - c) ** 2
            vals = vals + a * np.exp(-d2 / w ** 2)
    elif kind == "oscillatory":
        vals = desc["a"] + desc["b"] * np.sin(desc["omega"] * pts.sum(axis=1)
                                              + desc["phase"])
    else:
        raise ValueError(f"recipe {kind!r} is 1-D only")
    return GridFunction(grid, vals.reshape(grid.shape))


@dataclass
class ProbeFamily:
    """Seeded family of probe descriptions, samplable on any grid.

    ``pair_mode`` is "plain" (the harness applies the operator itself) or
    "pairs" (descriptions come in (left, right) pairs supplied externally).
    """

    recipe: str
    count: int
    seed: int
    box: tuple
    descriptions: List[dict] = field(default_factory=list)
    pair_mode: str = "plain"
    include_constant: bool = True

    @classmethod
    def generate(cls, recipe: str, count: int, seed: int, box,
                 include_constant: bool = True) -> "ProbeFamily":
        if recipe not in RECIPES:
            raise ValueError(f"unknown probe recipe: {recipe!r}")
        rng = np.random.default_rng(seed)
        descs = []
        if include_constant:
            descs.append(("constant", {"level": 1.0}))
        for _ in range(count):
            descs.append((recipe, _draw(recipe, rng, box)))
        return cls(recipe=recipe, count=count, seed=seed,
                   box=tuple(tuple(b) for b in box), descriptions=descs,
                   include_constant=include_constant)

    def materialize(self, grid: Grid) -> List[GridFunction]:
        return [_sample(kind, desc, grid) for kind, desc in self.descriptions]

    def labels(self) -> List[str]:
        return [kind for kind, _ in self.descriptions]
