"""varlp: desk-scale numerics for weighted variable-exponent Lebesgue spaces.

Submodules
----------
exponent   variable exponent functions, conjugation, log-Holder diagnostics
grids      uniform grids, quadrature, ball families
norms      modular and Luxemburg norm, weighted norms, duality/Holder checks
operators  maximal functions, fractional integral, Hilbert transform
weights    weight representations and class-constant estimation
rdf        the majorant iteration (controlled A_1 weights from a norm bound)
planner    exact-rational parameter solving for the extrapolation scenarios
harness    end-to-end empirical verification of planned inequalities
cli        command-line interface (norm, plan, verify, ...)
"""

from .rationals import INF, XR, XRational

__version__ = "0.1.0"

__all__ = ["XRational", "XR", "INF", "__version__"]
