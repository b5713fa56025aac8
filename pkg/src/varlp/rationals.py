"""Exact rational scalars with a distinguished +infinity.

All parameter algebra in the extrapolation planner runs on these instead of
floats, so that feasibility windows, conjugate exponents and reduction
identities can be asserted with zero tolerance.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

RationalLike = Union["XRational", Fraction, int, str]

__all__ = ["XRational", "XR", "INF"]


class XRational:
    """A rational number or +infinity, closed under field ops and conjugation.

    The conjugation map is ``t -> t/(t-1)`` with the boundary conventions
    ``conj(1) = inf`` and ``conj(inf) = 1``.  Division by zero and
    indeterminate forms (``inf - inf``, ``inf/inf``, ``0*inf``) raise
    ``ZeroDivisionError`` / ``ArithmeticError`` instead of producing NaNs.
    """

    __slots__ = ("_frac",)

    def __init__(self, value: RationalLike = 0, den: int | None = None):
        if isinstance(value, XRational):
            self._frac = value._frac
        elif isinstance(value, str):
            s = value.strip().lower()
            self._frac = None if s in ("inf", "infinity", "oo") else Fraction(s)
        elif value is None:
            self._frac = None
        else:
            self._frac = Fraction(value, den) if den is not None else Fraction(value)

    # -- basic predicates ---------------------------------------------------

    @property
    def is_infinite(self) -> bool:
        return self._frac is None

    @property
    def fraction(self) -> Fraction:
        if self._frac is None:
            raise ArithmeticError("value is infinite")
        return self._frac

    @property
    def numerator(self) -> int:
        return self.fraction.numerator

    @property
    def denominator(self) -> int:
        return self.fraction.denominator

    # -- conversions ----------------------------------------------------------

    def __float__(self) -> float:
        return float("inf") if self._frac is None else float(self._frac)

    def as_json(self):
        """JSON form: {"num": n, "den": d} for finite values, "inf" otherwise."""
        if self._frac is None:
            return "inf"
        return {"num": self._frac.numerator, "den": self._frac.denominator}

    @classmethod
    def from_json(cls, obj) -> "XRational":
        if obj == "inf":
            return INF
        if isinstance(obj, dict):
            return cls(Fraction(obj["num"], obj["den"]))
        return cls(obj)

    def __repr__(self) -> str:
        return f"XRational({str(self)})"

    def __str__(self) -> str:
        if self._frac is None:
            return "inf"
        if self._frac.denominator == 1:
            return str(self._frac.numerator)
        return f"{self._frac.numerator}/{self._frac.denominator}"

    # -- arithmetic -----------------------------------------------------------

    @staticmethod
    def _coerce(other: RationalLike) -> "XRational":
        return other if isinstance(other, XRational) else XRational(other)

    def __add__(self, other: RationalLike) -> "XRational":
        o = self._coerce(other)
        if self._frac is None or o._frac is None:
            return INF
        return XRational(self._frac + o._frac)

    __radd__ = __add__

    def __sub__(self, other: RationalLike) -> "XRational":
        o = self._coerce(other)
        if self._frac is None and o._frac is None:
            raise ArithmeticError("inf - inf is undefined")
        if self._frac is None:
            return INF
        if o._frac is None:
            raise ArithmeticError("finite - inf is not representable (no -inf)")
        return XRational(self._frac - o._frac)

    def __rsub__(self, other: RationalLike) -> "XRational":
        return self._coerce(other).__sub__(self)

    def __mul__(self, other: RationalLike) -> "XRational":
        o = self._coerce(other)
        if self._frac is None or o._frac is None:
            finite = o if self._frac is None else self
            if not finite.is_infinite and finite._frac == 0:
                raise ArithmeticError("0 * inf is undefined")
            if not finite.is_infinite and finite._frac < 0:
                raise ArithmeticError("negative * inf is not representable")
            return INF
        return XRational(self._frac * o._frac)

    __rmul__ = __mul__

    def __truediv__(self, other: RationalLike) -> "XRational":
        o = self._coerce(other)
        if o._frac is None:
            if self._frac is None:
                raise ArithmeticError("inf / inf is undefined")
            return XRational(0)
        if o._frac == 0:
            raise ZeroDivisionError("division by zero")
        if self._frac is None:
            if o._frac < 0:
                raise ArithmeticError("inf / negative is not representable")
            return INF
        return XRational(self._frac / o._frac)

    def __rtruediv__(self, other: RationalLike) -> "XRational":
        return self._coerce(other).__truediv__(self)

    def __neg__(self) -> "XRational":
        if self._frac is None:
            raise ArithmeticError("-inf is not representable")
        return XRational(-self._frac)

    def __pow__(self, k: int) -> "XRational":
        if not isinstance(k, int):
            raise TypeError("only integer powers are exact")
        if self._frac is None:
            if k <= 0:
                raise ArithmeticError("inf**k undefined for k <= 0")
            return INF
        return XRational(self._frac ** k)

    # -- order ----------------------------------------------------------------

    def __eq__(self, other) -> bool:
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self._frac == o._frac

    def __hash__(self) -> int:
        return hash(("XRational", self._frac))

    def __lt__(self, other: RationalLike) -> bool:
        o = self._coerce(other)
        if self._frac is None:
            return False
        if o._frac is None:
            return True
        return self._frac < o._frac

    def __le__(self, other: RationalLike) -> bool:
        return self == other or self < other

    def __gt__(self, other: RationalLike) -> bool:
        return self._coerce(other) < self

    def __ge__(self, other: RationalLike) -> bool:
        return self == other or self > other

    # -- exponent conjugation ---------------------------------------------------

    def conjugate(self) -> "XRational":
        """Dual exponent t/(t-1); conj(1) = inf and conj(inf) = 1."""
        if self._frac is None:
            return XRational(1)
        if self._frac == 1:
            return INF
        if self._frac < 1:
            raise ValueError(f"conjugate undefined for exponent {self} < 1")
        return XRational(self._frac / (self._frac - 1))


def XR(value: RationalLike, den: int | None = None) -> XRational:
    """Shorthand constructor: XR("6/5"), XR(3, 2), XR(2)."""
    return XRational(value, den)


INF = XRational("inf")
