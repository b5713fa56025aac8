import pytest
from fractions import Fraction

from hypothesis import given, strategies as st

from varlp.rationals import INF, XR, XRational


def test_construction_forms():
    assert XR("6/5") == XR(6, 5) == XR(Fraction(6, 5))
    assert XR("inf").is_infinite
    assert XR(3) == 3
    assert str(XR("3/2")) == "3/2"
    assert str(XR(4)) == "4"
    assert str(INF) == "inf"


def test_arithmetic_basics():
    assert XR("1/2") + XR("1/3") == XR("5/6")
    assert XR(2) * XR("3/4") == XR("3/2")
    assert XR(1) - XR("1/4") == XR("3/4")
    assert XR("7/2") / XR(7) == XR("1/2")
    assert -XR("2/3") == XR("-2/3")
    assert XR("3/2") ** 2 == XR("9/4")


def test_infinity_rules():
    assert INF + 5 == INF
    assert INF * XR(3) == INF
    assert XR(3) / INF == 0
    assert INF / XR(2) == INF
    assert (INF > XR(10 ** 9)) and not (INF < INF)
    with pytest.raises(ArithmeticError):
        INF - INF
    with pytest.raises(ArithmeticError):
        INF / INF
    with pytest.raises(ArithmeticError):
        XR(0) * INF
    with pytest.raises(ZeroDivisionError):
        XR(1) / XR(0)


def test_conjugation_boundaries():
    assert XR(1).conjugate() == INF
    assert INF.conjugate() == XR(1)
    assert XR(2).conjugate() == XR(2)
    assert XR(3).conjugate() == XR("3/2")
    assert XR("4/3").conjugate() == XR(4)
    with pytest.raises(ValueError):
        XR("1/2").conjugate()


@given(st.integers(1, 400), st.integers(1, 400))
def test_conjugation_involution(num, den):
    t = 1 + XR(num, den)  # any rational > 1
    assert t.conjugate().conjugate() == t


@given(st.integers(1, 100), st.integers(1, 100))
def test_conjugate_identity(num, den):
    # 1/t + 1/t' = 1
    t = 1 + XR(num, den)
    assert XR(1) / t + XR(1) / t.conjugate() == 1


def test_json_round_trip():
    for v in (XR("6/5"), XR(-3), INF):
        assert XRational.from_json(v.as_json()) == v
    assert XR("3/2").as_json() == {"num": 3, "den": 2}
    assert INF.as_json() == "inf"


def test_ordering():
    vals = [XR(2), XR("3/2"), INF, XR(1)]
    assert sorted(vals) == [XR(1), XR("3/2"), XR(2), INF]
    assert max(XR(0), XR("1/2")) == XR("1/2")


def test_float_conversion():
    assert float(XR("1/4")) == 0.25
    assert float(INF) == float("inf")
