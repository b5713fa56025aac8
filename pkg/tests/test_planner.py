import pytest
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from varlp.rationals import INF, XR
from varlp.planner import (ExponentExpr, FeasibilityWindow,
                           InfeasibleParameterError, MaximalObligation,
                           PlannerRedirect, WeightClassObligation,
                           limited_merge_constant, m_pair_obligations,
                           plan_a1, plan_ainfty, plan_corollary_delta,
                           plan_diagonal, plan_limited,
                           plan_limited_constant_reduction, plan_offdiagonal,
                           plan_rough_sio)

rational_gt1 = st.fractions(min_value=Fraction(9, 8), max_value=8,
                            max_denominator=12)


# -- diagonal ---------------------------------------------------------------

def test_diagonal_defaults_emit_m_pair():
    plan = plan_diagonal(XR(2), XR(2))
    assert plan.param("alpha1") == 1
    assert plan.param("beta2") == 1
    assert plan.param("gamma") == XR("1/2")
    assert plan.obligations == m_pair_obligations("p")
    rendered = [ob.render() for ob in plan.obligations]
    assert rendered == ["M bounded on L^{p(.)}(w^{1})",
                        "M bounded on L^{(p(.))'}(w^{-1})"]


def test_diagonal_window():
    plan = plan_diagonal(XR(2), XR("3/2"))
    assert plan.window.lo == XR("1/2") and plan.window.hi == XR("3/2")


@given(p0=rational_gt1, pm=rational_gt1)
@settings(max_examples=150, deadline=None)
def test_diagonal_s_equals_one_always_feasible(p0, pm):
    # p0 - p_-(p0 - 1) < 1 iff p_- > 1, so the default never fails
    plan = plan_diagonal(XR(p0), XR(pm))
    assert plan.window.contains(XR(1))
    assert plan.param("s") == 1


def test_diagonal_infeasible_s_carries_window():
    with pytest.raises(InfeasibleParameterError) as err:
        plan_diagonal(XR(2), XR("3/2"), s=XR(2))
    assert err.value.window == FeasibilityWindow(XR("1/2"), XR("3/2"))


def test_diagonal_p0_one_redirects():
    with pytest.raises(PlannerRedirect) as err:
        plan_diagonal(XR(1), XR(2))
    assert err.value.target == "plan_a1"


# -- off-diagonal -----------------------------------------------------------

def test_offdiagonal_sigma_and_m_pair():
    plan = plan_offdiagonal(XR(2), XR(4), q_minus=XR(3))
    assert plan.param("sigma") == XR("4/3")
    assert plan.param("s") == XR("4/3")
    assert plan.param("alpha1") == XR("4/3")
    expected = [
        MaximalObligation(ExponentExpr("q", XR("4/3"), False, XR(1)), XR("4/3")),
        MaximalObligation(ExponentExpr("q", XR("4/3"), True, XR(1)), XR("-4/3")),
    ]
    assert plan.obligations == expected


def test_offdiagonal_window_example():
    plan = plan_offdiagonal(XR(2), XR(4), q_minus=XR(3))
    # 4 - 3*(3 - 1) = -2, clamped to 0; upper is min(4, 3)
    assert plan.window == FeasibilityWindow(XR(0), XR(3))


def test_offdiagonal_endpoint_branch():
    plan = plan_offdiagonal(XR(1), XR(3))
    assert plan.scenario == "offdiagonal-endpoint"
    [ob] = plan.obligations
    assert ob.expr == ExponentExpr("q", XR(3), True, XR(1))
    assert ob.weight_power == XR(-3)


def test_offdiagonal_equal_exponents_redirect():
    with pytest.raises(PlannerRedirect) as err:
        plan_offdiagonal(XR(3), XR(3))
    assert err.value.target == "plan_diagonal"


@given(p0=rational_gt1, gap_num=st.integers(1, 6), gap_den=st.integers(7, 24))
@settings(max_examples=150, deadline=None)
def test_offdiagonal_alpha1_identity_at_sigma(p0, gap_num, gap_den):
    # with s = sigma, the derived alpha1 = (q0-s)/(q0/sigma - 1) equals sigma
    p0 = XR(p0)
    gap = XR(gap_num, gap_den)
    if XR(1) / p0 <= gap:
        return
    q0 = XR(1) / (XR(1) / p0 - gap)
    sigma = (XR(1) / gap).conjugate()
    plan = plan_offdiagonal(p0, q0, q_minus=q0)
    assert plan.param("alpha1") == sigma


# -- limited range ----------------------------------------------------------

def test_limited_weighted_example():
    plan = plan_limited(XR("6/5"), XR(6), XR(2), XR(3),
                        p_star=XR(2), s=XR("3/2"))
    assert plan.window == FeasibilityWindow(XR(1), XR(2))
    assert plan.param("sigma") == XR(3)
    assert plan.param("c") == XR("1/4")
    assert plan.param("alpha1") == XR("3/4")
    assert plan.param("tau0") == XR(2)
    assert plan.param("beta1") == XR("-9/4")
    assert plan.param("beta2") == XR(0)
    [ob] = plan.obligations
    assert isinstance(ob, WeightClassObligation)
    assert ob.weight_power == XR(3)
    assert ob.expr == ExponentExpr("p", XR("3/4"), False, XR(1))


def test_limited_divergence_form_sigma_is_dimension():
    # q_- = 2n/(n+2) at n = 3 with base exponent 2
    plan = plan_limited(XR("6/5"), XR(6), XR(2), XR(3), p_star=XR(2))
    assert plan.param("sigma") == XR(3)


def test_limited_oscillation_too_large():
    # p_+/p_- = 5/2 >= q_+/q_- = 2: no base exponent at all
    with pytest.raises(InfeasibleParameterError, match="oscillation"):
        plan_limited(XR(2), XR(4), XR(2), XR(5))


def test_limited_base_exists_but_no_s():
    # oscillation fine, but p_- <= q_- leaves no dual parameter
    with pytest.raises(InfeasibleParameterError, match="infeasible s"):
        plan_limited(XR(2), XR(8), XR("3/2"), XR(2))


def test_limited_requested_p_star_out_of_range():
    with pytest.raises(InfeasibleParameterError, match="outside"):
        plan_limited(XR("6/5"), XR(6), XR(2), XR(3), p_star=XR(8))


def test_limited_infinite_q_plus():
    plan = plan_limited(XR("3/2"), INF, XR(2), XR(4))
    assert plan.param("alpha2") == XR(1)
    assert plan.param("beta2") == XR(0)


def test_limited_unweighted_mode():
    plan = plan_limited(XR("6/5"), XR(6), XR(2), XR(3), p_star=XR(2),
                        s=XR("3/2"), mode="unweighted")
    assert all(ob.weight_power == XR(0) for ob in plan.obligations)
    assert plan.obligations[1].expr == ExponentExpr("p", XR("3/2"), True,
                                                    XR("3/2"))


def test_limited_general_mode_alpha_minus_beta():
    plan = plan_limited(XR("6/5"), XR(6), XR(2), XR(3), p_star=XR(2),
                        s=XR("3/2"), beta1=XR("-9/4"), mode="general")
    assert plan.param("alpha1") - plan.param("beta1") == plan.param("sigma")
    assert plan.obligations[0].weight_power == XR(3)


p_star_strategy = st.fractions(min_value=Fraction(5, 4), max_value=6,
                               max_denominator=10)


@given(q_minus=st.fractions(min_value=Fraction(9, 8), max_value=2,
                            max_denominator=8),
       bump=st.fractions(min_value=Fraction(1, 8), max_value=3,
                         max_denominator=8),
       s_frac=st.fractions(min_value=Fraction(1, 10),
                           max_value=Fraction(9, 10), max_denominator=10))
@settings(max_examples=150, deadline=None)
def test_limited_weighted_identities(q_minus, bump, s_frac):
    # alpha1 - beta1 = sigma and beta2 = 0 hold identically in weighted mode
    q_minus = XR(q_minus)
    p_star = q_minus + XR(bump)
    p_minus = p_star  # make the window nonempty with p_- = p_* (hi = p_*)
    q_plus = p_star * 2
    p_plus = p_minus
    if not p_plus / p_minus < q_plus / q_minus:
        return
    plan = plan_limited(q_minus, q_plus, p_minus, p_plus, p_star=p_star)
    assert plan.param("alpha1") - plan.param("beta1") == plan.param("sigma")
    assert plan.param("beta2") == 0
    assert plan.param("c") * plan.param("sigma") == plan.param("alpha1")


def test_limited_merge_constant_matches_formula():
    # merge demands p = (s(q+ - q-) + q-(p* - q+))/(p* - q-)
    mc = limited_merge_constant(XR("6/5"), XR(6), XR(2), XR("3/2"))
    expected = (XR("3/2") * (XR(6) - XR("6/5")) + XR("6/5") * (XR(2) - XR(6))) \
        / (XR(2) - XR("6/5"))
    assert mc == expected


# -- constant-exponent reduction --------------------------------------------

def test_reduction_worked_example():
    rep = plan_limited_constant_reduction(XR(2), XR("4/3"), XR(4))
    assert rep["tau_p"] == XR(2)
    assert rep["s_route1"] == rep["s_route2"] == XR("3/2")
    assert rep["beta2_route1"] == rep["beta2_route2"] == XR(2)
    assert rep["routes_agree"] and rep["s_in_window"]


def test_reduction_near_degenerate_boundary():
    # p just above q_-: tau_p -> 1 and the windows pinch but still agree
    rep = plan_limited_constant_reduction(XR("101/100"), XR(1) + XR(1, 200),
                                          XR(4))
    assert rep["routes_agree"] and rep["s_in_window"]


@given(a=st.fractions(min_value=Fraction(11, 10), max_value=4,
                      max_denominator=12),
       b=st.fractions(min_value=Fraction(1, 6), max_value=3,
                      max_denominator=12),
       c=st.fractions(min_value=Fraction(1, 6), max_value=4,
                      max_denominator=12))
@settings(max_examples=200, deadline=None)
def test_reduction_routes_always_agree(a, b, c):
    q_minus = XR(a)
    p = q_minus + XR(b)
    q_plus = p + XR(c)
    rep = plan_limited_constant_reduction(p, q_minus, q_plus)
    assert rep["routes_agree"]
    assert rep["s_in_window"]


# -- endpoint / A_infinity ---------------------------------------------------

def test_a1_basic_and_quasi():
    plan = plan_a1(XR(1), XR(2))
    [ob] = plan.obligations
    assert ob.expr == ExponentExpr("p", XR(1), True, XR(1))
    assert ob.weight_power == XR(-1)

    with pytest.raises(InfeasibleParameterError, match="only goes up"):
        plan_a1(XR(2), XR("3/2"))

    quasi = plan_a1(XR("1/2"), XR("1/2"))
    [ob] = quasi.obligations
    assert ob.expr.inner == XR("1/2")
    assert ob.weight_power == XR("-1/2")
    assert any("quasi" in note for note in quasi.notes)


def test_ainfty_plan():
    plan = plan_ainfty(XR(3), XR("1/2"), XR(1))
    kinds = [ob.kind for ob in plan.obligations]
    assert kinds == ["weight-class", "maximal-bounded"]
    wc, mx = plan.obligations
    assert wc.expr == ExponentExpr("p", XR("1/2"), False, XR(1))
    assert wc.weight_power == XR("1/2")
    assert mx.weight_power == XR("-1/2")
    # boundary s = p_- is allowed (non-strict)
    plan_ainfty(XR(3), XR(1), XR(1))
    with pytest.raises(InfeasibleParameterError):
        plan_ainfty(XR(3), XR(2), XR(1))


# -- delta corollary ----------------------------------------------------------

def test_delta_ranges():
    r = plan_corollary_delta(XR("1/2"))
    assert (r.q_minus, r.q_plus) == (XR("4/3"), XR(4))
    assert r.jn_tau == XR(2) and r.jn_s == XR(2)

    r = plan_corollary_delta(XR(1))
    assert r.q_minus == XR(1) and r.q_plus.is_infinite

    r = plan_corollary_delta(XR("1/3"))
    assert (r.q_minus, r.q_plus) == (XR("3/2"), XR(3))

    with pytest.raises(ValueError):
        plan_corollary_delta(XR(2))


# -- rough kernels -------------------------------------------------------------

def test_rough_sio_plans():
    plan = plan_rough_sio(XR(2))
    assert plan.param("r_prime") == XR(2)
    assert plan.obligations[0].expr == ExponentExpr("p", XR(2), False, XR(1))
    assert plan.obligations[0].weight_power == XR(2)

    plan = plan_rough_sio(XR("3/2"))
    assert plan.param("r_prime") == XR(3)
    assert plan.param("required_p_minus") == XR(3)

    collapsed = plan_rough_sio(INF)
    assert collapsed.obligations == m_pair_obligations("p")


# -- structural ------------------------------------------------------------------

def test_parameters_strictly_inside_window():
    for plan in (plan_diagonal(XR(3), XR(2)),
                 plan_offdiagonal(XR(2), XR(4), q_minus=XR(3)),
                 plan_limited(XR("6/5"), XR(6), XR(2), XR(3))):
        if plan.window is not None:
            assert plan.window.contains(plan.param("s"))


def test_plan_json_round_trip_values():
    plan = plan_limited(XR("6/5"), XR(6), XR(2), XR(3), p_star=XR(2),
                        s=XR("3/2"))
    blob = plan.as_json()
    assert blob["parameters"]["sigma"] == {"num": 3, "den": 1}
    assert blob["obligations"][0]["kind"] == "weight-class"
    assert blob["window"] == {"lo": {"num": 1, "den": 1},
                              "hi": {"num": 2, "den": 1}}
