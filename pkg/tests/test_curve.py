from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from kzbperiod.curve import (
    Chart,
    CurveError,
    CurveFn,
    CurveParams,
    P_k,
    choose_f,
    cohomology_reduce,
    e_recurrence,
    e_value,
    local_expand,
    pq_coeffs,
    weierstrass_expansion,
    weil_recurrence_report,
    wp_k,
)

small_q = st.builds(lambda a, b: mpq(a, b), st.integers(-5, 5), st.integers(1, 4))


def _wp_oracle(e4, e6, n_terms):
    # wp = z^-2 + sum c_n z^(2n); match wp'' = 6 wp^2 - 30 e4 term by term
    e4, e6 = Fraction(e4), Fraction(e6)
    c = {1: 3 * e4, 2: 5 * e6}
    for n in range(3, n_terms + 1):
        # z^(2n-2): (2n)(2n-1) c_n = 6 (2 c_n + sum_{i+j=n-1} c_i c_j)
        s = sum(c[i] * c[n - 1 - i] for i in range(1, n - 1))
        c[n] = 6 * s / ((2 * n) * (2 * n - 1) - 12)
    return c


@pytest.mark.parametrize("e4,e6", [(1, 0), (0, 1), (mpq(2, 3), mpq(-5, 7))])
def test_weierstrass_against_independent_recurrence(e4, e6):
    C = CurveParams(e4, e6)
    x, y = weierstrass_expansion(C, 24)
    want = _wp_oracle(e4, e6, 12)
    assert x.coeff(-2) == 1
    for n, v in want.items():
        assert x.coeff(2 * n) == mpq(v.numerator, v.denominator)
    assert y == x.derivative()


def test_wp_examples():
    C = CurveParams(mpq(2, 3), mpq(-5, 7))
    x, _ = weierstrass_expansion(C, 8)
    assert x.coeff(2) == 3 * C.e4
    assert x.coeff(4) == 5 * C.e6
    assert x.coeff(6) == 3 * C.e4 ** 2
    assert e_value(C, 3) == 0 and e_value(C, 5) == 0
    assert e_value(C, 8) == mpq(3, 7) * C.e4 ** 2


def test_e_recurrence_corrected_agrees():
    C = CurveParams(mpq(-1, 2), mpq(3, 5))
    corr = e_recurrence(C, 16)
    assert corr and all(v == e_value(C, k) for k, v in corr.items())


def test_wp_k_constant_term():
    C = CurveParams(1, 0)
    s, e = wp_k(C, 4, 6)
    assert e == e_value(C, 4) == 1
    assert s.valuation() == -4


def test_P_k_examples(c10):
    assert P_k(c10, 2) == CurveFn.x(c10)
    assert P_k(c10, 3) == CurveFn.y(c10) * mpq(-1, 2)
    assert P_k(c10, 4) == CurveFn.x(c10) ** 2 - 6
    assert str(P_k(c10, 4)) == "x^2 - 6"
    assert str(P_k(c10, 3)) == "-1/2*y"


def test_f_sign_and_holomorphy(c10):
    f = choose_f(c10)
    inf = Chart.infinity(c10)
    loc = local_expand(f, inf, 6)
    assert loc.valuation() == -1 and loc.coeff(-1) == -1
    assert loc.coeff(0) == 0
    # df - beta holomorphic at infinity
    beta = local_expand(CurveFn.x(c10), inf, 6) * inf.alpha(6)
    assert (loc.derivative() - beta).valuation() >= 0
    assert P_k(c10, 1) == -f


def test_pq_examples(c10, cgen):
    p, q = pq_coeffs(cgen, 4)
    x, y = CurveFn.x(cgen), CurveFn.y(cgen)
    assert p[2] == x * mpq(-1, 2)
    assert p[3] == y * mpq(-1, 6)
    assert p[4] == x ** 2 * mpq(1, 8) - (x ** 2 - 6 * cgen.e4) * mpq(1, 4)
    assert q[1] == -choose_f(cgen)


def test_cohomology_examples(c10):
    one = CurveFn.const(c10, 1)
    assert cohomology_reduce(one) == (CurveFn.const(c10, 0), 1, 0)
    assert cohomology_reduce(CurveFn.y(c10)) == (CurveFn.x(c10), 0, 0)
    F, a, b = cohomology_reduce(CurveFn.x(c10) ** 2)
    assert F == CurveFn.y(c10) * mpq(1, 6) and a == 5 * c10.e4 and b == 0


@settings(max_examples=40, deadline=None)
@given(st.lists(small_q, min_size=1, max_size=6), st.lists(small_q, max_size=4))
def test_cohomology_reconstructs(a, b):
    C = CurveParams(mpq(2, 3), mpq(-5, 7))
    eta = CurveFn(C, tuple(a), tuple(b))
    F, ca, cb = cohomology_reduce(eta)
    assert F.D() + ca + CurveFn.x(C) * cb == eta


def test_local_expand_examples(c10, pt44):
    y = local_expand(CurveFn.y(c10), pt44, 3)
    assert y.coeff(0) == 4 and y.coeff(1) == mpq(33, 2)
    x = local_expand(CurveFn.x(c10), Chart.infinity(c10), 4)
    assert x.coeff(-2) == 1 and x.coeff(2) == 3
    assert local_expand(CurveFn.const(c10, mpq(7, 3)), pt44, 5) == mpq(7, 3)


@settings(max_examples=25, deadline=None)
@given(st.lists(small_q, min_size=1, max_size=4), st.lists(small_q, max_size=3), st.sampled_from(["44", "4m4", "inf"]))
def test_local_expand_respects_d(a, b, where):
    C = CurveParams(1, 0)
    chart = {"44": Chart.point(C, 4, 4), "4m4": Chart.point(C, 4, -4), "inf": Chart.infinity(C)}[where]
    g = CurveFn(C, tuple(a), tuple(b))
    M = 8
    lhs = local_expand(g, chart, M + 1).derivative()
    rhs = local_expand(g.D(), chart, M) * chart.alpha(M)
    assert lhs == rhs
    # multiplicative
    assert local_expand(g * g, chart, M) == local_expand(g, chart, M + 6) * local_expand(g, chart, M + 6)


def test_point_on_curve_is_a_zero(c10, pt44):
    x, y = pt44.xy(10)
    assert y * y - 4 * x ** 3 + 60 * x == 0


def test_weil_recurrence_as_printed(c10, cgen):
    assert weil_recurrence_report(c10, 10) == []
    assert weil_recurrence_report(cgen, 10) == []


def test_errors():
    with pytest.raises(CurveError):
        CurveParams(0, 0)
    with pytest.raises(CurveError):
        CurveParams(mpq(1, 20), mpq(1, 140))  # g2 = 3, g3 = 1: double root at x = 1/2
    C = CurveParams(1, 0)
    with pytest.raises(CurveError):
        Chart.point(C, 1, 1)
    with pytest.raises(CurveError):
        Chart.point(C, 0, 0)
