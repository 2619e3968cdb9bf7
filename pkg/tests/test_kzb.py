import pytest
from gmpy2 import mpq

from kzbperiod import freealg as fa
from kzbperiod.curve import Chart, CurveFn, CurveParams
from kzbperiod.formal import ZLSeries, iterated_integral
from kzbperiod.kzb import (
    adjoint_flat_section,
    build_kzb,
    exp_form,
    flatad_three_way,
    integral,
    local_forms,
    residue_at_infinity,
    residue_report,
)
from kzbperiod.metabelian import MetabElt


def test_build_kzb_low_words(c10):
    d = build_kzb(c10, 5)
    assert d.omega["A"] == CurveFn.const(c10, 1)
    assert d.omega["B"] == CurveFn.x(c10)
    # ad_B^2(A) = BBA - 2BAB + ABB carries p2 = -x/2
    assert d.omega["BBA"] == d.p[2] and d.omega["BAB"] == d.p[2] * -2
    assert d.omega_prime["BA"] == d.q[1] and d.omega_prime["AB"] == -d.q[1]
    with pytest.raises(ValueError):
        build_kzb(c10, 1)


@pytest.mark.parametrize("e4,e6", [(1, 0), (0, 1)])
def test_exp_form_matches(e4, e6):
    C = CurveParams(e4, e6)
    d = build_kzb(C, 7)
    assert exp_form(C, 7, prime=False) == d.omega
    assert exp_form(C, 7, prime=True) == d.omega_prime


def test_gauge_identity(cgen):
    d = build_kzb(cgen, 5)
    assert fa.gauge_apply(d.gauge, d.omega) == d.omega_prime


def test_residue(c10, c01):
    for C in (c10, c01):
        d = build_kzb(C, 6)
        assert residue_at_infinity(d) == MetabElt(6, {(0, 0): -1})
        rep = residue_report(d)
        assert rep.ok and not rep.polar_B and rep.higher_poles == []


def test_residue_detects_wrong_f_sign(c10):
    # flipping f leaves a double pole in the B-coefficient
    d = build_kzb(c10, 4)
    from dataclasses import replace

    f = -d.f
    x = CurveFn.x(c10)
    wrong = fa.NCSeries(4, dict(d.omega_prime.items()))
    wrong = wrong - fa.NCSeries(4, {"B": d.omega_prime["B"]}) + fa.NCSeries(4, {"B": x - f.D()})
    rep = residue_report(replace(d, omega_prime=wrong))
    assert rep.higher_poles


def test_adjoint_low_coefficients(c10, pt44):
    M = 10
    d = build_kzb(c10, 4)
    Gs, G = adjoint_flat_section(d, pt44, False, M)
    assert Gs[(1, 0)] == integral(CurveFn.x(c10), pt44, M)
    assert Gs[(0, 1)] == integral(CurveFn.const(c10, 1), pt44, M)
    F = local_forms(d, pt44, False, M, 3)
    assert G[(0, 0)] == iterated_integral([F.a, F.b])


def test_adjoint_tangential_g00(c10):
    M = 8
    inf = Chart.infinity(c10)
    d = build_kzb(c10, 3)
    Gs, G = adjoint_flat_section(d, inf, True, M)
    F = local_forms(d, inf, True, M, 2)
    want = iterated_integral([F.a, F.b]) - iterated_integral([F.a * F.c[1]])
    assert G[(0, 0)] == want
    assert G[(0, 0)].log_degree() >= 1


def test_adjoint_differential_system(c10, pt44):
    # dG*[u,v] = b G*[u-1,v] + a G*[u,v-1]
    M = 9
    d = build_kzb(c10, 5)
    Gs, _ = adjoint_flat_section(d, pt44, False, M)
    F = local_forms(d, pt44, False, M, 4)
    for (u, v), s in Gs.items():
        if u + v == 0:
            continue
        rhs = ZLSeries.constant(0, M)
        if u:
            rhs = rhs + F.b * Gs[(u - 1, v)]
        if v:
            rhs = rhs + F.a * Gs[(u, v - 1)]
        assert s.derivative() == rhs.truncate(M - 1)


@pytest.mark.parametrize("pt", [(11, 72), (11, -72)])
def test_three_way_other_curve(c01, pt):
    chart = Chart.point(c01, *pt)
    res = flatad_three_way(build_kzb(c01, 5), chart, False, 10, 5)
    assert res["recursion_vs_generating"] == [] and res["recursion_vs_free"] == []


def test_three_way_generic_tangential(cgen):
    res = flatad_three_way(build_kzb(cgen, 5), Chart.infinity(cgen), True, 8, 5)
    assert res["recursion_vs_generating"] == [] and res["recursion_vs_free"] == []


def test_unknown_method(c10, pt44):
    with pytest.raises(ValueError):
        adjoint_flat_section(build_kzb(c10, 3), pt44, False, 4, method="magic")
