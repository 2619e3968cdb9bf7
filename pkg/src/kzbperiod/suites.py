"""Verification suites: each returns a list of :class:`Case` records.

Every check is an exact comparison.  Suites are deterministic for a given
seed; cases are emitted in a fixed order.
"""
from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass, field
from typing import Callable

from gmpy2 import mpq

from . import freealg as fa
from .curve import (
    Chart,
    CurveFn,
    CurveParams,
    P_k_expansion_matches,
    e_recurrence,
    e_value,
    pq_coeffs,
    weierstrass_expansion,
    weil_recurrence_report,
    wp_k,
)
from .formal import (
    BivarSeries,
    CancellationError,
    ZLSeries,
    _E,
    bernoulli,
    iterated_integral,
    kernel_bch,
    kernel_T,
    substitute_kurlin,
)
from .kzb import build_kzb, exp_form, flatad_three_way, local_forms, residue_report
from .metabelian import (
    MetabElt,
    ad,
    adaverage,
    exp_data,
    exp_op,
    grouplike_log,
    grouplike_log_closed,
    log_from_exp_op,
    metab_bch,
    random_elt,
)
from .period import period_map_oracle, verify_theorems

log = logging.getLogger(__name__)

CURVE_10 = CurveParams(1, 0)
CURVE_01 = CurveParams(0, 1)
CURVE_GENERIC = CurveParams(mpq(2, 3), mpq(-5, 7))


@dataclass
class Case:
    suite: str
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {"suite": self.suite, "case": self.name, "ok": self.ok, "detail": self.detail}


def _case(suite: str, name: str, fn: Callable[[], tuple[bool, dict]]) -> Case:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed case with its reason
        log.exception("case %s/%s raised", suite, name)
        ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
    return Case(suite, name, bool(ok), detail, time.perf_counter() - t0)


# ---------------------------------------------------------------------------

def suite_curve(seed: int = 0) -> list[Case]:
    out = []
    for C in (CURVE_10, CURVE_01, CURVE_GENERIC):
        tag = f"e4={C.e4},e6={C.e6}"

        def ode(C=C):
            x, y = weierstrass_expansion(C, 36)
            res = (y * y - 4 * x ** 3 + 60 * C.e4 * x + 140 * C.e6).truncate(30)
            return not res, {"order": 30}

        def odd(C=C):
            vals = {k: wp_k(C, k, 2)[1] for k in range(3, 16, 2)}
            return all(v == 0 for v in vals.values()), {"checked": sorted(vals)}

        def laurent(C=C):
            bad = [k for k in range(2, 11) if not P_k_expansion_matches(C, k, 12)]
            return not bad, {"mismatched_k": bad}

        def weil(C=C):
            bad = weil_recurrence_report(C, 12)
            return not bad, {"violations": bad}

        def erec(C=C):
            corr = e_recurrence(C, 16, "corrected")
            printed = e_recurrence(C, 16, "printed")
            ok = all(corr[k] == e_value(C, k) for k in corr)
            printed_bad = [k for k in printed if printed[k] != e_value(C, k)]
            return ok, {"corrected_agrees": ok, "printed_variant_disagrees_at": printed_bad}

        out += [
            _case("curve", f"wp_ode_residual[{tag}]", ode),
            _case("curve", f"odd_e_vanish[{tag}]", odd),
            _case("curve", f"P_k_laurent[{tag}]", laurent),
            _case("curve", f"product_recurrence[{tag}]", weil),
            _case("curve", f"e_recurrence[{tag}]", erec),
        ]
    return out


def suite_pq(seed: int = 0) -> list[Case]:
    out = []
    for C in (CURVE_10, CURVE_01):
        tag = f"e4={C.e4},e6={C.e6}"

        def partitions(C=C):
            pq_coeffs.cache_clear()
            p, q = pq_coeffs(C, 8)
            return True, {"p2": str(p[2]), "p3": str(p[3]), "q1": str(q[1])}

        def expforms(C=C):
            data = build_kzb(C, 9)
            a = exp_form(C, 9, prime=False) == data.omega
            b = exp_form(C, 9, prime=True) == data.omega_prime
            return a and b, {"omega": a, "omega_prime": b, "ad_B_degree": 8}

        out += [_case("pq", f"partition_vs_exponential[{tag}]", partitions), _case("pq", f"connection_exp_form[{tag}]", expforms)]
    return out


def suite_gauge(seed: int = 0) -> list[Case]:
    out = []
    for C in (CURVE_10, CURVE_01, CURVE_GENERIC):

        def run(C=C):
            d = build_kzb(C, 6)
            new = fa.gauge_apply(d.gauge, d.omega)
            bad = [w for w in fa.words(6) if new[w] != d.omega_prime[w]]
            return not bad, {"depth": 6, "mismatched_words": bad}

        out.append(_case("gauge", f"exp(-fB)_carries_omega_to_omega_prime[e4={C.e4},e6={C.e6}]", run))
    return out


def suite_residue(seed: int = 0) -> list[Case]:
    out = []
    for C in (CURVE_10, CURVE_01, CURVE_GENERIC):

        def run(C=C):
            rep = residue_report(build_kzb(C, 6), M=4)
            return rep.ok, {
                "residue": repr(rep.residue),
                "higher_order_poles": rep.higher_poles,
                "polar_B_part": str(rep.polar_B),
            }

        out.append(_case("residue", f"residue_is_[B,A][e4={C.e4},e6={C.e6}]", run))
    return out


def suite_hodge(seed: int = 0) -> list[Case]:
    def kzb():
        d = build_kzb(CURVE_10, 6)
        rep = fa.hodge_check(d.omega, d.omega_prime, d.gauge)
        return rep.ok, rep.to_json()

    def naive():
        rep = fa.hodge_check(fa.naive_form(CURVE_10, 6))
        return rep.ok, rep.to_json()

    def negative():
        bad = fa.naive_form(CURVE_10, 6) + fa.NCSeries(6, {"AA": CurveFn.x(CURVE_10)})
        rep = fa.hodge_check(bad)
        return not rep.ok, {"expected_violation": rep.violations}

    return [
        _case("hodge", "kzb_pair_and_gauge", kzb),
        _case("hodge", "naive_connection", naive),
        _case("hodge", "negative_control_detected", negative),
    ]


def _localize_functions(S: fa.NCSeries, chart: Chart, M: int) -> fa.NCSeries:
    from .curve import local_expand

    return S.map_coeffs(lambda g: local_expand(g if isinstance(g, CurveFn) else CurveFn.const(chart.curve, g), chart, M))


def suite_universality(seed: int = 0) -> list[Case]:
    C = CURVE_10
    chart = Chart.point(C, 4, 4)
    N = 4

    def residual():
        omega = build_kzb(C, N).omega
        nm = fa.normalize_to_naive(omega, chart)
        res = nm.residual(omega)
        return not res, {"steps": len(nm.steps), "A_hat": repr(nm.A_hat), "B_hat": repr(nm.B_hat)}

    def transport():
        M = 12
        omega = build_kzb(C, N).omega
        nm = fa.normalize_to_naive(omega, chart)
        G = fa.flat_section(fa.localize(omega, chart, M - 1), M=M)
        G0 = fa.flat_section(fa.localize(fa.naive_form(C, N), chart, M - 1), M=M)
        lhs = fa.nc_mul(_localize_functions(nm.gauge, chart, M), G)
        rhs = fa.substitute(G0, nm.substitution())
        return lhs == rhs, {"order": M}

    return [_case("universality", "normalization_residual", residual), _case("universality", "transport_matches", transport)]


def random_lie(rng: random.Random, N: int, terms: int = 6) -> fa.NCSeries:
    """Random primitive series: generators plus a few random bracket monomials."""
    S = fa.NCSeries(N, {"A": mpq(rng.randint(-3, 3), rng.randint(1, 3)), "B": mpq(rng.randint(-3, 3), rng.randint(1, 3))})
    for _ in range(terms):
        n = rng.randint(2, N)
        w = "".join(rng.choice("AB") for _ in range(n))
        S = S + lie_bracket(w, N).scale(mpq(rng.randint(-4, 4), rng.randint(1, 5)))
    return S


def lie_bracket(w: str, N: int) -> fa.NCSeries:
    """Left-normed bracket ``[..[w1, w2], .., wn]`` expanded in the free algebra."""
    S = fa.NCSeries.gen(N, w[0])
    for letter in w[1:]:
        L = fa.NCSeries.gen(N, letter)
        S = fa.nc_mul(S, L) - fa.nc_mul(L, S)
    return S


def suite_bch(seed: int = 0, pairs: int = 50, N: int = 8) -> list[Case]:
    rng = random.Random(seed)
    out = []
    for i in range(pairs):
        X, Y = random_lie(rng, N), random_lie(rng, N)

        def run(X=X, Y=Y, i=i):
            Z = fa.nc_log(fa.nc_mul(fa.nc_exp(X), fa.nc_exp(Y)))
            check = i < 3
            lhs = fa.project_metab(Z, N, check=check)
            rhs = metab_bch(fa.project_metab(X, N, check=check), fa.project_metab(Y, N, check=check))
            alt = fa.project_metab(Z, N, bracketing="right", check=False)
            return lhs == rhs and alt == lhs, {"degree": N, "right_normed_agrees": alt == lhs}

        out.append(_case("bch", f"pair{i:02d}", run))
    return out


def suite_flatad(seed: int = 0) -> list[Case]:
    C = CURVE_10

    def run():
        d = build_kzb(C, 8)
        res = flatad_three_way(d, Chart.point(C, 4, 4), False, 20, 8)
        ok = not res["recursion_vs_generating"] and not res["recursion_vs_free"]
        return ok, {
            "indices": "r+s<=6",
            "order": 20,
            "recursion_vs_generating": res["recursion_vs_generating"],
            "recursion_vs_free": res["recursion_vs_free"],
        }

    def tangential():
        d = build_kzb(C, 7)
        res = flatad_three_way(d, Chart.infinity(C), True, 12, 7)
        ok = not res["recursion_vs_generating"] and not res["recursion_vs_free"]
        return ok, {"recursion_vs_generating": res["recursion_vs_generating"], "recursion_vs_free": res["recursion_vs_free"]}

    return [_case("flatad", "three_way[e4=1,e6=0,basepoint=4,4]", run), _case("flatad", "three_way[tangential]", tangential)]


def suite_logarithm(seed: int = 0, count: int = 50, N: int = 6) -> list[Case]:
    rng = random.Random(seed)
    out = []
    for i in range(count):
        u = random_elt(rng, N)

        def run(u=u):
            M = exp_op(ad(MetabElt(N + 1, dict(u.items()))))
            back = log_from_exp_op(M)
            Hstar, H = exp_data(u)
            closed = grouplike_log_closed(H, u.cA, u.cB, N)
            tri = grouplike_log(Hstar, H, u.cA, u.cB, depth=N)
            return back == u and closed == u.sigma and tri == u.sigma, {
                "round_trip": back == u,
                "closed_form_agrees": closed == u.sigma,
            }

        out.append(_case("logarithm", f"element{i:02d}", run))
    return out


def suite_adaverage(seed: int = 0) -> list[Case]:
    out = []
    for n in range(1, 9):
        for i in range(n + 1):
            rep = adaverage(i, n - i)
            out.append(Case("adaverage", f"i={i},j={n - i}", rep.ok, rep.to_json()))
    return out


def suite_kernels(seed: int = 0, D: int = 12) -> list[Case]:
    from math import factorial

    def ident1():
        lhs = BivarSeries({(s, r): mpq(1, (r + s + 1) * factorial(r) * factorial(s)) for r in range(D + 1) for s in range(D + 1 - r)}, D)
        return lhs == _E(1, 1, D), {"degree": D}

    def ident2():
        lhs = BivarSeries(
            {(s, r): mpq(1, (r + s + 2) * factorial(r) * factorial(s + 1)) for r in range(D + 1) for s in range(D + 1 - r)}, D
        )
        rhs = (_E(1, 1, D + 1) - _E(0, 1, D + 1)).divide_linear(1, 0)
        try:
            (_E(1, 1, D + 1) - _E(1, 0, D + 1)).divide_linear(1, 0)
            printed = "holomorphic"
        except CancellationError as exc:
            printed = f"not holomorphic at {exc.monomials[:3]}"
        return lhs == rhs, {"degree": D, "variant_with_e^X": printed}

    def tdef():
        T = kernel_T(D)
        n = D + 1
        lhs = BivarSeries({(i + 1, j): v for (i, j), v in T.coeffs.items()}, n)
        rhs = BivarSeries.one(n) - _E(0, 1, n) * (_E(1, 1, n).inverse())
        return lhs == rhs.truncate(n), {"relation": "U*T = 1 - E(V)/E(U+V)"}

    def literal():
        found = {}
        for name, fn in (("T", lambda: kernel_T(4, "literal")), ("S", lambda: kernel_bch(4, "literal"))):
            try:
                fn()
                found[name] = "power series"
            except CancellationError as exc:
                found[name] = f"singular: {exc.monomials[:3]}"
        return True, found

    def bch_kernel():
        return kernel_bch(D) == substitute_kurlin(D), {"degree": D}

    def bern():
        M = 20
        gen = BivarSeries({(m, 0): bernoulli(m) / factorial(m) for m in range(M + 1)}, M)
        one_minus = BivarSeries({(m, 0): mpq((-1) ** (m + 1), factorial(m)) for m in range(1, M + 1)}, M)
        prod = gen * one_minus
        return prod == BivarSeries({(1, 0): 1}, M), {"order": M}

    return [
        _case("kernels", "exp_identity", ident1),
        _case("kernels", "shifted_exp_identity", ident2),
        _case("kernels", "kernel_T_relation", tdef),
        _case("kernels", "literal_kernels", literal),
        _case("kernels", "bch_kernel_substitution", bch_kernel),
        _case("kernels", "bernoulli_generating_function", bern),
    ]


def _theorem(suite: str, C: CurveParams, chart: Chart, N: int, M: int) -> Case:
    def run():
        rep = verify_theorems(C, chart, N, M)
        return rep.ok, rep.to_json()

    return _case(suite, f"depth={N},order={M},chart={chart.describe()}", run)


def suite_theorem1(seed: int = 0) -> list[Case]:
    C = CURVE_10
    chart = Chart.point(C, 4, 4)
    return [_theorem("theorem1", C, chart, 2, 20), _theorem("theorem1", C, chart, 3, 20), _theorem("theorem1", C, chart, 6, 20)]


def suite_theorem2(seed: int = 0) -> list[Case]:
    out = [_theorem("theorem2", CURVE_10, Chart.infinity(CURVE_10), N, 20) for N in (2, 3, 5)]
    out.append(_theorem("theorem2", CURVE_GENERIC, Chart.infinity(CURVE_GENERIC), 5, 20))
    return out


def sigma00_matches(C: CurveParams, chart: Chart, M: int = 20) -> tuple[bool, dict]:
    res = period_map_oracle(C, chart, 2, M)
    F = local_forms(build_kzb(C, 2), chart, False, M, 1)
    want = iterated_integral([F.a, F.b]).truncate(M)
    got = res.sigma.get((0, 0), ZLSeries.constant(0, M))
    return got == want, {"sigma00_leading": str(got.terms()[:2])}


def suite_determinism(seed: int = 0) -> list[Case]:
    from .cli import main

    def bytes_equal():
        import contextlib
        import io

        runs = []
        for _ in range(2):
            buf = io.StringIO()
            with contextlib.redirect_stdout(buf):
                main(["period-map", "--e4", "1", "--e6", "0", "--basepoint", "4,4", "--depth", "3", "--order", "8", "--method", "both"])
                main(["curve-data", "--e4=2/3", "--e6=-5/7", "--max-k", "6"])
                main(["verify", "--suite", "logarithm", "--seed", str(seed)])
            runs.append(buf.getvalue())
        return runs[0] == runs[1], {"bytes": len(runs[0])}

    out = [_case("determinism", "repeated_runs_identical", bytes_equal)]
    for C, pt in ((CURVE_10, (4, 4)), (CURVE_10, (4, -4)), (CURVE_01, (11, 72))):
        chart = Chart.point(C, *pt)
        out.append(_case("determinism", f"sigma00_is_I(alpha,beta)[e4={C.e4},e6={C.e6},basepoint={chart.describe()}]", lambda C=C, chart=chart: sigma00_matches(C, chart)))
    return out


SUITES: dict[str, Callable[..., list[Case]]] = {
    "curve": suite_curve,
    "pq": suite_pq,
    "gauge": suite_gauge,
    "residue": suite_residue,
    "hodge": suite_hodge,
    "universality": suite_universality,
    "bch": suite_bch,
    "flatad": suite_flatad,
    "logarithm": suite_logarithm,
    "adaverage": suite_adaverage,
    "kernels": suite_kernels,
    "theorem1": suite_theorem1,
    "theorem2": suite_theorem2,
    "determinism": suite_determinism,
}


def run_suite(name: str, seed: int = 0) -> list[Case]:
    if name == "all":
        out = []
        for key in SUITES:
            out += SUITES[key](seed)
        return out
    return SUITES[name](seed)
