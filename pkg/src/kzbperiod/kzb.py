"""The algebraic KZB connection pair, its gauge, residue and adjoint flat section.

``omega  = alpha A + beta B + alpha sum_{k>=2} p_k ad_B^k(A)`` is regular on the
affine curve; ``omega' = alpha A + (beta - df) B + alpha sum_{k>=1} q_k ad_B^k(A)``
has a simple pole at infinity.  ``exp(-f B)`` carries one to the other.
All global forms are stored as their coefficient of ``alpha = dx/y``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial

from gmpy2 import mpq

from . import freealg as fa
from .curve import Chart, CurveFn, CurveParams, P_k, choose_f, local_expand, pq_coeffs
from .formal import ZLSeries, antiderivative
from .freealg import NCSeries
from .metabelian import MetabElt, decompose_columns, exp_ad_columns

log = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def ad_B_power_words(k: int) -> tuple[tuple[str, int], ...]:
    """``ad_B^k(A) = sum_j (-1)^j C(k, j) B^(k-j) A B^j``."""
    return tuple(("B" * (k - j) + "A" + "B" * j, (-1) ** j * comb(k, j)) for j in range(k + 1))


def _series_from_ad(N: int, base: dict, coeffs: dict) -> NCSeries:
    c = dict(base)
    for k, fn in coeffs.items():
        if k + 1 > N or not fn:
            continue
        for w, m in ad_B_power_words(k):
            c[w] = c[w] + fn * m if w in c else fn * m
    return NCSeries(N, c)


@dataclass
class KZBData:
    params: CurveParams
    N: int
    f: CurveFn
    p: dict
    q: dict
    omega: NCSeries
    omega_prime: NCSeries
    gauge: NCSeries

    @property
    def beta_prime(self) -> CurveFn:
        """``alpha``-coefficient of ``beta - df``."""
        return CurveFn.x(self.params) - self.f.D()


@lru_cache(maxsize=None)
def build_kzb(params: CurveParams, N: int) -> KZBData:
    if N < 2:
        raise ValueError("depth N must be >= 2")
    f = choose_f(params)
    p, q = pq_coeffs(params, max(N, 2))
    one = CurveFn.const(params, 1)
    x = CurveFn.x(params)
    omega = _series_from_ad(N, {"A": one, "B": x}, {k: p[k] for k in range(2, N)})
    omega_prime = _series_from_ad(N, {"A": one, "B": x - f.D()}, {k: q[k] for k in range(1, N)})
    gauge = NCSeries(N, {"B" * k: (-f) ** k * mpq(1, factorial(k)) for k in range(N + 1)})
    return KZBData(params, N, f, p, q, omega, omega_prime, gauge)


def exp_form(params: CurveParams, N: int, prime: bool) -> NCSeries:
    """The connection written as ``beta B + alpha exp(T)(A)`` with ``T`` a power series in ``ad_B``.

    ``T = -sum_{k>=2} (-1)^k P_k ad_B^k / k``, plus ``-f ad_B`` for the primed form.
    ``exp(T)`` is applied by summing ``T^n(A)/n!`` in the free algebra, a
    route independent of the partition sums behind :func:`build_kzb`.
    """
    B = NCSeries.gen(N, "B")
    coeffs = {k: P_k(params, k) * mpq((-1) ** (k + 1), k) for k in range(2, N)}
    if prime:
        coeffs[1] = -choose_f(params)

    def ad_B(S: NCSeries) -> NCSeries:
        return fa.nc_mul(B, S) - fa.nc_mul(S, B)

    def T(S: NCSeries) -> NCSeries:
        out = NCSeries(N)
        cur = S
        for k in range(1, N):
            cur = ad_B(cur)
            if not cur:
                break
            if k in coeffs:
                out = out + cur.scale_left(coeffs[k])
        return out

    one = CurveFn.const(params, 1)
    term = NCSeries(N, {"A": one})
    total = term
    for n in range(1, N):
        term = T(term).scale(mpq(1, n))
        if not term:
            break
        total = total + term
    x = CurveFn.x(params)
    beta = x - choose_f(params).D() if prime else x
    return total + NCSeries(N, {"B": beta})


# ---------------------------------------------------------------------------
# residue at infinity
# ---------------------------------------------------------------------------

@dataclass
class ResidueReport:
    residue: MetabElt
    residue_words: NCSeries
    higher_poles: list
    polar_B: object

    @property
    def ok(self) -> bool:
        target = MetabElt(self.residue.N, {(0, 0): mpq(-1)})
        return not self.higher_poles and self.residue == target and not self.polar_B


def residue_report(data: KZBData, M: int = 4) -> ResidueReport:
    inf = Chart.infinity(data.params)
    loc = fa.localize(data.omega_prime, inf, M)
    res: dict = {}
    higher = []
    for w, s in loc.items():
        for (n, j), c in s.items():
            if n <= -2:
                higher.append({"word": w, "order": n, "value": str(c)})
            elif n == -1:
                res[w] = c
    R = NCSeries(data.N, res)
    return ResidueReport(fa.project_metab(R), R, higher, R["B"])


def residue_at_infinity(data: KZBData) -> MetabElt:
    """Residue of ``omega'`` at infinity, projected to the metabelian quotient."""
    rep = residue_report(data)
    if rep.higher_poles:
        raise ValueError(f"omega' has a pole of order >= 2 at infinity: {rep.higher_poles[:3]}")
    return rep.residue


# ---------------------------------------------------------------------------
# adjoint flat section
# ---------------------------------------------------------------------------

@dataclass
class LocalForms:
    """``dz``-coefficients of ``alpha``, the B-form and the ``ad_B^k(A)`` forms in a chart."""

    a: ZLSeries
    b: ZLSeries
    c: dict  # k -> ZLSeries, k >= 1


def local_forms(data: KZBData, chart: Chart, p1_included: bool, M: int, kmax: int) -> LocalForms:
    params = data.params
    alpha = chart.alpha(M + 4)

    def loc(g: CurveFn) -> ZLSeries:
        return (local_expand(g, chart, M + 2) * alpha).truncate(M)

    if p1_included:
        b = loc(data.beta_prime)
        coeffs = {k: data.q[k] for k in range(1, kmax + 1)}
    else:
        b = loc(CurveFn.x(params))
        coeffs = {k: data.p[k] for k in range(2, kmax + 1)}
    c = {k: loc(v) for k, v in coeffs.items()}
    c.setdefault(1, ZLSeries.constant(0, M))
    return LocalForms(loc(CurveFn.const(params, 1)), b, c)


def _recursion(F: LocalForms, depth: int, M: int) -> tuple[dict, dict]:
    I = antiderivative
    Gs: dict = {(0, 0): ZLSeries.constant(1, M + 1)}
    for n in range(1, depth):
        for u in range(n + 1):
            v = n - u
            acc = ZLSeries.constant(0, M)
            if u:
                acc = acc + F.b * Gs[(u - 1, v)]
            if v:
                acc = acc + F.a * Gs[(u, v - 1)]
            Gs[(u, v)] = I(acc).truncate(M)
    G: dict = {}
    for n in range(0, depth - 1):
        for i in range(n + 1):
            j = n - i
            zero = ZLSeries.constant(0, M)
            if j == 0:
                acc = F.a * Gs[(i + 1, 0)] - F.c.get(i + 1, zero)
                if i:
                    acc = acc + F.b * G[(i - 1, 0)]
            else:
                acc = F.a * G[(i, j - 1)]
                if i:
                    acc = acc + F.b * G[(i - 1, j)]
            G[(i, j)] = I(acc).truncate(M)
    return Gs, G


def _generating(F: LocalForms, depth: int, M: int) -> tuple[dict, dict]:
    """Expand ``(1 - beta X - alpha Y)^-1 C(X)`` with ``C = sum_i (alpha beta^(i+1) - alpha p_(i+1)) X^i``.

    The coefficient of ``X^i Y^j`` is a sum of words in the forms; each
    word is integrated as an iterated integral (outer form first).
    """
    forms = {"a": F.a, "b": F.b, **{f"c{k}": v for k, v in F.c.items()}}
    cache: dict = {(): ZLSeries.constant(1, M + 1)}

    def II(word: tuple) -> ZLSeries:
        if word not in cache:
            cache[word] = antiderivative(forms[word[0]] * II(word[1:])).truncate(M)
        return cache[word]

    def prefixes(nb: int, na: int):
        if nb == 0 and na == 0:
            yield ()
            return
        if nb:
            for rest in prefixes(nb - 1, na):
                yield ("b",) + rest
        if na:
            for rest in prefixes(nb, na - 1):
                yield ("a",) + rest

    Gs: dict = {}
    for n in range(depth):
        for u in range(n + 1):
            v = n - u
            acc = ZLSeries.constant(0, M)
            for w in prefixes(u, v):
                acc = acc + II(w)
            Gs[(u, v)] = acc
    G: dict = {}
    for n in range(depth - 1):
        for i in range(n + 1):
            j = n - i
            acc = ZLSeries.constant(0, M)
            for nb in range(i + 1):
                tail = i - nb
                for w in prefixes(nb, j):
                    acc = acc + II(w + ("a",) + ("b",) * (tail + 1))
                    if F.c.get(tail + 1):
                        acc = acc - II(w + (f"c{tail + 1}",))
            G[(i, j)] = acc
    return Gs, G


def _free(data: KZBData, chart: Chart, p1_included: bool, depth: int, M: int) -> tuple[dict, dict]:
    omega = data.omega_prime if p1_included else data.omega
    loc = fa.localize(omega.truncate(depth), chart, M - 1)
    G = fa.flat_section(loc, logarithmic=chart.is_tangential, M=M)
    h = fa.project_metab(fa.nc_log(G), depth, check=False)
    lifted = MetabElt(depth + 1, dict(h.items()))
    imA, imB = exp_ad_columns(lifted)
    c, gstar, g = decompose_columns(imA, imB, depth + 1)
    gstar[(0, 0)] = c
    gstar = {k: v for k, v in gstar.items() if sum(k) <= depth - 1}
    g = {k: v for k, v in g.items() if sum(k) <= depth - 2}
    return gstar, g


def adjoint_flat_section(
    data: KZBData, chart: Chart, p1_included: bool, M: int, depth: int | None = None, method: str = "recursion"
) -> tuple[dict, dict]:
    """Coefficients of ``Ad(G) = 1 + sum Gstar tau + sum G ad sigma`` for the flat section ``G``.

    ``Gstar[u, v]`` for ``u + v <= depth - 1`` and ``G[r, s]`` for
    ``r + s <= depth - 2``, as series valid to order ``M``.
    ``method``: ``recursion`` (primary), ``generating`` or ``free``.
    """
    depth = depth or data.N
    if depth > data.N:
        data = build_kzb(data.params, depth)
    if method == "free":
        return _free(data, chart, p1_included, depth, M)
    F = local_forms(data, chart, p1_included, M, depth - 1)
    if method == "recursion":
        return _recursion(F, depth, M)
    if method == "generating":
        return _generating(F, depth, M)
    raise ValueError(f"unknown method {method!r}")


def compare_sections(first: tuple[dict, dict], second: tuple[dict, dict], M: int) -> list:
    """Indices where two adjoint-section computations differ through order ``M``."""
    bad = []
    for label, a, b in (("Gstar", first[0], second[0]), ("G", first[1], second[1])):
        for key in sorted(set(a) | set(b)):
            x = a.get(key, 0)
            y = b.get(key, 0)
            x = x.truncate(M) if isinstance(x, ZLSeries) else ZLSeries.constant(x, M)
            y = y.truncate(M) if isinstance(y, ZLSeries) else ZLSeries.constant(y, M)
            if x != y:
                bad.append((label, key))
    return bad


def flatad_three_way(data: KZBData, chart: Chart, p1_included: bool, M: int, depth: int) -> dict:
    rec = adjoint_flat_section(data, chart, p1_included, M, depth, "recursion")
    gen = adjoint_flat_section(data, chart, p1_included, M, depth, "generating")
    free = adjoint_flat_section(data, chart, p1_included, M, depth, "free")
    return {
        "recursion_vs_generating": compare_sections(rec, gen, M),
        "recursion_vs_free": compare_sections(rec, free, M),
        "sections": rec,
    }


def integral(g: CurveFn, chart: Chart, M: int) -> ZLSeries:
    """Regularized ``integral of g alpha`` from the basepoint, valid to order ``M``."""
    alpha = chart.alpha(M + 4)
    return antiderivative((local_expand(g, chart, M + 2) * alpha).truncate(M - 1))

