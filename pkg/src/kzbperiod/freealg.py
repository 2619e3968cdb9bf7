"""Truncated noncommutative series in ``A``, ``B``: the free-algebra oracle layer.

Words are strings over ``"AB"``; the empty word is the unit.  Coefficients can
be rationals, :class:`~kzbperiod.formal.ZLSeries` (local forms and flat
sections) or :class:`~kzbperiod.curve.CurveFn` (global forms, stored as the
coefficient of ``alpha = dx/y``).  Connections are ``d - omega`` and flat
sections solve ``dG = omega G``.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from math import factorial
from typing import Callable, Mapping

from gmpy2 import mpq

from .curve import Chart, CurveError, CurveFn, cohomology_reduce, local_expand
from .formal import Q, ZLSeries, value_to_json
from .metabelian import MetabElt, bracket

log = logging.getLogger(__name__)

LETTERS = "AB"


class AugmentationError(ValueError):
    pass


class NotPrimitiveError(ValueError):
    pass


def _add_into(d: dict, key, value) -> None:
    if not value:
        return
    w = d.get(key)
    if w is None:
        d[key] = value
    else:
        w = w + value
        if w:
            d[key] = w
        else:
            del d[key]


@lru_cache(maxsize=None)
def words(N: int) -> tuple[str, ...]:
    """All words of length ``<= N`` ordered by length then lexicographically."""
    out = [""]
    for n in range(1, N + 1):
        out.extend("".join(p) for p in product(LETTERS, repeat=n))
    return tuple(out)


class NCSeries:
    """``sum c[w] w`` over words of length ``<= N``."""

    __slots__ = ("N", "_c")

    def __init__(self, N: int, coeffs: Mapping[str, object] | None = None):
        self.N = N
        self._c: dict = {}
        for w, v in (coeffs or {}).items():
            if len(w) <= N:
                _add_into(self._c, w, v)

    @classmethod
    def one(cls, N: int) -> "NCSeries":
        return cls(N, {"": mpq(1)})

    @classmethod
    def gen(cls, N: int, letter: str, value=1) -> "NCSeries":
        return cls(N, {letter: Q(value) if isinstance(value, int) else value})

    def __getitem__(self, w: str):
        return self._c.get(w, 0)

    def items(self):
        return self._c.items()

    def words(self):
        return self._c.keys()

    def __bool__(self) -> bool:
        return bool(self._c)

    def __len__(self) -> int:
        return len(self._c)

    @property
    def augmentation(self):
        return self._c.get("", 0)

    def degree_part(self, n: int) -> "NCSeries":
        return NCSeries(self.N, {w: v for w, v in self._c.items() if len(w) == n})

    def truncate(self, N: int) -> "NCSeries":
        return NCSeries(N, {w: v for w, v in self._c.items() if len(w) <= N})

    def _check(self, other: "NCSeries") -> int:
        return min(self.N, other.N)

    def __add__(self, other: "NCSeries") -> "NCSeries":
        N = self._check(other)
        c = {w: v for w, v in self._c.items() if len(w) <= N}
        for w, v in other._c.items():
            if len(w) <= N:
                _add_into(c, w, v)
        return NCSeries(N, c)

    def __neg__(self) -> "NCSeries":
        return NCSeries(self.N, {w: -v for w, v in self._c.items()})

    def __sub__(self, other: "NCSeries") -> "NCSeries":
        return self + (-other)

    def scale(self, c) -> "NCSeries":
        return NCSeries(self.N, {w: v * c for w, v in self._c.items()})

    def scale_left(self, c) -> "NCSeries":
        """Multiply every coefficient by ``c`` on the left (matters only for noncommuting coefficients)."""
        return NCSeries(self.N, {w: c * v for w, v in self._c.items()})

    def __mul__(self, other) -> "NCSeries":
        if not isinstance(other, NCSeries):
            return self.scale(other)
        return nc_mul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NCSeries):
            return NotImplemented
        N = min(self.N, other.N)
        keys = {w for w in set(self._c) | set(other._c) if len(w) <= N}
        return all(self[w] == other[w] for w in keys)

    __hash__ = None

    def map_coeffs(self, fn: Callable) -> "NCSeries":
        return NCSeries(self.N, {w: fn(v) for w, v in self._c.items()})

    def a_degree(self) -> int:
        return max((w.count("A") for w in self._c), default=0)

    def __repr__(self) -> str:
        if not self._c:
            return "0"
        parts = [f"({self._c[w]!s})*{w or '1'}" for w in words(self.N) if w in self._c]
        if len(parts) > 12:
            parts = parts[:12] + ["..."]
        return " + ".join(parts)

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, CurveFn):
                return v.to_json()
            return value_to_json(v)

        return {"degree": self.N, "coefficients": {w: enc(self._c[w]) for w in words(self.N) if w in self._c}}


def nc_mul(S: NCSeries, T: NCSeries) -> NCSeries:
    N = min(S.N, T.N)
    out: dict = {}
    by_len: dict = {}
    for w, v in T._c.items():
        by_len.setdefault(len(w), []).append((w, v))
    for u, a in S._c.items():
        room = N - len(u)
        for n, lst in by_len.items():
            if n > room:
                continue
            for w, b in lst:
                _add_into(out, u + w, a * b)
    return NCSeries(N, out)


def nc_exp(S: NCSeries) -> NCSeries:
    if S.augmentation:
        raise AugmentationError("nc_exp needs augmentation 0")
    out = NCSeries.one(S.N)
    term = NCSeries.one(S.N)
    for k in range(1, S.N + 1):
        term = nc_mul(term, S).scale(mpq(1, k))
        if not term:
            break
        out = out + term
    return out


def nc_log(S: NCSeries) -> NCSeries:
    if S.augmentation != 1:
        raise AugmentationError("nc_log needs augmentation 1")
    X = S - NCSeries.one(S.N)
    out = NCSeries(S.N)
    power = NCSeries.one(S.N)
    for k in range(1, S.N + 1):
        power = nc_mul(power, X)
        if not power:
            break
        out = out + power.scale(mpq((-1) ** (k + 1), k))
    return out


def nc_inverse(S: NCSeries) -> NCSeries:
    if S.augmentation != 1:
        raise AugmentationError("only series with augmentation 1 are inverted")
    X = NCSeries.one(S.N) - S
    out = NCSeries.one(S.N)
    power = NCSeries.one(S.N)
    for _ in range(S.N):
        power = nc_mul(power, X)
        if not power:
            break
        out = out + power
    return out


def substitute(S: NCSeries, images: Mapping[str, NCSeries]) -> NCSeries:
    """Algebra map sending each letter to ``images[letter]`` (augmentation 0)."""
    N = S.N
    cache: dict = {"": NCSeries.one(N)}

    def img(w: str) -> NCSeries:
        if w not in cache:
            cache[w] = nc_mul(img(w[:-1]), images[w[-1]])
        return cache[w]

    out = NCSeries(N)
    for w, v in S._c.items():
        out = out + img(w).scale_left(v)
    return out


# ---------------------------------------------------------------------------
# shuffles, grouplike and primitive elements
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def shuffle(u: str, v: str) -> tuple[tuple[str, int], ...]:
    if not u:
        return ((v, 1),)
    if not v:
        return ((u, 1),)
    c: Counter = Counter()
    for w, m in shuffle(u[:-1], v):
        c[w + u[-1]] += m
    for w, m in shuffle(u, v[:-1]):
        c[w + v[-1]] += m
    return tuple(sorted(c.items()))


def _shuffle_sum(S: NCSeries, u: str, v: str):
    acc = 0
    for w, m in shuffle(u, v):
        c = S[w]
        if c:
            acc = acc + c * m
    return acc


@dataclass
class Verdict:
    ok: bool
    witness: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


def _pairs(N: int):
    for u in words(N - 1):
        if not u:
            continue
        for v in words(N - len(u)):
            if v:
                yield u, v


def is_grouplike(S: NCSeries) -> Verdict:
    if S.augmentation != 1:
        return Verdict(False, ("", "", S.augmentation, 1))
    for u, v in _pairs(S.N):
        lhs = S[u] * S[v] if S[u] and S[v] else 0
        rhs = _shuffle_sum(S, u, v)
        if lhs != rhs:
            return Verdict(False, (u, v, lhs, rhs))
    return Verdict(True)


def is_primitive(S: NCSeries) -> Verdict:
    if S.augmentation:
        return Verdict(False, ("", "", S.augmentation, 0))
    for u, v in _pairs(S.N):
        rhs = _shuffle_sum(S, u, v)
        if rhs:
            return Verdict(False, (u, v, 0, rhs))
    return Verdict(True)


# ---------------------------------------------------------------------------
# projection to the metabelian quotient
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _bracket_image(w: str, N: int, left: bool) -> tuple:
    """Left-normed ``[..[w1, w2], .., wn]`` or right-normed ``[w1, [w2, .., wn]]`` in the quotient."""
    if len(w) == 1:
        return ((w, mpq(1)),)
    if left:
        prev = MetabElt(N, dict(_bracket_image(w[:-1], N, True)))
        res = bracket(prev, MetabElt(N, {w[-1]: mpq(1)}))
    else:
        prev = MetabElt(N, dict(_bracket_image(w[1:], N, False)))
        res = bracket(MetabElt(N, {w[0]: mpq(1)}), prev)
    return tuple(res.items())


def project_metab(h: NCSeries, N: int | None = None, bracketing: str = "left", check: bool = True) -> MetabElt:
    """Image of a primitive series under ``w -> [w]/len(w)`` in the metabelian quotient."""
    if N is None:
        N = h.N
    if check:
        verdict = is_primitive(h.truncate(N))
        if not verdict:
            raise NotPrimitiveError(f"series is not primitive: witness {verdict.witness}")
    left = bracketing == "left"
    out: dict = {}
    for w, v in h.items():
        if not w or len(w) > N:
            continue
        for key, c in _bracket_image(w, N, left):
            _add_into(out, key, v * (c / len(w)))
    return MetabElt(N, out)


# ---------------------------------------------------------------------------
# flat sections of local connection forms
# ---------------------------------------------------------------------------

def _poly_mul(P: dict, Q_: dict, N: int) -> dict:
    out: dict = {}
    for u, a in P.items():
        room = N - len(u)
        for w, b in Q_.items():
            if len(w) <= room:
                _add_into(out, u + w, a * b)
    return out


def _poly_add_into(P: dict, Q_: dict, c=1) -> None:
    for w, v in Q_.items():
        _add_into(P, w, v * c)


def flat_section(omega: NCSeries, logarithmic: bool = False, M: int | None = None) -> NCSeries:
    """The flat section ``G`` of ``d - omega`` with regularized value 1 at ``z = 0``.

    ``omega`` holds the ``dz``-coefficients.  Writing ``omega = R dz/z + Omega``
    and ``G = H(z) exp(L R)``, the coefficient ``H_n`` of ``z^n`` solves
    ``(n - ad R) H_n = sum_m Omega_m H_(n-1-m)``; ``ad R`` is nilpotent, so
    this is a finite Neumann series.  With ``R = 0`` this is the ordinary
    iterated-integral solution.
    """
    N = omega.N
    if omega.augmentation:
        raise ValueError("connection form must have no constant (empty-word) part")
    prec = min((v.prec for v in omega._c.values()), default=M if M is not None else 0)
    R: dict = {}
    Om: dict = {}
    for w, s in omega.items():
        if not isinstance(s, ZLSeries):
            s = ZLSeries.constant(s, prec)
        if not s.is_log_free():
            raise ValueError("connection form coefficients must be free of L")
        v = s.valuation()
        if v < -1:
            raise ValueError(f"pole of order {-v} in the coefficient of {w}")
        if v == -1:
            if not logarithmic:
                raise ValueError(f"simple pole in the coefficient of {w}; pass logarithmic=True")
            R[w] = s.coeff(-1)
        for (n, _), c in s.items():
            if n >= 0:
                Om.setdefault(n, {})[w] = c
    out_prec = prec + 1
    if M is not None:
        if M > out_prec:
            raise ValueError(f"form known to order {prec}; flat section only to {out_prec} < {M}")
        out_prec = M
    H: list[dict] = [{"": mpq(1)}]
    for n in range(1, out_prec + 1):
        rhs: dict = {}
        for m in range(0, n):
            Omega_m = Om.get(m)
            if Omega_m:
                _poly_add_into(rhs, _poly_mul(Omega_m, H[n - 1 - m], N))
        Hn: dict = {}
        term, k = rhs, 0
        while term:
            _poly_add_into(Hn, term, mpq(1, n ** (k + 1)))
            if not R:
                break
            nxt = _poly_mul(R, term, N)
            _poly_add_into(nxt, _poly_mul(term, R, N), -1)
            term, k = nxt, k + 1
        H.append(Hn)
    # exp(L R) = sum L^k R^k / k!
    powers = [{"": mpq(1)}]
    while R and len(powers) <= N:
        nxt = _poly_mul(powers[-1], R, N)
        if not nxt:
            break
        powers.append({w: v / len(powers) for w, v in nxt.items()})
    coeffs: dict = {}
    for n, Hn in enumerate(H):
        for k, Rk in enumerate(powers):
            for w, v in _poly_mul(Hn, Rk, N).items():
                coeffs.setdefault(w, {})[(n, k)] = v
    return NCSeries(N, {w: ZLSeries(c, out_prec) for w, c in coeffs.items()})


def flat_residual(G: NCSeries, omega: NCSeries) -> NCSeries:
    """``dG/dz - omega G`` (zero to the valid order for a flat section)."""
    dG = G.map_coeffs(lambda s: s.derivative())
    return dG - nc_mul(omega, G)


def zl_is_zero(S: NCSeries) -> bool:
    return all(not v for _, v in S.items())


# ---------------------------------------------------------------------------
# global forms and gauge transformations
# ---------------------------------------------------------------------------

def localize(omega: NCSeries, chart: Chart, M: int) -> NCSeries:
    """``dz``-coefficients (or ``dt``) of a global form ``omega * alpha`` in a chart, valid to order ``M``."""
    alpha = chart.alpha(M + 4)
    out = {}
    for w, g in omega.items():
        if not isinstance(g, CurveFn):
            g = CurveFn.const(chart.curve, g)
        out[w] = (local_expand(g, chart, M + 2) * alpha).truncate(M)
    return NCSeries(omega.N, out)


def _default_deriv(v):
    if isinstance(v, CurveFn):
        return v.D()
    if isinstance(v, ZLSeries):
        return v.derivative()
    return 0


def gauge_apply(g: NCSeries, omega: NCSeries, deriv: Callable = _default_deriv) -> NCSeries:
    """Transform ``d - omega`` by ``g``: the result is ``d - omega'`` with
    ``omega' = dg g^-1 + g omega g^-1``, so flat sections map as ``G -> g G``.

    Global coefficients are differentiated with :meth:`CurveFn.D`
    (``dF = D(F) alpha``), local ones with ``d/dz``.
    """
    if g.augmentation != 1:
        raise AugmentationError("gauge must have augmentation 1 (unit constant term)")
    ginv = nc_inverse(g)
    dg = g.map_coeffs(deriv)
    return nc_mul(dg, ginv) + nc_mul(nc_mul(g, omega), ginv)


def naive_form(curve, N: int) -> NCSeries:
    """``omega_0 = alpha A + beta B`` (``beta = x alpha``) as alpha-coefficients."""
    return NCSeries(N, {"A": CurveFn.const(curve, 1), "B": CurveFn.x(curve)})


@dataclass
class GaugeStep:
    degree: int
    gauge: NCSeries
    a: dict
    b: dict

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "gauge": self.gauge.to_json(),
            "A_shift": {w: str(v) for w, v in sorted(self.a.items())},
            "B_shift": {w: str(v) for w, v in sorted(self.b.items())},
        }


@dataclass
class Normalization:
    steps: list
    A_hat: NCSeries
    B_hat: NCSeries
    gauge: NCSeries
    omega_final: NCSeries
    basepoint: Chart

    def substitution(self) -> dict:
        return {"A": self.A_hat, "B": self.B_hat}

    def target_form(self) -> NCSeries:
        """``phi(omega_0) = alpha A_hat + beta B_hat``."""
        curve = self.basepoint.curve
        return self.A_hat + self.B_hat.scale(CurveFn.x(curve))

    def residual(self, omega: NCSeries) -> NCSeries:
        """``dg - (phi(omega_0) g - g omega)``; zero when the normalization is exact."""
        g = self.gauge
        dg = g.map_coeffs(_default_deriv)
        return dg - (nc_mul(self.target_form(), g) - nc_mul(g, omega))


def normalize_to_naive(omega: NCSeries, basepoint: Chart) -> Normalization:
    """Gauge ``d - omega`` into ``phi(d - omega_0)`` degree by degree.

    At degree ``n`` each coefficient is split as ``r_w = D(F_w) + a_w + b_w x``;
    the gauge ``1 - sum (F_w - F_w(b)) w`` kills the exact part and
    ``A -> A + sum a_w w``, ``B -> B + sum b_w w`` absorbs the rest.
    """
    if basepoint.is_tangential:
        raise CurveError("normalization needs a rational basepoint (gauges are evaluated there)")
    N = omega.N
    curve = basepoint.curve
    cur = omega
    total = NCSeries.one(N)
    A_hat = NCSeries.gen(N, "A")
    B_hat = NCSeries.gen(N, "B")
    steps = []
    for n in range(1, N + 1):
        gcoef: dict = {}
        a_sh: dict = {}
        b_sh: dict = {}
        for w, r in cur.degree_part(n).items():
            if not isinstance(r, CurveFn):
                r = CurveFn.const(curve, r)
            F, a, b = cohomology_reduce(r)
            if n == 1:
                want = (1, 0) if w == "A" else (0, 1)
                if (a, b) != want:
                    raise ValueError(f"degree-1 part is not cohomologous to alpha A + beta B (word {w}: a={a}, b={b})")
            else:
                if a:
                    a_sh[w] = a
                if b:
                    b_sh[w] = b
            if F:
                gcoef[w] = -(F - F.evaluate(basepoint.x0, basepoint.y0))
        if not gcoef and not a_sh and not b_sh:
            continue
        g = NCSeries(N, {"": mpq(1), **gcoef})
        if gcoef:
            cur = gauge_apply(g, cur)
            total = nc_mul(g, total)
        A_hat = A_hat + NCSeries(N, a_sh)
        B_hat = B_hat + NCSeries(N, b_sh)
        steps.append(GaugeStep(n, g, a_sh, b_sh))
        log.debug("normalization degree %d: %d gauge words, %d generator shifts", n, len(gcoef), len(a_sh) + len(b_sh))
    return Normalization(steps, A_hat, B_hat, total, cur, basepoint)


# ---------------------------------------------------------------------------
# Hodge filtration
# ---------------------------------------------------------------------------

@dataclass
class HodgeReport:
    ok: bool
    violations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": self.violations}


def hodge_check(omega: NCSeries, omega_prime: NCSeries | None = None, g: NCSeries | None = None) -> HodgeReport:
    """Filtration by A-degree: ``F^-j`` is spanned by words with at most ``j`` letters A.

    Checks that both forms raise A-degree by at most one (transversality),
    that ``g`` and ``g^-1`` preserve every ``F^-j``, and that the degree-1
    part of ``F^0`` is spanned by ``B``.
    """
    bad = []
    for name, form in (("omega", omega), ("omega_prime", omega_prime)):
        if form is None:
            continue
        for w, _ in form.items():
            if w.count("A") > 1:
                bad.append({"check": "transversality", "form": name, "word": w})
    if g is not None:
        for name, ser in (("g", g), ("g_inverse", nc_inverse(g))):
            for w, _ in ser.items():
                if "A" in w:
                    bad.append({"check": "filtration", "series": name, "word": w})
    f0_deg1 = [w for w in words(1) if len(w) == 1 and w.count("A") == 0]
    if f0_deg1 != ["B"]:
        bad.append({"check": "F0", "span": f0_deg1})
    return HodgeReport(not bad, bad)
