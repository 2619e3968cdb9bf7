"""Weierstrass data of the punctured curve ``y^2 = 4x^3 - 60 e4 x - 140 e6``.

Functions on the curve are stored as ``(a(x) + b(x) y) / h(x)^k`` where
``h = 4x^3 - 60 e4 x - 140 e6``; ``k = 0`` is the coordinate ring of the
affine curve, ``k > 0`` is only needed for ``f = 2x^2/y`` and its powers.
One-forms are stored through their coefficient on ``alpha = dx/y``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial
from typing import Sequence

from gmpy2 import mpq

from .formal import Q, Rational, ZLSeries, qstr

log = logging.getLogger(__name__)

Poly = tuple  # coefficients, lowest degree first, no trailing zeros


class CurveError(ValueError):
    pass


class ConsistencyError(RuntimeError):
    """An internal cross-check between two independent computations failed."""


# ---------------------------------------------------------------------------
# dense univariate polynomials over Q
# ---------------------------------------------------------------------------

def ptrim(p: Sequence) -> Poly:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return tuple(Q(c) for c in p)


def padd(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return ptrim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def pneg(p: Poly) -> Poly:
    return tuple(-c for c in p)


def psub(p: Poly, q: Poly) -> Poly:
    return padd(p, pneg(q))


def pscale(p: Poly, c) -> Poly:
    return ptrim([c * a for a in p])


def pmul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [mpq(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return ptrim(out)


def pderiv(p: Poly) -> Poly:
    return ptrim([i * p[i] for i in range(1, len(p))])


def peval(p: Poly, x):
    acc = mpq(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def pdivmod(p: Poly, d: Poly) -> tuple[Poly, Poly]:
    p = list(p)
    if not d:
        raise ZeroDivisionError
    q = [mpq(0)] * max(len(p) - len(d) + 1, 0)
    lead = d[-1]
    for i in range(len(p) - len(d), -1, -1):
        c = p[i + len(d) - 1] / lead
        q[i] = c
        if c:
            for j, dj in enumerate(d):
                p[i + j] -= c * dj
    return ptrim(q), ptrim(p[: len(d) - 1])


def pstr(p: Poly, var: str = "x") -> str:
    if not p:
        return "0"
    parts = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if not c:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        mag = abs(c)
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{mag}*{mono}"
        else:
            body = f"{mag}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# curve
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CurveParams:
    e4: Rational
    e6: Rational

    def __post_init__(self):
        object.__setattr__(self, "e4", Q(self.e4))
        object.__setattr__(self, "e6", Q(self.e6))
        g2, g3 = 60 * self.e4, 140 * self.e6
        if g2 ** 3 - 27 * g3 ** 2 == 0:
            raise CurveError(f"singular curve: e4={self.e4}, e6={self.e6} has vanishing discriminant")

    @property
    def h(self) -> Poly:
        """Right-hand side ``4x^3 - 60 e4 x - 140 e6``."""
        return ptrim([-140 * self.e6, -60 * self.e4, 0, 4])

    def contains(self, x0, y0) -> bool:
        return Q(y0) ** 2 == peval(self.h, Q(x0))

    def to_json(self) -> dict:
        return {"e4": qstr(self.e4), "e6": qstr(self.e6)}


@dataclass(frozen=True, eq=False)
class CurveFn:
    """``(a(x) + b(x) y) / h(x)^k`` on the curve, in lowest terms."""

    curve: CurveParams
    a: Poly = ()
    b: Poly = ()
    k: int = 0

    def __post_init__(self):
        a, b, k = ptrim(self.a), ptrim(self.b), self.k
        h = self.curve.h
        while k > 0:
            qa, ra = pdivmod(a, h)
            qb, rb = pdivmod(b, h)
            if ra or rb:
                break
            a, b, k = qa, qb, k - 1
        if not a and not b:
            k = 0
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "k", k)

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, curve: CurveParams, c) -> "CurveFn":
        return cls(curve, (Q(c),))

    @classmethod
    def x(cls, curve: CurveParams) -> "CurveFn":
        return cls(curve, (0, 1))

    @classmethod
    def y(cls, curve: CurveParams) -> "CurveFn":
        return cls(curve, (), (1,))

    @classmethod
    def inv_y(cls, curve: CurveParams) -> "CurveFn":
        return cls(curve, (), (1,), 1)

    # -- arithmetic ---------------------------------------------------------
    def _lift(self, k: int) -> tuple[Poly, Poly]:
        a, b = self.a, self.b
        for _ in range(k - self.k):
            a, b = pmul(a, self.curve.h), pmul(b, self.curve.h)
        return a, b

    def _coerce(self, other) -> "CurveFn":
        if isinstance(other, CurveFn):
            if other.curve != self.curve:
                raise CurveError("functions live on different curves")
            return other
        return CurveFn.const(self.curve, other)

    def __add__(self, other) -> "CurveFn":
        other = self._coerce(other)
        k = max(self.k, other.k)
        a1, b1 = self._lift(k)
        a2, b2 = other._lift(k)
        return CurveFn(self.curve, padd(a1, a2), padd(b1, b2), k)

    __radd__ = __add__

    def __neg__(self) -> "CurveFn":
        return CurveFn(self.curve, pneg(self.a), pneg(self.b), self.k)

    def __sub__(self, other) -> "CurveFn":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "CurveFn":
        return self._coerce(other) - self

    def __mul__(self, other) -> "CurveFn":
        if not isinstance(other, CurveFn):
            c = Q(other)
            return CurveFn(self.curve, pscale(self.a, c), pscale(self.b, c), self.k)
        other = self._coerce(other)
        h = self.curve.h
        a = padd(pmul(self.a, other.a), pmul(pmul(self.b, other.b), h))
        b = padd(pmul(self.a, other.b), pmul(self.b, other.a))
        return CurveFn(self.curve, a, b, self.k + other.k)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "CurveFn":
        out = CurveFn.const(self.curve, 1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, CurveFn):
            if isinstance(other, (int, Rational)):
                other = CurveFn.const(self.curve, other)
            else:
                return NotImplemented
        return (self.curve, self.a, self.b, self.k) == (other.curve, other.a, other.b, other.k)

    def __hash__(self):
        return hash((self.curve, self.a, self.b, self.k))

    def __bool__(self) -> bool:
        return bool(self.a or self.b)

    # -- calculus -----------------------------------------------------------
    def D(self) -> "CurveFn":
        """Coefficient of ``alpha`` in ``d(self)``: ``dF = D(F) * dx/y``."""
        h = self.curve.h
        dh = pderiv(h)
        a, b, k = self.a, self.b, self.k
        # y-part: h a' - k h' a ; rational part: h^2 b' + (1/2 - k) h h' b
        new_b = psub(pmul(h, pderiv(a)), pscale(pmul(dh, a), k))
        new_a = padd(pmul(pmul(h, h), pderiv(b)), pscale(pmul(pmul(h, dh), b), mpq(1, 2) - k))
        return CurveFn(self.curve, new_a, new_b, k + 1)

    def evaluate(self, x0, y0) -> Rational:
        x0, y0 = Q(x0), Q(y0)
        den = peval(self.curve.h, x0) ** self.k
        if not den:
            raise CurveError(f"function has a pole at ({x0}, {y0})")
        return (peval(self.a, x0) + peval(self.b, x0) * y0) / den

    @property
    def is_polynomial(self) -> bool:
        return self.k == 0

    def __repr__(self) -> str:
        return f"CurveFn({self})"

    def __str__(self) -> str:
        if not self:
            return "0"
        parts = []
        if self.a:
            parts.append(pstr(self.a))
        if self.b:
            bs = pstr(self.b)
            if len([c for c in self.b if c]) > 1:
                bs = f"({bs})"
            parts.append("y" if bs == "1" else ("-y" if bs == "-1" else f"{bs}*y"))
        num = " + ".join(parts).replace("+ -", "- ")
        if self.k:
            return f"({num})/h" if self.k == 1 else f"({num})/h^{self.k}"
        return num

    def to_json(self) -> dict:
        out = {"a": [qstr(c) for c in self.a], "b": [qstr(c) for c in self.b]}
        if self.k:
            out["h_power"] = self.k
        return out


# ---------------------------------------------------------------------------
# Laurent expansions at infinity
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _wp_coeffs(curve: CurveParams, n_max: int) -> tuple[Rational, ...]:
    """``c[n]`` = coefficient of ``z^(2n)`` in wp, ``c[0] = 0`` (no constant term)."""
    c = [mpq(0)] * (n_max + 1)
    if n_max >= 1:
        c[1] = 3 * curve.e4
    if n_max >= 2:
        c[2] = 5 * curve.e6
    # wp'' = 6 wp^2 - 30 e4 matched at z^(2n-2)
    for n in range(3, n_max + 1):
        acc = sum((c[i] * c[n - 1 - i] for i in range(1, n - 1)), mpq(0))
        c[n] = 6 * acc / ((2 * n + 3) * (2 * n - 4))
    return tuple(c)


def weierstrass_expansion(curve: CurveParams, M: int) -> tuple[ZLSeries, ZLSeries]:
    """``(wp(z), wp'(z))`` valid through ``z^M``; ``x = wp``, ``y = wp'``."""
    if M < 0:
        raise ValueError("M must be non-negative")
    c = _wp_coeffs(curve, (M + 1) // 2 + 1)
    x = {(-2, 0): 1}
    for n in range(1, len(c)):
        x[(2 * n, 0)] = c[n]
    xs = ZLSeries(x, M + 1)
    ys = xs.derivative()
    return xs.truncate(M), ys.truncate(M)


def wp_k(curve: CurveParams, k: int, M: int) -> tuple[ZLSeries, Rational]:
    """``wp_k = (-1)^k/(k-1)! d^(k-2) wp`` valid through ``z^M`` and its constant term ``e_k``."""
    if k < 2:
        raise ValueError("k must be >= 2")
    s, _ = weierstrass_expansion(curve, M + k - 2)
    for _ in range(k - 2):
        s = s.derivative()
    s = s * mpq((-1) ** k, factorial(k - 1))
    return s, s.coeff(0)


def e_value(curve: CurveParams, k: int) -> Rational:
    """``e_k``: the constant term of ``wp_k``; zero for odd ``k`` and for ``k = 2``."""
    if k < 2:
        raise ValueError("e_k is defined for k >= 2")
    if k % 2 or k == 2:
        return mpq(0)
    n = (k - 2) // 2
    return _wp_coeffs(curve, n)[n] / (k - 1)


def e_recurrence(curve: CurveParams, two_m_max: int, variant: str = "corrected") -> dict[int, Rational]:
    """``e_{2m}`` from the quadratic recurrence seeded with ``e4``, ``e6``.

    ``corrected``: ``(1/3)(m-3)(4m^2-1) e_{2m} = sum_{r=2}^{m-2} (2r-1)(2m-2r-1) e_{2r} e_{2m-2r}``;
    ``printed``: the same with ``(2m-r-1)`` in place of ``(2m-2r-1)``.
    """
    e = {4: curve.e4, 6: curve.e6}
    for m in range(4, two_m_max // 2 + 1):
        acc = mpq(0)
        for r in range(2, m - 1):
            second = (2 * m - 2 * r - 1) if variant == "corrected" else (2 * m - r - 1)
            acc += (2 * r - 1) * second * e[2 * r] * e[2 * m - 2 * r]
        e[2 * m] = acc / (mpq(1, 3) * (m - 3) * (4 * m * m - 1))
    return e


@lru_cache(maxsize=None)
def _inf_xyhinv(curve: CurveParams, W: int):
    x, y = weierstrass_expansion(curve, W)
    hx = ZLSeries.constant(0, W)
    for c in reversed(curve.h):
        hx = hx * x + c
    return x, y, hx.inverse()


def _poly_series(p: Poly, s: ZLSeries) -> ZLSeries:
    acc = ZLSeries.constant(0, s.prec + 1000)
    for c in reversed(p):
        acc = acc * s + c
    return acc


def from_laurent(curve: CurveParams, s: ZLSeries, check_order: int = 2) -> CurveFn:
    """Recover the polynomial function with expansion ``s`` at infinity.

    Poles are removed from the top by subtracting multiples of ``x^i``
    (order ``2i``) and ``x^i y`` (order ``2i + 3``); the leftover constant is
    added back and the remainder must vanish through ``z^check_order``.
    """
    if not s.is_log_free():
        raise ValueError("expansion carries L terms")
    W = s.prec
    x, y = weierstrass_expansion(curve, W + 64)
    a: dict[int, Rational] = {}
    b: dict[int, Rational] = {}
    rem = s
    while True:
        v = rem.valuation()
        if v > 0 or v > rem.prec:
            break
        c = rem.coeff(v)
        if v == 0:
            a[0] = a.get(0, 0) + c
            rem = rem - c
            continue
        order = -v
        if order % 2 == 0:
            i = order // 2
            a[i] = a.get(i, 0) + c
            rem = rem - (x ** i) * c
        elif order >= 3:
            i = (order - 3) // 2
            # x^i y ~ -2 z^-(2i+3)
            b[i] = b.get(i, 0) - c / 2
            rem = rem - (x ** i) * y * (-c / 2)
        else:
            raise ConsistencyError("expansion has a simple pole; not a regular function on the affine curve")
    rem = rem.truncate(min(rem.prec, check_order))
    if rem:
        raise ConsistencyError(f"Laurent tail matching left a nonzero remainder {rem!r}")
    a_poly = ptrim([a.get(i, 0) for i in range(max(a, default=-1) + 1)])
    b_poly = ptrim([b.get(i, 0) for i in range(max(b, default=-1) + 1)])
    return CurveFn(curve, a_poly, b_poly)


# ---------------------------------------------------------------------------
# charts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Chart:
    """Local parameter at a basepoint.

    ``kind == "point"``: rational point ``(x0, y0)`` with ``y0 != 0`` and
    parameter ``t = x - x0``.  ``kind == "infinity"``: the puncture, with
    parameter ``z`` such that ``x = wp(z)``; as a tangential basepoint it is
    the tangent vector ``d/dz`` and ``L = log z`` vanishes there.
    """

    curve: CurveParams
    kind: str
    x0: Rational | None = None
    y0: Rational | None = None

    @classmethod
    def point(cls, curve: CurveParams, x0, y0) -> "Chart":
        x0, y0 = Q(x0), Q(y0)
        if not curve.contains(x0, y0):
            raise CurveError(f"({x0}, {y0}) is not on the curve")
        if y0 == 0:
            raise CurveError("2-torsion basepoints (y0 = 0) are not supported: x - x0 is not a parameter there")
        return cls(curve, "point", x0, y0)

    @classmethod
    def infinity(cls, curve: CurveParams) -> "Chart":
        return cls(curve, "infinity")

    @property
    def is_tangential(self) -> bool:
        return self.kind == "infinity"

    def describe(self) -> str:
        return "tangential" if self.is_tangential else f"{self.x0},{self.y0}"

    def xy(self, M: int) -> tuple[ZLSeries, ZLSeries]:
        """Local expansions of ``x`` and ``y`` valid through order ``M``."""
        if self.is_tangential:
            return weierstrass_expansion(self.curve, M)
        return _point_xy(self.curve, self.x0, self.y0, M)

    def alpha(self, M: int) -> ZLSeries:
        """``alpha = dx/y`` as a multiple of ``d(parameter)``."""
        if self.is_tangential:
            return ZLSeries.constant(1, M)
        _, y = self.xy(M)
        return y.inverse()


@lru_cache(maxsize=None)
def _point_xy(curve: CurveParams, x0, y0, M: int) -> tuple[ZLSeries, ZLSeries]:
    hs = [peval(pderiv_n(curve.h, i), x0) / factorial(i) for i in range(4)]  # h(x0 + t)
    y = [y0]
    for n in range(1, M + 1):
        acc = (hs[n] if n < 4 else 0) - sum((y[i] * y[n - i] for i in range(1, n)), mpq(0))
        y.append(acc / (2 * y0))
    return ZLSeries({(0, 0): x0, (1, 0): 1}, M), ZLSeries.from_list(y, M)


def pderiv_n(p: Poly, n: int) -> Poly:
    for _ in range(n):
        p = pderiv(p)
    return p


def local_expand(g: CurveFn, chart: Chart, M: int) -> ZLSeries:
    """Expansion of ``g`` in the chart's parameter, valid through order ``M``."""
    if g.curve != chart.curve:
        raise CurveError("function and chart live on different curves")
    if not chart.is_tangential and g.k and peval(chart.curve.h, chart.x0) == 0:
        raise CurveError("function has a pole at the chart's basepoint")
    W = M + 4
    while True:
        res = _expand_once(g, chart, W)
        if res.prec >= M:
            return res.truncate(M)
        W += M - res.prec + 4


@lru_cache(maxsize=4096)
def _expand_once(g: CurveFn, chart: Chart, W: int) -> ZLSeries:
    if chart.is_tangential:
        x, y, hinv = _inf_xyhinv(chart.curve, W)
    else:
        x, y = chart.xy(W)
        hinv = None
        if g.k:
            hx = _poly_series(chart.curve.h, x)
            hinv = hx.inverse()
    res = _poly_series(g.a, x) if g.a else ZLSeries.constant(0, W)
    if g.b:
        res = res + _poly_series(g.b, x) * y
    if g.k:
        res = res * hinv ** g.k
    return res


# ---------------------------------------------------------------------------
# P_k, f, p_n, q_n
# ---------------------------------------------------------------------------

def choose_f(curve: CurveParams) -> CurveFn:
    """The function ``f = +-2x^2/y`` for which ``df - beta`` is holomorphic at infinity."""
    base = CurveFn(curve, (), (0, 0, 2), 1)  # 2x^2 y / h = 2x^2/y
    x = CurveFn.x(curve)
    good = []
    for sign in (1, -1):
        f = base * sign
        polar = local_expand(f.D() - x, Chart.infinity(curve), 2)
        if polar.valuation() >= 0:
            good.append(f)
    if len(good) != 1:
        raise ConsistencyError(f"expected exactly one sign of 2x^2/y to work, found {len(good)}")
    return good[0]


@lru_cache(maxsize=None)
def P_k(curve: CurveParams, k: int) -> CurveFn:
    """``P_k`` = pull-back of ``wp_k - e_k``; ``P_1 = -f``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return -choose_f(curve)
    s, e = wp_k(curve, k, 4)
    return from_laurent(curve, s - e, check_order=4)


def P_k_expansion_matches(curve: CurveParams, k: int, M: int = 12) -> bool:
    s, e = wp_k(curve, k, M)
    return local_expand(P_k(curve, k), Chart.infinity(curve), M) == (s - e)


def weil_recurrence_rhs(curve: CurveParams, m: int, n: int) -> CurveFn:
    """Right-hand side of the product recurrence for ``P_m P_n - P_{m+n}``."""
    e = lambda i: e_value(curve, i)
    acc = CurveFn.const(curve, 0)
    for k in range(1, m - 1):
        acc = acc + P_k(curve, m - k) * ((-1) ** n * comb(n + k - 1, k) * e(n + k))
    for k in range(1, n - 1):
        acc = acc + P_k(curve, n - k) * ((-1) ** m * comb(m + k - 1, k) * e(m + k))
    return acc + (-1) ** m * comb(m + n, m) * e(m + n)


def weil_recurrence_report(curve: CurveParams, max_sum: int = 12) -> list[dict]:
    """Check the product recurrence for ``2 <= m, n``, ``m + n <= max_sum``; list violations."""
    bad = []
    for m in range(2, max_sum - 1):
        for n in range(2, max_sum - m + 1):
            lhs = P_k(curve, m) * P_k(curve, n) - P_k(curve, m + n)
            rhs = weil_recurrence_rhs(curve, m, n)
            if lhs != rhs:
                bad.append({"m": m, "n": n, "lhs": str(lhs), "rhs": str(rhs)})
                log.info("product recurrence fails at m=%d n=%d", m, n)
    return bad


def _partitions(n: int, min_part: int):
    """Multiplicity dicts ``{k: a_k}`` with ``sum k a_k = n`` and parts ``>= min_part``."""

    def rec(rest, largest):
        if rest == 0:
            yield {}
            return
        for k in range(min(rest, largest), min_part - 1, -1):
            for a in range(rest // k, 0, -1):
                for tail in rec(rest - a * k, k - 1):
                    d = dict(tail)
                    d[k] = a
                    yield d

    yield from rec(n, n)


def _partition_sum(curve: CurveParams, n: int, min_part: int) -> CurveFn:
    acc = CurveFn.const(curve, 0)
    for part in _partitions(n, min_part):
        term = CurveFn.const(curve, 1)
        den = 1
        for k, a in part.items():
            term = term * (P_k(curve, k) * mpq((-1) ** (k + 1), k)) ** a
            den *= factorial(a)
        acc = acc + term * mpq(1, den)
    return acc


def _exp_form(curve: CurveParams, N: int, min_part: int) -> list[CurveFn]:
    """Coefficients of ``exp(sum_{k>=min_part} (-1)^(k+1) P_k t^k / k)`` via ``n E_n = sum k c_k E_{n-k}``."""
    c = [CurveFn.const(curve, 0)] * (N + 1)
    for k in range(min_part, N + 1):
        c[k] = P_k(curve, k) * mpq((-1) ** (k + 1), k)
    E = [CurveFn.const(curve, 1)]
    for n in range(1, N + 1):
        acc = CurveFn.const(curve, 0)
        for k in range(1, n + 1):
            if k >= min_part:
                acc = acc + c[k] * E[n - k] * k
        E.append(acc * mpq(1, n))
    return E


@lru_cache(maxsize=None)
def pq_coeffs(curve: CurveParams, N: int) -> tuple[dict[int, CurveFn], dict[int, CurveFn]]:
    """``p_n`` (``2 <= n <= N``) and ``q_n`` (``1 <= n <= N``) from the partition sums.

    Both are cross-checked against the exponential generating forms and a
    :class:`ConsistencyError` names the first disagreeing index.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    p = {n: _partition_sum(curve, n, 2) for n in range(2, N + 1)}
    q = {n: _partition_sum(curve, n, 1) for n in range(1, N + 1)}
    Ep = _exp_form(curve, N, 2)
    Eq = _exp_form(curve, N, 1)
    if Ep[1]:
        raise ConsistencyError("exponential form for p has a degree-1 term")
    for n in range(2, N + 1):
        if p[n] != Ep[n]:
            raise ConsistencyError(f"p_{n}: partition sum disagrees with exponential form")
    for n in range(1, N + 1):
        if q[n] != Eq[n]:
            raise ConsistencyError(f"q_{n}: partition sum disagrees with exponential form")
    return p, q


# ---------------------------------------------------------------------------
# de Rham reduction
# ---------------------------------------------------------------------------

def cohomology_reduce(eta: CurveFn) -> tuple[CurveFn, Rational, Rational]:
    """Write ``eta * alpha = dF + a alpha + b beta`` with ``F`` regular on the affine curve.

    ``b(x) y alpha = d(integral of b)`` is always exact; the pure-``x`` part is
    reduced from the top with ``d(x^i y) = (i x^(i-1) h + x^i h'/2) alpha``,
    which lowers the degree by one each step.
    """
    if not eta.is_polynomial:
        raise CurveError("cohomology_reduce needs a function regular on the affine curve")
    curve = eta.curve
    h = curve.h
    dh2 = pscale(pderiv(h), mpq(1, 2))
    # exact y-part
    F_a = ptrim([0] + [c / (i + 1) for i, c in enumerate(eta.b)])
    F_b: list = []
    a = list(eta.a)
    while len(a) > 2:
        m = len(a) - 1
        i = m - 2
        # d(x^i y) has x-degree i + 2 = m and leading coefficient 4i + 6
        lead = a[m] / (4 * i + 6)
        dxy = padd(pscale(pmul((0,) * (i - 1) + (i,), h), 1) if i else (), pmul((0,) * i + (1,), dh2))
        a = list(psub(tuple(a), pscale(dxy, lead)))
        a = list(ptrim(a))
        while len(F_b) <= i:
            F_b.append(mpq(0))
        F_b[i] += lead
    a = list(ptrim(a)) + [mpq(0)] * 2
    F = CurveFn(curve, F_a, ptrim(F_b))
    return F, Q(a[0]), Q(a[1])
