"""The two-generator metabelian Lie algebra and its adjoint calculus.

Basis: ``A``, ``B`` (weight 1) and ``sigma[r, s] = ad_B^r ad_A^s [A, B]``
(weight ``r + s + 2``).  Everything is truncated at a weight bound ``N``.

Operators are explicit sparse matrices (:class:`WOp`).  Inside ``exp(ad w)``
every operator lies in the span of the identity, ``tau[u, v] = ad_B^u ad_A^v``
and ``ad(sigma[r, s])``; :func:`span_decompose` reads off those coefficients.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial
from typing import Callable, Mapping

from gmpy2 import mpq

from .formal import (
    Q,
    _bernoulli_minus,
    kernel_T,
    kurlin_kernel,
    value_from_json,
    value_to_json,
)

log = logging.getLogger(__name__)

Key = object  # "A", "B" or (r, s)


class DepthMismatch(ValueError):
    pass


class NotInSpanError(ValueError):
    def __init__(self, message: str, entries: list):
        super().__init__(message)
        self.entries = entries


class NotNilpotentError(ValueError):
    pass


def weight(key: Key) -> int:
    if key == "A" or key == "B":
        return 1
    r, s = key
    return r + s + 2


def sigma_keys(N: int) -> list[tuple[int, int]]:
    return [(r, w - 2 - r) for w in range(2, N + 1) for r in range(w - 1)]


@lru_cache(maxsize=None)
def basis(N: int) -> tuple:
    return ("A", "B", *sigma_keys(N))


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


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------

class MetabElt:
    """``cA A + cB B + sum sigma[r, s] sigma_{r,s}`` with weights ``<= N``."""

    __slots__ = ("N", "_c")

    def __init__(self, N: int, coeffs: Mapping | None = None):
        self.N = N
        self._c: dict = {}
        for k, v in (coeffs or {}).items():
            if weight(k) > N:
                if v:
                    raise DepthMismatch(f"basis element {k} exceeds depth {N}")
                continue
            _add_into(self._c, k, v)

    @classmethod
    def gen(cls, N: int, key: Key, value=1) -> "MetabElt":
        return cls(N, {key: Q(value) if isinstance(value, int) else value})

    @classmethod
    def from_parts(cls, N: int, cA=0, cB=0, sigma: Mapping | None = None) -> "MetabElt":
        c = {"A": cA, "B": cB}
        c.update(sigma or {})
        return cls(N, c)

    @property
    def cA(self):
        return self._c.get("A", 0)

    @property
    def cB(self):
        return self._c.get("B", 0)

    @property
    def sigma(self) -> dict:
        return {k: v for k, v in self._c.items() if isinstance(k, tuple)}

    def __getitem__(self, key):
        return self._c.get(key, 0)

    def items(self):
        return self._c.items()

    def __bool__(self) -> bool:
        return bool(self._c)

    def _check(self, other: "MetabElt") -> None:
        if self.N != other.N:
            raise DepthMismatch(f"depth bounds differ: {self.N} vs {other.N}")

    def __add__(self, other: "MetabElt") -> "MetabElt":
        self._check(other)
        c = dict(self._c)
        for k, v in other._c.items():
            _add_into(c, k, v)
        return MetabElt(self.N, c)

    def __neg__(self) -> "MetabElt":
        return MetabElt(self.N, {k: -v for k, v in self._c.items()})

    def __sub__(self, other: "MetabElt") -> "MetabElt":
        return self + (-other)

    def scale(self, c) -> "MetabElt":
        return MetabElt(self.N, {k: v * c for k, v in self._c.items()})

    def __mul__(self, c) -> "MetabElt":
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, MetabElt):
            return NotImplemented
        if self.N != other.N:
            return False
        keys = set(self._c) | set(other._c)
        return all(self[k] == other[k] for k in keys)

    __hash__ = None

    def truncate(self, N: int) -> "MetabElt":
        return MetabElt(N, {k: v for k, v in self._c.items() if weight(k) <= N})

    def map_coeffs(self, fn: Callable) -> "MetabElt":
        return MetabElt(self.N, {k: fn(v) for k, v in self._c.items()})

    def __repr__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for k in basis(self.N):
            if k in self._c:
                name = k if isinstance(k, str) else f"s{k[0]}{k[1]}" if max(k) < 10 else f"s({k[0]},{k[1]})"
                parts.append(f"({self._c[k]!s})*{name}")
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {
            "depth": self.N,
            "A": value_to_json(self.cA),
            "B": value_to_json(self.cB),
            "sigma": [
                {"r": r, "s": s, "value": value_to_json(self._c[(r, s)])}
                for (r, s) in sigma_keys(self.N)
                if (r, s) in self._c
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "MetabElt":
        c = {"A": value_from_json(data["A"]), "B": value_from_json(data["B"])}
        for t in data["sigma"]:
            c[(t["r"], t["s"])] = value_from_json(t["value"])
        return cls(data["depth"], c)


def _bracket_keys(k1: Key, k2: Key):
    """``[k1, k2]`` as ``(sign, key)`` or ``None``."""
    if k1 == k2:
        return None
    if k1 == "A" and k2 == "B":
        return 1, (0, 0)
    if k1 == "B" and k2 == "A":
        return -1, (0, 0)
    if isinstance(k1, tuple) and isinstance(k2, tuple):
        return None
    if isinstance(k1, tuple):
        res = _bracket_keys(k2, k1)
        return (-res[0], res[1]) if res else None
    r, s = k2
    return (1, (r, s + 1)) if k1 == "A" else (1, (r + 1, s))


def bracket(u: MetabElt, v: MetabElt) -> MetabElt:
    u._check(v)
    N = u.N
    out: dict = {}
    for k1, a in u._c.items():
        for k2, b in v._c.items():
            res = _bracket_keys(k1, k2)
            if res is None:
                continue
            sign, k = res
            if weight(k) > N:
                continue
            _add_into(out, k, a * b if sign > 0 else -(a * b))
    return MetabElt(N, out)


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

class WOp:
    """Endomorphism of the weight-truncated algebra, as ``{source: {target: coeff}}``."""

    __slots__ = ("N", "_m")

    def __init__(self, N: int, matrix: Mapping | None = None):
        self.N = N
        self._m: dict = {}
        for src, col in (matrix or {}).items():
            clean: dict = {}
            for dst, v in col.items():
                if weight(dst) <= N:
                    _add_into(clean, dst, v)
            if clean:
                self._m[src] = clean

    @classmethod
    def identity(cls, N: int) -> "WOp":
        return cls(N, {k: {k: mpq(1)} for k in basis(N)})

    @classmethod
    def zero(cls, N: int) -> "WOp":
        return cls(N)

    def column(self, src: Key) -> dict:
        return self._m.get(src, {})

    def entry(self, src: Key, dst: Key):
        return self._m.get(src, {}).get(dst, 0)

    def apply(self, u: MetabElt) -> MetabElt:
        if u.N != self.N:
            raise DepthMismatch(f"operator depth {self.N} vs element depth {u.N}")
        out: dict = {}
        for k, a in u._c.items():
            for dst, v in self._m.get(k, {}).items():
                _add_into(out, dst, v * a)
        return MetabElt(self.N, out)

    __call__ = apply

    def _check(self, other: "WOp") -> None:
        if self.N != other.N:
            raise DepthMismatch(f"operator depths differ: {self.N} vs {other.N}")

    def __add__(self, other: "WOp") -> "WOp":
        self._check(other)
        m = {k: dict(v) for k, v in self._m.items()}
        for src, col in other._m.items():
            tgt = m.setdefault(src, {})
            for dst, v in col.items():
                _add_into(tgt, dst, v)
        return WOp(self.N, m)

    def __neg__(self) -> "WOp":
        return self.scale(-1)

    def __sub__(self, other: "WOp") -> "WOp":
        return self + (-other)

    def scale(self, c) -> "WOp":
        return WOp(self.N, {s: {d: v * c for d, v in col.items()} for s, col in self._m.items()})

    def __rmul__(self, c) -> "WOp":
        return self.scale(c)

    def __matmul__(self, other: "WOp") -> "WOp":
        """Composition: ``(self @ other)(u) = self(other(u))``."""
        self._check(other)
        m: dict = {}
        for src, col in other._m.items():
            out: dict = {}
            for mid, a in col.items():
                for dst, b in self._m.get(mid, {}).items():
                    _add_into(out, dst, b * a)
            if out:
                m[src] = out
        return WOp(self.N, m)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WOp):
            return NotImplemented
        if self.N != other.N:
            return False
        for src in set(self._m) | set(other._m):
            a, b = self._m.get(src, {}), other._m.get(src, {})
            for dst in set(a) | set(b):
                if a.get(dst, 0) != b.get(dst, 0):
                    return False
        return True

    __hash__ = None

    def __bool__(self) -> bool:
        return bool(self._m)

    def entries(self):
        for src, col in self._m.items():
            for dst, v in col.items():
                yield src, dst, v

    def is_raising(self) -> bool:
        return all(weight(d) > weight(s) for s, d, _ in self.entries())

    def decompose(self):
        return span_decompose(self)

    def to_json(self) -> dict:
        def name(k):
            return k if isinstance(k, str) else f"s{k[0]},{k[1]}"

        return {
            "depth": self.N,
            "entries": [{"from": name(s), "to": name(d), "value": value_to_json(v)} for s, d, v in self.entries()],
        }

    def __repr__(self) -> str:
        return f"WOp(N={self.N}, nnz={sum(len(c) for c in self._m.values())})"


def ad(u: MetabElt) -> WOp:
    m = {}
    for k in basis(u.N):
        img = bracket(u, MetabElt(u.N, {k: mpq(1)}))
        if img:
            m[k] = dict(img.items())
    return WOp(u.N, m)


@lru_cache(maxsize=None)
def ad_gen(key: Key, N: int) -> WOp:
    return ad(MetabElt(N, {key: mpq(1)}))


@lru_cache(maxsize=None)
def tau(u: int, v: int, N: int) -> WOp:
    """``ad_B^u ad_A^v`` (``tau(0, 0)`` is the identity)."""
    out = WOp.identity(N)
    for _ in range(v):
        out = ad_gen("A", N) @ out
    for _ in range(u):
        out = ad_gen("B", N) @ out
    return out


def ad_sigma(r: int, s: int, N: int) -> WOp:
    return ad_gen((r, s), N)


def exp_op(M: WOp) -> WOp:
    if not M.is_raising():
        raise NotNilpotentError("exp_op needs a strictly weight-raising operator")
    out = WOp.identity(M.N)
    term = WOp.identity(M.N)
    for k in range(1, M.N):
        term = (M @ term).scale(mpq(1, k))
        if not term:
            break
        out = out + term
    return out


def log_op(M: WOp) -> WOp:
    X = M - WOp.identity(M.N)
    if not X.is_raising():
        raise NotNilpotentError("log_op needs identity plus a strictly weight-raising operator")
    out = WOp.zero(M.N)
    power = WOp.identity(M.N)
    for k in range(1, M.N):
        power = X @ power
        if not power:
            break
        out = out + power.scale(mpq((-1) ** (k + 1), k))
    return out


# ---------------------------------------------------------------------------
# span {1, tau[u, v], ad sigma[r, s]}
# ---------------------------------------------------------------------------

def span_assemble(N: int, c=0, gstar: Mapping | None = None, g: Mapping | None = None) -> WOp:
    out = WOp.identity(N).scale(c) if c else WOp.zero(N)
    for (u, v), a in (gstar or {}).items():
        if a and u + v < N:
            out = out + tau(u, v, N).scale(a)
    for (r, s), a in (g or {}).items():
        if a and r + s + 3 <= N:
            out = out + ad_sigma(r, s, N).scale(a)
    return out


def decompose_columns(imA: Mapping, imB: Mapping, N: int) -> tuple:
    """Span coefficients read from the images of ``A`` and ``B`` alone.

    On ``A``: ``tau[u,0]`` gives ``-sigma[u-1,0]`` and ``ad sigma[r,s]`` gives
    ``-sigma[r,s+1]``; these never collide.  On ``B``: ``tau[u,v]`` (``v >= 1``)
    gives ``sigma[u,v-1]`` and ``ad sigma[r,s]`` gives ``-sigma[r+1,s]``.
    """
    c = imA.get("A", 0)
    gstar: dict = {}
    g: dict = {}
    for key, v in imA.items():
        if key == "A" or key == "B" or not v:
            continue
        r, s = key
        if s == 0:
            gstar[(r + 1, 0)] = -v
        else:
            g[(r, s - 1)] = -v
    for u, w in sigma_keys(N):
        val = imB.get((u, w), 0) + g.get((u - 1, w), 0)
        if val:
            gstar[(u, w + 1)] = val
    return c, gstar, g


def span_decompose(M: WOp) -> tuple:
    """``(c, gstar, g)`` with ``M = c + sum gstar[u,v] tau[u,v] + sum g[r,s] ad(sigma[r,s])``.

    Only indices whose contribution is visible at depth ``N`` are returned:
    ``u + v <= N - 1`` and ``r + s <= N - 3``.  The full matrix is rebuilt
    from the coefficients and compared with ``M``.
    """
    N = M.N
    c, gstar, g = decompose_columns(M.column("A"), M.column("B"), N)
    rebuilt = span_assemble(N, c, gstar, g)
    if rebuilt != M:
        diff = M - rebuilt
        raise NotInSpanError("operator is not in the span of 1, tau, ad sigma", list(diff.entries())[:10])
    return c, gstar, g


def exp_ad_columns(h: MetabElt) -> tuple[dict, dict]:
    """Images of ``A`` and ``B`` under ``exp(ad h)``, by repeated brackets."""
    out = []
    for key in ("A", "B"):
        term = MetabElt(h.N, {key: mpq(1)})
        acc = term
        k = 1
        while True:
            term = bracket(h, term).scale(mpq(1, k))
            if not term:
                break
            acc = acc + term
            k += 1
        out.append(dict(acc.items()))
    return out[0], out[1]


# ---------------------------------------------------------------------------
# logarithm of a grouplike element
# ---------------------------------------------------------------------------

def exp_data(iota: MetabElt) -> tuple:
    """``(Hstar, H)``: span coefficients of ``exp(ad iota)``, computed one weight above."""
    N1 = iota.N + 1
    lifted = MetabElt(N1, dict(iota.items()))
    c, gstar, g = span_decompose(exp_op(ad(lifted)))
    if c != 1:
        raise ValueError("exp(ad iota) must have unit scalar part")
    return gstar, g


def _pow(x, n: int):
    out = 1
    for _ in range(n):
        out = out * x
    return out


def grouplike_log(Hstar: Mapping, H: Mapping, hA, hB, depth: int | None = None) -> dict:
    """Recover ``h[r, s]`` from the span coefficients of ``exp(ad(hA A + hB B + sum h sigma))``.

    Solves, for ``r + s + 2 <= depth``,
    ``H[r,s] = hB^(r+1) hA^(s+1) / ((r+s+2) r! (s+1)!)
               + sum_{u<=r, v<=s} h[u,v] hB^(r-u) hA^(s-v) / ((r-u+s-v+1) (r-u)! (s-v)!)``
    which is triangular with unit diagonal.
    """
    if Hstar.get((0, 1), 0) != hA or Hstar.get((1, 0), 0) != hB:
        raise ValueError("hA, hB must equal the tau[0,1] and tau[1,0] coefficients")
    if depth is None:
        depth = max((r + s + 2 for r, s in H), default=2)
    h: dict = {}
    for r, s in sigma_keys(depth):
        rhs = H.get((r, s), 0) - _pow(hB, r + 1) * _pow(hA, s + 1) * mpq(
            1, (r + s + 2) * factorial(r) * factorial(s + 1)
        )
        for u in range(r + 1):
            for v in range(s + 1):
                if (u, v) == (r, s) or not h.get((u, v)):
                    continue
                du, dv = r - u, s - v
                rhs = rhs - h[(u, v)] * _pow(hB, du) * _pow(hA, dv) * mpq(
                    1, (du + dv + 1) * factorial(du) * factorial(dv)
                )
        if rhs:
            h[(r, s)] = rhs
    return h


def grouplike_log_closed(H: Mapping, hA, hB, depth: int) -> dict:
    """Bernoulli closed form of the same logarithm, used as a cross-check.

    ``h[r,s] = sum B_{u+v} hB^u hA^v H[r-u, s-v] / (u! v!) - hA hB [U^s V^r] T(hA U, hB V)``
    with ``B_1 = -1/2`` and ``T`` the operative kernel.
    """
    T = kernel_T(depth)
    h: dict = {}
    for r, s in sigma_keys(depth):
        acc = 0
        for u in range(r + 1):
            for v in range(s + 1):
                Hv = H.get((r - u, s - v), 0)
                if not Hv:
                    continue
                b = _bernoulli_minus(u + v)
                if b:
                    acc = acc + Hv * _pow(hB, u) * _pow(hA, v) * (b / (factorial(u) * factorial(v)))
        t = T[(s, r)]
        if t:
            acc = acc - _pow(hA, s + 1) * _pow(hB, r + 1) * t
        if acc:
            h[(r, s)] = acc
    return h


def log_from_exp_op(M: WOp) -> MetabElt:
    """``w`` with ``exp(ad w) = M``, via span decomposition and the triangular solve.

    ``M`` must act on depth ``N + 1`` for a depth-``N`` answer.
    """
    c, gstar, g = span_decompose(M)
    if c != 1:
        raise ValueError("operator is not unipotent")
    hA, hB = gstar.get((0, 1), 0), gstar.get((1, 0), 0)
    N = M.N - 1
    h = grouplike_log(gstar, g, hA, hB, depth=N)
    return MetabElt.from_parts(N, hA, hB, h)


# ---------------------------------------------------------------------------
# BCH and the word-average identity
# ---------------------------------------------------------------------------

def metab_bch(X: MetabElt, Y: MetabElt) -> MetabElt:
    """``log(e^X e^Y) = X + Y + K(ad X, ad Y)[X, Y]`` with the Kurlin kernel ``K``.

    ``ad X`` and ``ad Y`` commute on the abelian ideal spanned by the sigmas,
    so the bivariate series can be evaluated there term by term.
    """
    X._check(Y)
    N = X.N
    Z = bracket(X, Y)
    out = X + Y
    if not Z:
        return out
    K = kurlin_kernel(N)
    # ad_Y^j Z for all j, then ad_X^i of each
    ys = [Z]
    while len(ys) <= N and ys[-1]:
        ys.append(bracket(Y, ys[-1]))
    for j, Zj in enumerate(ys):
        cur = Zj
        i = 0
        while cur and i + j <= N:
            k = K[(i, j)]
            if k:
                out = out + cur.scale(k)
            cur = bracket(X, cur)
            i += 1
    return out


def word_sum(i: int, j: int, N: int) -> WOp:
    """``sum of ad_w`` over words with ``i`` letters B and ``j`` letters A."""
    table: dict = {(0, 0): WOp.identity(N)}
    for n in range(1, i + j + 1):
        for b in range(max(0, n - j), min(i, n) + 1):
            a = n - b
            acc = WOp.zero(N)
            if a:
                acc = acc + ad_gen("A", N) @ table[(b, a - 1)]
            if b:
                acc = acc + ad_gen("B", N) @ table[(b - 1, a)]
            table[(b, a)] = acc
    return table[(i, j)]


@dataclass
class AdAverageReport:
    i: int
    j: int
    ok: bool
    mismatch: list

    def to_json(self) -> dict:
        return {"i": self.i, "j": self.j, "ok": self.ok, "mismatch": [[str(s), str(d), str(v)] for s, d, v in self.mismatch]}


def adaverage(i: int, j: int, N: int | None = None) -> AdAverageReport:
    """Check ``sum_w ad_w = C(i+j, i) tau[i,j] + (i+j-1)!/((i-1)! j!) ad(sigma[i-1, j-1])``."""
    if N is None:
        N = i + j + 3
    lhs = word_sum(i, j, N)
    rhs = tau(i, j, N).scale(comb(i + j, i))
    if i >= 1 and j >= 1:
        coef = mpq(factorial(i + j - 1), factorial(i - 1) * factorial(j))
        rhs = rhs + ad_sigma(i - 1, j - 1, N).scale(coef)
    diff = lhs - rhs
    return AdAverageReport(i, j, not diff, list(diff.entries())[:10])


def random_elt(rng, N: int, lo: int = -5, hi: int = 5, den: int = 4) -> MetabElt:
    """Random element with small rational coefficients (for tests and the CLI suites)."""
    c = {}
    for k in basis(N):
        c[k] = mpq(rng.randint(lo, hi), rng.randint(1, den))
    return MetabElt(N, c)

