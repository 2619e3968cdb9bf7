"""Exact rationals, truncated log-Laurent series, bivariate kernels.

Everything here is exact: coefficients are ``gmpy2.mpq`` rationals and every
series records the last exponent up to which it is known.
"""
from __future__ import annotations

from functools import lru_cache
from math import comb, factorial
from typing import Mapping, Sequence

from gmpy2 import mpq

Rational = type(mpq())


class TruncationError(ValueError):
    """Raised when a coefficient beyond a series' valid order is requested."""


class CancellationError(ArithmeticError):
    """A singular prefactor of a kernel failed to cancel.

    ``monomials`` lists the ``(i, j)`` exponents of the offending terms.
    """

    def __init__(self, message: str, monomials: Sequence[tuple[int, int]]):
        super().__init__(f"{message}: offending monomials {list(monomials)[:8]}")
        self.monomials = list(monomials)


def Q(value, den=None) -> Rational:
    """Coerce ints, strings ("-3/4") and fractions to an exact rational."""
    if den is not None:
        return mpq(value, den)
    if isinstance(value, Rational):
        return value
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted")
    return mpq(value)


def qstr(value) -> str:
    """Serialize a rational as ``p/q`` (denominator always present)."""
    value = Q(value)
    return f"{value.numerator}/{value.denominator}"


def parse_q(text: str) -> Rational:
    return mpq(text.strip())


# ---------------------------------------------------------------------------
# ZLSeries
# ---------------------------------------------------------------------------

class ZLSeries:
    """Truncated series ``sum c[n, j] z^n L^j`` with ``L`` standing for ``log z``.

    ``prec`` is the largest exponent of ``z`` whose coefficients are known;
    the true value is the stored sum plus ``O(z^(prec+1))``.  Exponents may be
    negative (finite principal part).
    """

    __slots__ = ("_c", "prec")

    def __init__(self, coeffs: Mapping[tuple[int, int], object] | None = None, prec: int = 0):
        self.prec = int(prec)
        c = {}
        if coeffs:
            for (n, j), v in coeffs.items():
                if n <= self.prec and v:
                    if j < 0:
                        raise ValueError("negative power of L")
                    c[(int(n), int(j))] = Q(v)
        self._c = c

    @classmethod
    def _raw(cls, c: dict, prec: int) -> "ZLSeries":
        s = cls.__new__(cls)
        s._c = c
        s.prec = prec
        return s

    @classmethod
    def constant(cls, value, prec: int) -> "ZLSeries":
        return cls({(0, 0): value}, prec)

    @classmethod
    def monomial(cls, n: int, j: int = 0, value=1, prec: int = 0) -> "ZLSeries":
        return cls({(n, j): value}, prec)

    @classmethod
    def from_list(cls, values: Sequence, prec: int | None = None, start: int = 0) -> "ZLSeries":
        """``values[i]`` is the coefficient of ``z^(start+i)``."""
        if prec is None:
            prec = start + len(values) - 1
        return cls({(start + i, 0): v for i, v in enumerate(values)}, prec)

    # -- inspection ---------------------------------------------------------
    def items(self):
        return self._c.items()

    def terms(self) -> list[tuple[int, int, Rational]]:
        return sorted((n, j, v) for (n, j), v in self._c.items())

    def __getitem__(self, key: tuple[int, int]) -> Rational:
        n, j = key
        if n > self.prec:
            raise TruncationError(f"coefficient z^{n} requested beyond valid order {self.prec}")
        return self._c.get((n, j), mpq(0))

    def coeff(self, n: int, j: int = 0) -> Rational:
        return self[(n, j)]

    def valuation(self) -> int:
        """Lowest exponent carrying a nonzero coefficient (``prec + 1`` if none)."""
        return min((n for n, _ in self._c), default=self.prec + 1)

    def log_degree(self) -> int:
        return max((j for _, j in self._c), default=0)

    def is_log_free(self) -> bool:
        return all(j == 0 for _, j in self._c)

    def __bool__(self) -> bool:
        return bool(self._c)

    def truncate(self, prec: int) -> "ZLSeries":
        if prec > self.prec:
            raise TruncationError(f"cannot extend series valid to {self.prec} up to {prec}")
        return ZLSeries._raw({k: v for k, v in self._c.items() if k[0] <= prec}, prec)

    def regularized_value(self) -> Rational:
        """Value at the basepoint: the ``z^0 L^0`` coefficient."""
        return self[(0, 0)]

    # -- arithmetic ---------------------------------------------------------
    def _scalar(self, value) -> "ZLSeries":
        return ZLSeries._raw({(0, 0): Q(value)} if value else {}, self.prec)

    def __add__(self, other) -> "ZLSeries":
        if not isinstance(other, ZLSeries):
            if not other:
                return self
            other = self._scalar(other)
        prec = min(self.prec, other.prec)
        c = {k: v for k, v in self._c.items() if k[0] <= prec}
        for k, v in other._c.items():
            if k[0] <= prec:
                w = c.get(k)
                if w is None:
                    c[k] = v
                else:
                    w = w + v
                    if w:
                        c[k] = w
                    else:
                        del c[k]
        return ZLSeries._raw(c, prec)

    __radd__ = __add__

    def __neg__(self) -> "ZLSeries":
        return ZLSeries._raw({k: -v for k, v in self._c.items()}, self.prec)

    def __sub__(self, other) -> "ZLSeries":
        return self + (-other)

    def __rsub__(self, other) -> "ZLSeries":
        return (-self) + other

    def __mul__(self, other) -> "ZLSeries":
        if not isinstance(other, ZLSeries):
            other = Q(other)
            if not other:
                return ZLSeries._raw({}, self.prec)
            return ZLSeries._raw({k: v * other for k, v in self._c.items()}, self.prec)
        v1, v2 = self.valuation(), other.valuation()
        prec = min(self.prec + v2, other.prec + v1)
        c: dict = {}
        for (n1, j1), a in self._c.items():
            lim = prec - n1
            for (n2, j2), b in other._c.items():
                if n2 <= lim:
                    k = (n1 + n2, j1 + j2)
                    w = c.get(k)
                    c[k] = a * b if w is None else w + a * b
        return ZLSeries._raw({k: v for k, v in c.items() if v}, prec)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ZLSeries":
        if isinstance(other, ZLSeries):
            return self * other.inverse()
        return self * (1 / Q(other))

    def __pow__(self, e: int) -> "ZLSeries":
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return ZLSeries.constant(1, self.prec)
        out = self
        for _ in range(e - 1):
            out = out * self
        return out

    def inverse(self) -> "ZLSeries":
        """Multiplicative inverse of an L-free series with a nonzero leading term."""
        if not self.is_log_free():
            raise ValueError("inverse requires an L-free series")
        if not self._c:
            raise ZeroDivisionError("series is zero to its valid order")
        v = self.valuation()
        lead = self._c[(v, 0)]
        rel = self.prec - v
        a = [self._c.get((v + i, 0), mpq(0)) for i in range(rel + 1)]
        g = [1 / lead]
        for k in range(1, rel + 1):
            acc = mpq(0)
            for i in range(1, k + 1):
                if a[i]:
                    acc += a[i] * g[k - i]
            g.append(-acc / lead)
        return ZLSeries._raw({(-v + k, 0): gk for k, gk in enumerate(g) if gk}, -v + rel)

    def derivative(self) -> "ZLSeries":
        """d/dz, with dL/dz = 1/z."""
        c: dict = {}
        for (n, j), v in self._c.items():
            if n:
                k = (n - 1, j)
                c[k] = c.get(k, 0) + n * v
            if j:
                k = (n - 1, j - 1)
                c[k] = c.get(k, 0) + j * v
        return ZLSeries._raw({k: Q(v) for k, v in c.items() if v}, self.prec - 1)

    def __eq__(self, other) -> bool:
        """Equality up to the common valid order."""
        if not isinstance(other, ZLSeries):
            other = self._scalar(other)
        prec = min(self.prec, other.prec)
        a = {k: v for k, v in self._c.items() if k[0] <= prec}
        b = {k: v for k, v in other._c.items() if k[0] <= prec}
        return a == b

    __hash__ = None

    def __repr__(self) -> str:
        if not self._c:
            return f"ZLSeries(0 + O(z^{self.prec + 1}))"
        parts = []
        for n, j, v in self.terms()[:8]:
            mono = "".join([f"z^{n}" if n else "", f"L^{j}" if j else ""]) or "1"
            parts.append(f"{v}*{mono}")
        more = " + ..." if len(self._c) > 8 else ""
        return f"ZLSeries({' + '.join(parts)}{more} + O(z^{self.prec + 1}))"

    def to_json(self) -> dict:
        return {
            "order": self.prec,
            "terms": [{"n": n, "j": j, "value": qstr(v)} for n, j, v in self.terms()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ZLSeries":
        return cls({(t["n"], t["j"]): parse_q(t["value"]) for t in data["terms"]}, data["order"])


def antiderivative(f: ZLSeries) -> ZLSeries:
    """Regularized primitive: ``d/dz F = f`` and the ``z^0 L^0`` coefficient of F is 0.

    ``z^-1 L^j`` integrates to ``L^(j+1)/(j+1)``; other monomials are reduced
    by integrating by parts in ``L``.
    """
    out: dict = {}

    def add(k, v):
        w = out.get(k)
        out[k] = v if w is None else w + v

    for (n, j), v in f.items():
        if n == -1:
            add((0, j + 1), v / (j + 1))
            continue
        # int z^n L^j = z^(n+1) sum_i (-1)^i j!/(j-i)! L^(j-i) / (n+1)^(i+1)
        m = mpq(1, n + 1)
        coef = v * m
        for i in range(j + 1):
            add((n + 1, j - i), coef)
            coef = -coef * (j - i) * m
    return ZLSeries._raw({k: v for k, v in out.items() if v}, f.prec + 1)


def iterated_integral(forms: Sequence[ZLSeries], prec: int | None = None) -> ZLSeries:
    """``I(w1, ..., wn)`` with ``dI/dz = w1 * I(w2, ..., wn)`` and ``I() = 1``.

    Each form is the ``dz``-coefficient of a one-form.  Every step uses the
    regularized primitive, so the result vanishes at the basepoint.
    """
    if not forms:
        p = prec if prec is not None else 0
        return ZLSeries.constant(1, p)
    acc = antiderivative(forms[-1])
    for w in reversed(forms[:-1]):
        acc = antiderivative(w * acc)
    if prec is not None:
        acc = acc.truncate(min(prec, acc.prec))
    return acc


# ---------------------------------------------------------------------------
# Bernoulli numbers
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _bernoulli_minus(m: int) -> Rational:
    # t/(e^t - 1) convention, B_1 = -1/2
    if m == 0:
        return mpq(1)
    acc = mpq(0)
    for k in range(m):
        acc += comb(m + 1, k) * _bernoulli_minus(k)
    return -acc / (m + 1)


def bernoulli(m: int) -> Rational:
    """Coefficients of ``T/(1 - exp(-T)) = sum B_m T^m / m!`` (so ``B_1 = 1/2``)."""
    if m < 0:
        raise ValueError("m must be non-negative")
    b = _bernoulli_minus(m)
    return -b if m == 1 else b


# ---------------------------------------------------------------------------
# bivariate truncated power series
# ---------------------------------------------------------------------------

class BivarSeries:
    """Power series in two commuting variables ``U``, ``V`` truncated at total degree ``D``.

    ``coeffs[(i, j)]`` multiplies ``U^i V^j``.
    """

    __slots__ = ("coeffs", "D")

    def __init__(self, coeffs: Mapping[tuple[int, int], object], D: int):
        self.D = D
        self.coeffs = {(i, j): v for (i, j), v in coeffs.items() if i + j <= D and v}

    def __getitem__(self, key: tuple[int, int]):
        i, j = key
        if i + j > self.D:
            raise TruncationError(f"U^{i} V^{j} is beyond total degree {self.D}")
        return self.coeffs.get(key, mpq(0))

    @classmethod
    def from_univariate(cls, values: Sequence, a, b, D: int) -> "BivarSeries":
        """``sum values[n] * (a U + b V)^n`` truncated at degree ``D``."""
        a, b = Q(a), Q(b)
        out: dict = {}
        for n in range(min(D, len(values) - 1) + 1):
            c = values[n]
            if not c:
                continue
            for i in range(n + 1):
                w = c * comb(n, i) * a ** i * b ** (n - i)
                if w:
                    out[(i, n - i)] = out.get((i, n - i), 0) + w
        return cls(out, D)

    @classmethod
    def one(cls, D: int) -> "BivarSeries":
        return cls({(0, 0): mpq(1)}, D)

    def __add__(self, other: "BivarSeries") -> "BivarSeries":
        D = min(self.D, other.D)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return BivarSeries(out, D)

    def __neg__(self) -> "BivarSeries":
        return BivarSeries({k: -v for k, v in self.coeffs.items()}, self.D)

    def __sub__(self, other: "BivarSeries") -> "BivarSeries":
        return self + (-other)

    def __mul__(self, other) -> "BivarSeries":
        if not isinstance(other, BivarSeries):
            return BivarSeries({k: v * other for k, v in self.coeffs.items()}, self.D)
        D = min(self.D, other.D)
        out: dict = {}
        for (i1, j1), a in self.coeffs.items():
            for (i2, j2), b in other.coeffs.items():
                if i1 + j1 + i2 + j2 <= D:
                    k = (i1 + i2, j1 + j2)
                    out[k] = out.get(k, 0) + a * b
        return BivarSeries(out, D)

    __rmul__ = __mul__

    def inverse(self) -> "BivarSeries":
        c0 = self.coeffs.get((0, 0))
        if not c0:
            raise ZeroDivisionError("constant term vanishes")
        rest = BivarSeries({k: -v / c0 for k, v in self.coeffs.items() if k != (0, 0)}, self.D)
        acc = BivarSeries.one(self.D)
        term = BivarSeries.one(self.D)
        for _ in range(self.D):
            term = term * rest
            acc = acc + term
        return acc * (1 / c0)

    def divide_linear(self, a, b) -> "BivarSeries":
        """Exact quotient by ``a U + b V``; the valid degree drops by one.

        Raises :class:`CancellationError` when the division leaves a remainder.
        """
        a, b = Q(a), Q(b)
        if not a and not b:
            raise ZeroDivisionError("zero linear form")
        out: dict = {}
        bad: list[tuple[int, int]] = []
        for n in range(self.D + 1):
            p = [self.coeffs.get((i, n - i), mpq(0)) for i in range(n + 1)]
            if n == 0:
                if p[0]:
                    bad.append((0, 0))
                continue
            # p_i = a q_{i-1} + b q_i with q of length n
            q = [mpq(0)] * n
            if b:
                for i in range(n):
                    q[i] = (p[i] - (a * q[i - 1] if i else 0)) / b
                rem = p[n] - a * q[n - 1]
                if rem:
                    bad.append((n, 0))
            else:
                for i in range(n):
                    q[i] = p[i + 1] / a
                if p[0]:
                    bad.append((0, n))
            for i, v in enumerate(q):
                if v:
                    out[(i, n - 1 - i)] = v
        if bad:
            raise CancellationError(f"series is not divisible by {a}*U + {b}*V", bad)
        return BivarSeries(out, self.D - 1)

    def truncate(self, D: int) -> "BivarSeries":
        return BivarSeries(self.coeffs, min(D, self.D))

    def __eq__(self, other) -> bool:
        if not isinstance(other, BivarSeries):
            return NotImplemented
        D = min(self.D, other.D)
        return self.truncate(D).coeffs == other.truncate(D).coeffs

    __hash__ = None

    def __repr__(self) -> str:
        return f"BivarSeries(D={self.D}, {dict(sorted(self.coeffs.items()))})"


def _exp_minus_one_over(n: int) -> list[Rational]:
    # (e^c - 1)/c
    return [mpq(1, factorial(k + 1)) for k in range(n + 1)]


def _c_over_exp_minus_one(n: int) -> list[Rational]:
    # c/(e^c - 1)
    return [_bernoulli_minus(k) / factorial(k) for k in range(n + 1)]


def _E(a, b, D: int) -> BivarSeries:
    return BivarSeries.from_univariate(_exp_minus_one_over(D), a, b, D)


def _E_inv(a, b, D: int) -> BivarSeries:
    return BivarSeries.from_univariate(_c_over_exp_minus_one(D), a, b, D)


def kernel_T(D: int, variant: str = "operative") -> BivarSeries:
    """Expansion of the logarithm correction kernel to total degree ``D``.

    ``operative``: ``(1/U) (1 - (e^V - 1)/V * (U+V)/(e^(U+V) - 1))``, the
    kernel that makes the Bernoulli closed form of the grouplike logarithm
    exact.  ``literal``: ``(1/U) (1 - (U+V)/V * (e^U - 1)/(e^(U+V) - 1))``,
    whose singular prefactor does not cancel; requesting it raises
    :class:`CancellationError`.
    """
    if D < 0:
        raise ValueError("D must be non-negative")
    n = D + 2
    if variant == "operative":
        num = BivarSeries.one(n) - _E(0, 1, n) * _E_inv(1, 1, n)
        return num.divide_linear(1, 0).truncate(D)
    if variant == "literal":
        # (V E(U+V) - U E(U)) / (U V E(U+V))
        num = _E(1, 1, n) * BivarSeries({(0, 1): 1}, n) - _E(1, 0, n) * BivarSeries({(1, 0): 1}, n)
        num = num * _E_inv(1, 1, n)
        return num.divide_linear(0, 1).divide_linear(1, 0).truncate(D)
    raise ValueError(f"unknown variant {variant!r}")


def kurlin_kernel(D: int) -> BivarSeries:
    """``K(a, b) = (1/b) (1 - E(a)/E(a+b))`` with ``E(c) = (e^c - 1)/c``.

    In the metabelian Lie algebra ``log(e^X e^Y) = X + Y + K(ad X, ad Y)[X, Y]``
    where the operators act on the derived subalgebra.  ``U`` holds ``a``,
    ``V`` holds ``b``.
    """
    n = D + 1
    num = BivarSeries.one(n) - _E(1, 0, n) * _E_inv(1, 1, n)
    return num.divide_linear(0, 1).truncate(D)


def kernel_bch(D: int, variant: str = "operative") -> BivarSeries:
    """The kernel filling the BCH slot of the period map, in ``(U, V)``.

    With ``U = int(alpha) ad_A`` and ``V = int(beta) ad_B`` the operative
    kernel is ``K(-V, U+V) = (1/(U+V)) (1 - (1 - e^-V)/V * U/(e^U - 1))``.
    The ``literal`` variant ``(1/(U+V)) (1 - (e^-V - 1)/V * (U+V)/(e^(U+V) - 1))``
    is not a power series and raises :class:`CancellationError`.
    """
    if D < 0:
        raise ValueError("D must be non-negative")
    n = D + 1
    if variant == "operative":
        num = BivarSeries.one(n) - _E(0, -1, n) * _E_inv(1, 0, n)
    elif variant == "literal":
        num = BivarSeries.one(n) + _E(0, -1, n) * _E_inv(1, 1, n)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return num.divide_linear(1, 1).truncate(D)


def substitute_kurlin(D: int) -> BivarSeries:
    """``K(-V, U+V)`` computed by substitution into :func:`kurlin_kernel`.

    Independent route to :func:`kernel_bch`; used to cross-check it.
    """
    K = kurlin_kernel(D)
    minus_v = BivarSeries({(0, 1): -1}, D)
    u_plus_v = BivarSeries({(1, 0): 1, (0, 1): 1}, D)
    out = BivarSeries({}, D)
    pa = [BivarSeries.one(D)]
    pb = [BivarSeries.one(D)]
    for _ in range(D):
        pa.append(pa[-1] * minus_v)
        pb.append(pb[-1] * u_plus_v)
    for (i, j), c in K.coeffs.items():
        out = out + pa[i] * pb[j] * c
    return out



def value_to_json(v):
    """JSON form of a coefficient: ``"p/q"`` for rationals, a term list for series."""
    if isinstance(v, ZLSeries):
        return v.to_json()
    return qstr(v)


def value_from_json(data):
    if isinstance(data, dict):
        return ZLSeries.from_json(data)
    return parse_q(data)
