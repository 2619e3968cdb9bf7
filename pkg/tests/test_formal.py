from fractions import Fraction
from math import factorial

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from kzbperiod.formal import (
    BivarSeries,
    CancellationError,
    TruncationError,
    ZLSeries,
    antiderivative,
    bernoulli,
    iterated_integral,
    kernel_bch,
    kernel_T,
    kurlin_kernel,
    parse_q,
    qstr,
    substitute_kurlin,
    value_from_json,
    value_to_json,
)

small_q = st.builds(lambda a, b: mpq(a, b), st.integers(-6, 6), st.integers(1, 5))


@st.composite
def zl(draw, lo=-2, hi=5, jmax=2, prec=8):
    c = {}
    for _ in range(draw(st.integers(0, 6))):
        c[(draw(st.integers(lo, hi)), draw(st.integers(0, jmax)))] = draw(small_q)
    return ZLSeries(c, prec)


def test_qstr_parse_roundtrip():
    assert qstr(mpq(-3, 4)) == "-3/4"
    assert qstr(2) == "2/1"
    assert parse_q("-5/7") == mpq(-5, 7)
    assert parse_q("3") == 3


@pytest.mark.parametrize(
    "f, expected",
    [
        (ZLSeries.constant(1, 5), ZLSeries.monomial(1, prec=6)),
        (ZLSeries.monomial(-1, prec=5), ZLSeries.monomial(0, 1, prec=6)),
        (ZLSeries.monomial(1, 1, prec=5), ZLSeries({(2, 1): mpq(1, 2), (2, 0): mpq(-1, 4)}, 6)),
    ],
)
def test_antiderivative_examples(f, expected):
    assert antiderivative(f) == expected


def test_iterated_integral_examples():
    dz = ZLSeries.constant(1, 6)
    dlog = ZLSeries.monomial(-1, prec=6)
    assert iterated_integral([dz]) == ZLSeries.monomial(1, prec=7)
    assert iterated_integral([dlog, dz]) == ZLSeries.monomial(1, prec=7)
    assert iterated_integral([dz, dlog]) == ZLSeries({(1, 1): 1, (1, 0): -1}, 7)


@settings(max_examples=60, deadline=None)
@given(zl(lo=-1))
def test_antiderivative_is_regularized_primitive(f):
    F = antiderivative(f)
    assert F.derivative() == f
    assert F.regularized_value() == 0


@settings(max_examples=40, deadline=None)
@given(zl(lo=0), zl(lo=0), zl(lo=0))
def test_iterated_integral_derivative_rule(a, b, c):
    lhs = iterated_integral([a, b, c]).derivative()
    assert lhs == a * iterated_integral([b, c])


@settings(max_examples=60, deadline=None)
@given(zl(), zl(), zl())
def test_ring_axioms(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a - a == 0


@settings(max_examples=60, deadline=None)
@given(zl(), zl())
def test_leibniz(a, b):
    assert (a * b).derivative() == a.derivative() * b + a * b.derivative()


@settings(max_examples=60, deadline=None)
@given(zl(lo=1, jmax=0), small_q.filter(bool), st.integers(-2, 2))
def test_inverse(tail, lead, v):
    s = ZLSeries.monomial(v, value=lead, prec=8) + ZLSeries.monomial(v, prec=8) * tail
    one = s * s.inverse()
    assert one == 1


@settings(max_examples=40, deadline=None)
@given(zl())
def test_json_roundtrip(a):
    assert ZLSeries.from_json(a.to_json()) == a
    assert value_from_json(value_to_json(a)) == a
    assert value_from_json(value_to_json(mpq(3, 7))) == mpq(3, 7)


def test_truncation_is_enforced():
    s = ZLSeries.constant(1, 3)
    with pytest.raises(TruncationError):
        s.coeff(4)
    with pytest.raises(TruncationError):
        s.truncate(5)
    # a pole costs precision in products
    assert (ZLSeries.monomial(-2, prec=3) * ZLSeries.constant(1, 3)).prec == 1


def _bernoulli_oracle(n):
    # T/(1 - e^-T): divide T by sum_{k>=1} (-1)^(k+1) T^k/k!, all in Fractions
    den = [Fraction((-1) ** k, factorial(k + 1)) for k in range(n + 1)]  # (1 - e^-T)/T
    inv = [Fraction(0)] * (n + 1)
    inv[0] = 1 / den[0]
    for m in range(1, n + 1):
        inv[m] = -sum(den[k] * inv[m - k] for k in range(1, m + 1)) / den[0]
    return [inv[m] * factorial(m) for m in range(n + 1)]


def test_bernoulli_examples_and_oracle():
    assert bernoulli(0) == 1
    assert bernoulli(1) == mpq(1, 2)
    assert bernoulli(2) == mpq(1, 6)
    assert bernoulli(3) == 0
    for m, b in enumerate(_bernoulli_oracle(16)):
        assert bernoulli(m) == mpq(b.numerator, b.denominator)
    with pytest.raises(ValueError):
        bernoulli(-1)


def _bmul(p, q, D):
    out = {}
    for (a, b), x in p.items():
        for (c, d), y in q.items():
            if a + b + c + d <= D:
                out[(a + c, b + d)] = out.get((a + c, b + d), 0) + Fraction(x) * Fraction(y)
    return {k: v for k, v in out.items() if v}


def _E_oracle(a, b, D):
    # (e^c - 1)/c at c = aU + bV expanded by the binomial theorem
    out = {}
    for n in range(D + 1):
        for i in range(n + 1):
            v = Fraction(factorial(n), factorial(i) * factorial(n - i)) * Fraction(a) ** i * Fraction(b) ** (n - i)
            v /= factorial(n + 1)
            if v:
                out[(i, n - i)] = out.get((i, n - i), 0) + v
    return out


def _as_frac(B: BivarSeries):
    return {k: Fraction(int(v.numerator), int(v.denominator)) for k, v in B.coeffs.items() if v}


def test_kurlin_kernel_defining_relation():
    # b K(a,b) E(a+b) = E(a+b) - E(a), checked by polynomial multiplication only
    D = 8
    K = _as_frac(kurlin_kernel(D))
    lhs = _bmul(_bmul({(0, 1): 1}, K, D + 1), _E_oracle(1, 1, D + 1), D + 1)
    Eab, Ea = _E_oracle(1, 1, D + 1), _E_oracle(1, 0, D + 1)
    rhs = {k: Eab.get(k, 0) - Ea.get(k, 0) for k in set(Eab) | set(Ea)}
    assert lhs == {k: v for k, v in rhs.items() if v}
    assert K[(0, 0)] == Fraction(1, 2)


def test_kernel_T_defining_relation():
    # U T(U,V) E(U+V) = E(U+V) - E(V)
    D = 8
    T = _as_frac(kernel_T(D))
    lhs = _bmul(_bmul({(1, 0): 1}, T, D + 1), _E_oracle(1, 1, D + 1), D + 1)
    Eab, Eb = _E_oracle(1, 1, D + 1), _E_oracle(0, 1, D + 1)
    rhs = {k: Eab.get(k, 0) - Eb.get(k, 0) for k in set(Eab) | set(Eb)}
    assert lhs == {k: v for k, v in rhs.items() if v}
    assert kernel_T(0).coeffs == {(0, 0): mpq(1, 2)}


def test_kernel_bch_is_substituted_kurlin():
    assert kernel_bch(10) == substitute_kurlin(10)
    # constant term K(0,0) = 1/2
    assert kernel_bch(0).coeffs == {(0, 0): mpq(1, 2)}


def test_literal_kernels_fail_loudly():
    with pytest.raises(CancellationError) as e:
        kernel_T(4, "literal")
    assert e.value.monomials
    with pytest.raises(CancellationError):
        kernel_bch(4, "literal")
    with pytest.raises(ValueError):
        kernel_T(3, "bogus")


def test_divide_linear():
    # (U + 2V)(1 + U V) / (U + 2V)
    p = BivarSeries({(1, 0): 1, (0, 1): 2}, 4) * BivarSeries({(0, 0): 1, (1, 1): 1}, 4)
    assert p.divide_linear(1, 2) == BivarSeries({(0, 0): 1, (1, 1): 1}, 3)
    with pytest.raises(CancellationError):
        BivarSeries({(0, 0): 1, (1, 0): 1}, 3).divide_linear(0, 1)


def test_bivar_inverse():
    B = BivarSeries({(0, 0): 2, (1, 0): 1, (0, 2): -3}, 6)
    assert B * B.inverse() == BivarSeries.one(6)
