"""Weierstrass data of y^2 = 4x^3 - 60 e4 x - 140 e6.

Walks from the Laurent expansion of wp to the algebraic functions P_k and the
coefficients p_n, q_n that enter the connection.
"""
from gmpy2 import mpq

from kzbperiod.curve import CurveFn, CurveParams, P_k, choose_f, cohomology_reduce, e_value, pq_coeffs, weierstrass_expansion

C = CurveParams(mpq(2, 3), mpq(-5, 7))
print("curve:", C)

x, y = weierstrass_expansion(C, 8)
print("wp(z)  =", x)
print("wp'(z) =", y)

# odd e_k vanish, e_8 is forced by e_4
print("e_k:", {k: str(e_value(C, k)) for k in range(2, 11)})

# P_k = Abel-Jacobi pullback of wp_k - e_k
for k in range(1, 7):
    print(f"P_{k} =", P_k(C, k))

f = choose_f(C)
print("f =", f, " (its expansion at infinity starts with -1/z)")

p, q = pq_coeffs(C, 5)
for n in range(2, 6):
    print(f"p_{n} =", p[n])
for n in range(1, 6):
    print(f"q_{n} =", q[n])

# x^2 alpha is exact up to 5 e4 alpha
F, a, b = cohomology_reduce(CurveFn.x(C) ** 2)
print("x^2 = D(", F, ") +", a, "+", b, "* x")
