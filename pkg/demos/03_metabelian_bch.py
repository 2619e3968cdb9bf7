"""Metabelian Lie algebra: brackets, BCH through the Kurlin kernel and the grouplike logarithm."""
import random

from kzbperiod import freealg as fa
from kzbperiod.metabelian import MetabElt, ad, adaverage, bracket, exp_data, exp_op, grouplike_log, log_from_exp_op, metab_bch

N = 5
A, B = MetabElt.gen(N, "A"), MetabElt.gen(N, "B")
s00 = bracket(A, B)
print("[A,B] =", s00, "  [B,[A,B]] =", bracket(B, s00))

# log(e^A e^B) in the quotient, closed form
print("BCH(A,B) =", metab_bch(A, B))

# same thing the long way: free algebra, then Dynkin projection
Z = fa.nc_log(fa.nc_mul(fa.nc_exp(fa.NCSeries.gen(N, "A")), fa.nc_exp(fa.NCSeries.gen(N, "B"))))
print("free BCH projected agrees:", fa.project_metab(Z) == metab_bch(A, B))

# exp(ad u) lies in the span of 1, tau[u,v], ad sigma[r,s]; recover u from it
u = MetabElt(N, {"A": 2, "B": -1, (0, 0): 3, (1, 0): 1})
M = exp_op(ad(MetabElt(N + 1, dict(u.items()))))
print("log of exp(ad u) gives back u:", log_from_exp_op(M) == u)
Hs, H = exp_data(u)
print("triangular solve for sigma part:", grouplike_log(Hs, H, u.cA, u.cB, depth=N))

print("adaverage (2,1):", adaverage(2, 1).ok)
rng = random.Random(1)
print("associativity on random elements:", all(
    metab_bch(metab_bch(x, y), z) == metab_bch(x, metab_bch(y, z))
    for x, y, z in ([MetabElt(N, {k: rng.randint(-3, 3) for k in ("A", "B", (0, 0))}) for _ in range(3)] for _ in range(5))
))
