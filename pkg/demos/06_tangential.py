"""Tangential basepoint at the puncture: the period map picks up powers of L = log z."""
from gmpy2 import mpq

from kzbperiod.curve import Chart, CurveParams
from kzbperiod.period import verify_theorems, period_map_rhs

C = CurveParams(mpq(2, 3), mpq(-5, 7))
chart = Chart.infinity(C)

res = period_map_rhs(C, chart, 4, 6)
for key in sorted(res.sigma):
    print(f"sigma{key}:", res.sigma[key])

rep = verify_theorems(C, chart, 5, 12)
print("closed form equals oracle at depth 5:", rep.ok)
