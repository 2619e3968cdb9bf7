"""The metabelian period map at a rational basepoint, closed form against the oracle."""
from kzbperiod.curve import Chart, CurveParams
from kzbperiod.period import diff_results, period_map_oracle, period_map_rhs

C = CurveParams(0, 1)
chart = Chart.point(C, 11, 72)
N, M = 4, 8

closed = period_map_rhs(C, chart, N, M)
oracle = period_map_oracle(C, chart, N, M)
print("A coefficient:", closed.A_coeff)
print("B coefficient:", closed.B_coeff)
for key in sorted(closed.sigma):
    print(f"sigma{key}:", closed.sigma[key])
print("differences closed vs oracle:", diff_results(closed, oracle) or "none")
