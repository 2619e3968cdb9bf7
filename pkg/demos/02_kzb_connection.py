"""The KZB connection pair, the gauge that relates them and the residue at infinity."""
from kzbperiod import freealg as fa
from kzbperiod.curve import CurveParams
from kzbperiod.kzb import build_kzb, exp_form, residue_report

C = CurveParams(1, 0)
d = build_kzb(C, 5)

print("omega, words up to length 3:")
for w, g in d.omega.items():
    if len(w) <= 3:
        print(f"  {w:>4}: {g}")

print("omega' (B-coefficient):", d.omega_prime["B"])
print("omega' (BA-coefficient, q_1):", d.omega_prime["BA"])

# same forms from the exponential description
print("exp-form agrees:", exp_form(C, 5, prime=False) == d.omega, exp_form(C, 5, prime=True) == d.omega_prime)

# gauge exp(-fB) carries one to the other
print("gauge identity holds:", fa.gauge_apply(d.gauge, d.omega) == d.omega_prime)

rep = residue_report(d)
print("residue of omega' at infinity:", rep.residue, "(should be -s00 = [B,A])")
print("higher-order poles:", rep.higher_poles)

# every word of either form has at most one A
print("Hodge check:", fa.hodge_check(d.omega, d.omega_prime, d.gauge).to_json())
