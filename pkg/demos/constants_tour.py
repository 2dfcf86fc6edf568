"""Sharp constants, the (*) condition and the alpha_m identities for a few cases.

Run: python3 demos/constants_tour.py
"""

from fractions import Fraction

from rellich import InequalityParams, sharp_constants, star_condition, verify_radio


def show(m, p, k, gamma=0):
    params = InequalityParams(m=m, p=p, k=k, gamma=gamma)
    c = sharp_constants(params, exact=True)
    print(f"m={m} p={p} k={k} gamma={gamma}:  A={c.a}  B={c.b}  Q={c.q}  (*) {c.star.reason}")


print("exact constants")
show(2, 2, 12)
show(2, 2, 8)
show(4, 2, 12)
show(2, 3, 20, Fraction(1, 2))

# (*) fails exactly at gamma_crit; for p above the threshold it always holds
print()
v = star_condition(InequalityParams(m=2, p=2, k=5))
print(f"k=5, p=2: (*) ok={v.ok}, gamma_crit={v.critical_gamma}")
print(f"k=5, p=6: (*) ok={star_condition(InequalityParams(m=2, p=6, k=5)).ok}")

# |A(2m)| = |alpha_m(s0)|^p and |B(2m)| through alpha_m', alpha_m''
print()
for rep in verify_radio(1, 2, 12):
    print(f"{rep.identity}: lhs={rep.lhs} rhs={rep.rhs} holds={rep.holds}")
