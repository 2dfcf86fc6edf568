"""Both sharpness experiments for m=2, p=2, k=12 (A = 576, B = 13).

The A-sweep shrinks eps_0 in the pure power family and extrapolates lhs/t0.
The B-schedule takes eps_0 -> 0 exactly (finite part) and then shrinks
eps_1; the theta rows swap X_1^2 for X_1 in the last weight and drift to 0.
Takes about 15 s.

Run: python3 demos/sharpness.py
"""

import mpmath as mp

from rellich import InequalityParams
from rellich.prober import sharpness_A_sweep, sharpness_B_schedule

mp.mp.dps = 60
params = InequalityParams(m=2, p=2, k=12)

a = sharpness_A_sweep(params)
print("eps_0      lhs/t0")
for row in a.rows:
    print(f"{mp.nstr(row.eps_0, 3):<10} {mp.nstr(row.quotient_A, 12)}")
print(f"limit      {mp.nstr(a.limit, 12)}  (target {a.target})")

b = sharpness_B_schedule(params, 1)
print("\neps_1      remainder/term_1   theta=1 quotient")
for row, th in zip(b.rows, b.theta_rows):
    print(f"{mp.nstr(row.eps_r, 3):<10} {mp.nstr(row.quotient, 10):<18} {mp.nstr(th.quotient_theta, 6)}")
print(f"limit      {mp.nstr(b.limit, 10)}  (target {b.target})")
