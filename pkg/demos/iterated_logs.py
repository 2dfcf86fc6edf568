"""The iterated logarithms X_j and the series eta, zeta, theta.

Tabulates a few points, checks the derivative identities on a log grid and
shows eta/X_1 creeping toward 1 as t -> 0.

Run: python3 demos/iterated_logs.py
"""

import mpmath as mp

from rellich.iterlog import eta_zeta_theta, tabulate, verify_eta_identities, x_values

mp.mp.dps = 60

for row in tabulate([mp.exp(-1), mp.exp(-5), mp.exp(-30)], 3):
    print("  ".join(f"{k}={mp.nstr(v, 8)}" for k, v in row.items()))

reps = verify_eta_identities([mp.exp(-j) for j in (1, 4, 12, 30)])
print(f"\n{len(reps)} identity checks, max residual {mp.nstr(max(r.abs_err for r in reps), 3)}")

# t = exp(-e^N) is far below double range, so pass -log t directly
print("\n-log t      eta/X_1")
for n in (1, 10, 100, 1000):
    y = mp.exp(n)
    v = eta_zeta_theta(neg_log_t=y)
    print(f"e^{n:<8} {mp.nstr(v.eta / x_values(neg_log_t=y)[0], 10)}")
