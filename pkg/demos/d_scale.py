"""Remainder with two series terms as the scale D grows, for ten probes.

Run: python3 demos/d_scale.py   (about a minute)
"""

import mpmath as mp

from rellich import InequalityParams
from rellich.prober import d_scale_sweep, standard_probes

mp.mp.dps = 60
params = InequalityParams(m=2, p=2, k=12)
grid = [mp.e, mp.e**2, mp.e**4]
table = d_scale_sweep(params, standard_probes(2, 10), grid, 2)

for D in grid:
    rows = [r for r in table.rows if r.D == D]
    worst = min(r.remainder / r.series_terms[-1] for r in rows)
    print(f"D = e^{int(mp.nint(mp.log(D)))}: min remainder/term_2 over probes = {mp.nstr(worst, 6)}")
print(f"empirical threshold: {mp.nstr(table.threshold, 6) if table.threshold is not None else 'none'}")
