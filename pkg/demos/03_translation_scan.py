"""Why a negative Hardy coupling has no extremal when s = 0.

Take the discrete extremal of the uncoupled problem and slide it away from
the origin. With gamma < 0 the Hardy term penalizes mass near the origin,
so the quotient of the translate falls toward the uncoupled constant but
never below it.
"""

# %%
import numpy as np

from frachs.functionals import gamma_H
from frachs.grid import ProblemParams, make_grid
from frachs.profiles import random_smooth
from frachs.solvers import max_representable_shift, minimize_quotient, translate_scan

grid = make_grid(1, 1024, 50.0)
base = ProblemParams(1, 0.5, 0.0, 0.0)
extremal, rep0, _ = minimize_quotient(random_smooth(grid, 0), base)
S0 = rep0.quotient
print(f"uncoupled constant on this grid: {S0:.6f}")

# %%
for frac in (-0.1, -0.5, 0.2):
    p = base.with_gamma(frac * gamma_H(1, 0.5))
    kmax = int(max_representable_shift(extremal, p) / grid.spacing)
    # the extremal sits half a cell off the origin, so a one-node shift only
    # mirrors it; start the scan at two nodes
    deltas = [k * grid.spacing for k in np.unique(np.geomspace(2, kmax, 9).astype(int))]
    table = translate_scan(extremal, p, [0.0] + deltas)
    print(f"\ngamma = {frac:+.1f} gH")
    for d, q in table.rows():
        print(f"  delta={d:7.3f}  I={q:.6f}  I/S0-1={q / S0 - 1:+.4f}")
