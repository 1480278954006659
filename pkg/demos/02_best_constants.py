"""Best constants of the Hardy-Sobolev quotient on a line.

Minimizes the quotient for a few Hardy couplings and shows that a positive
coupling lowers the constant, that the extremal is radially decreasing and
that a negative coupling pushes the minimizing mass out of the box.
"""

# %%
import numpy as np

from frachs.functionals import gamma_H, quotient_evaluate
from frachs.grid import ProblemParams, make_grid
from frachs.profiles import bubble, random_smooth
from frachs.solvers import boundary_mass_fraction, estimate_constant, minimize_quotient, radial_monotonicity_violation

grid = make_grid(1, 1024, 50.0)
gH = gamma_H(1, 0.5)
print(f"gamma_H(1, 0.5) = {gH:.6f}")

# %% the classical bubble is a trial function, not the discrete minimizer
base = ProblemParams(1, 0.5, 0.0, 0.0)
print(f"bubble quotient: {quotient_evaluate(bubble(grid, 0.5), base).quotient:.6f}")

# %% constants with error bars from one grid doubling
print("\n gamma/gH     S(N)       S(2N)     bar")
for frac in (0.0, 0.25, 0.5, 0.75):
    est = estimate_constant(base.with_gamma(frac * gH), grid)
    print(f"  {frac:5.2f}   {est.value:.6f}  {est.refined:.6f}  {est.error_bar:.4f}")

# %% shape of an extremal with s > 0
p = ProblemParams(1, 0.5, 0.25, 0.3 * gH)
u, rep, hist = minimize_quotient(random_smooth(grid, 0), p)
peak = np.max(u.values)
print(f"\ns=0.25, gamma=0.3 gH: Q={rep.quotient:.6f} after {hist.notes['iterations']} iterations ({hist.status})")
print(f"radial monotonicity violation: {radial_monotonicity_violation(u) / peak:.1e} of the peak")
for x in (0.0, 1.0, 5.0, 20.0):
    j = np.argmin(np.abs(grid.nodes - x))
    print(f"  u({grid.nodes[j]:6.2f}) = {u.values[j]:.5f}")

# %% a negative coupling without the weighted term: the mass escapes
p = base.with_gamma(-0.1 * gH)
u, rep, hist = minimize_quotient(random_smooth(grid, 0), p)
print(f"\ns=0, gamma=-0.1 gH: status {hist.status}, Q={rep.quotient:.6f}, "
      f"boundary mass {boundary_mass_fraction(u, p):.3f}")
shifts = [r["event"] for r in hist.records if r["event"].startswith("shift")]
print(f"lattice translations taken: {', '.join(shifts[:6])}")
