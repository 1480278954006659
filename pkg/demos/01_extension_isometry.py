"""Weighted half-space extension of a boundary field.

Every Fourier mode of ``u`` is carried into the strip by the profile
``phi(2 pi |xi| y)``; the weighted Dirichlet energy of the result should
equal the fractional seminorm of ``u``. This script prints the profile,
the energy defect for a few orders and how it shrinks with the number of
vertical nodes.
"""

# %%
import numpy as np

from frachs.extension import default_height, extend, extension_energy, profile, trace
from frachs.fracops import seminorm_sq
from frachs.grid import make_grid
from frachs.profiles import random_smooth

grid = make_grid(1, 512, 50.0)
u = random_smooth(grid, seed=7)
Y = default_height(grid)
print(f"grid: n=1, N={grid.N}, L={grid.L}; strip height Y={Y:.2f}")

# %% the profile for a few orders; alpha = 1 is exp(-t)
t = np.array([0.0, 0.25, 0.5, 1.0, 2.0, 4.0])
print("\n   t   " + "  ".join(f"a={a:<5}" for a in (0.5, 1.0, 1.5)))
for ti in t:
    print(f"{ti:5.2f}  " + "  ".join(f"{profile(np.array([ti]), a)[0]:.5f}" for a in (0.5, 1.0, 1.5)))

# %% energy identity
print("\nalpha   seminorm^2      extension energy   rel. defect   trace error")
for alpha in (0.5, 1.0, 1.5):
    w = extend(u, Y, 256, alpha)
    e, s = extension_energy(w), seminorm_sq(u, alpha)
    tr = np.max(np.abs(trace(w).values - u.values)) / np.max(np.abs(u.values))
    print(f"{alpha:4.1f}   {s:.10f}   {e:.10f}     {abs(e - s) / s:.2e}      {tr:.1e}")

# %% vertical refinement with a fixed total grading (ratio^M held constant)
print("\n  M    first cell   rel. defect (alpha = 0.5)")
s = seminorm_sq(u, 0.5)
for M in (32, 64, 128, 256, 512, 1024):
    w = extend(u, Y, M, 0.5, ratio=1.05 ** (256 / M))
    print(f"{M:5d}   {w.y[0]:.2e}    {abs(extension_energy(w) - s) / s:.3e}")
