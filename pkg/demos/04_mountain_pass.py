"""Mountain-pass level of the energy below the compactness threshold.

Estimates the two best constants, forms the threshold, and runs the
path-deformation solver from a Gaussian seed on two grids.
"""

# %%
from frachs.functionals import c_star, energy_evaluate, gamma_H
from frachs.grid import ProblemParams, make_grid
from frachs.profiles import gaussian
from frachs.solvers import concentration, estimate_constant, levy_median_radius, mountain_pass

p = ProblemParams(1, 0.5, 0.25, 0.1 * gamma_H(1, 0.5))

# %%
for N in (1024, 2048):
    grid = make_grid(1, N, 50.0)
    e0 = estimate_constant(p.with_s(0.0), grid)
    es = estimate_constant(p, grid)
    cs = c_star(p, e0.value, es.value)
    rep = mountain_pass(gaussian(grid), p, constants=(e0.value, es.value))
    print(f"N={N}: S0={e0.value:.5f} Ss={es.value:.5f} c*={cs:.5f}")
    print(f"  geometry: t0={rep.t0:g}, R={rep.R:.4f}, rho={rep.rho:.5f}")
    print(f"  level c={rep.c_est:.6f} ({rep.status}, {len(rep.history) - 1} deformations, "
          f"residual {rep.ps_residual:.1e})")
    u = rep.maximizer
    er = energy_evaluate(u, p)
    print(f"  energy check {er.energy:.6f}, Nehari residual {er.nehari_residual:.1e}")
    conc = concentration(u, p, 1.0, [0.5, 1, 2, 4, 8])
    print(f"  theta={conc.theta:.4f} zeta={conc.zeta:.4f} mu={conc.mu:.4f}; "
          f"median radius {levy_median_radius(u, p):.3f}")
