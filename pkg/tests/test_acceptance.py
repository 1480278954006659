"""Acceptance suite: one check per criterion, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or directly with ``python tests/test_acceptance.py``.
"""

import math
import time

import mpmath
import numpy as np
import pytest

from frachs.extension import default_height, extend, extension_energy
from frachs.fracops import seminorm_sq
from frachs.functionals import (
    c_star,
    energy_evaluate,
    energy_pairing,
    gamma_H,
    hardy_term,
    hs_term,
    quotient_evaluate,
    sob_term,
    spectral_energy,
)
from frachs.grid import ProblemParams, make_grid
from frachs.profiles import bubble, gaussian, localized_random, random_smooth
from frachs.solvers import (
    estimate_constant,
    max_representable_shift,
    minimize_hardy_quotient,
    minimize_quotient,
    mountain_pass,
    radial_monotonicity_violation,
    translate_scan,
)

RESULTS: list[str] = []

GH = gamma_H(1, 0.5)
P0 = ProblemParams(1, 0.5, 0.0, 0.0)


def report(label, ok, detail, seconds):
    line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail} [{seconds:.1f}s]"
    RESULTS.append(line)
    print(line)
    return ok


def timed(fn):
    t = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - t


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def check_1_extension_isometry():
    g = make_grid(1, 512, 50.0)
    worst = 0.0
    for alpha in (0.5, 1.0, 1.5):
        for seed in range(20):
            u = random_smooth(g, seed)
            s = seminorm_sq(u, alpha)
            worst = max(worst, abs(extension_energy(extend(u, default_height(g), 256, alpha)) - s) / s)
    return worst < 1e-4, f"max relative isometry defect {worst:.2e} (< 1e-4)"


def check_2_gamma_H():
    near_two = abs(gamma_H(3, 1.99) - 0.25)
    ref = float(2 * mpmath.gamma(1) ** 2 / mpmath.gamma(mpmath.mpf("0.5")) ** 2)
    at_one = abs(gamma_H(3, 1.0) - ref)
    ok = near_two < 1e-2 and at_one < 1e-10
    return ok, f"|γ_H(3,1.99) - 1/4| = {near_two:.2e}, |γ_H(3,1) - 2/π| = {at_one:.1e}"


def check_3a_hardy_witness():
    g = make_grid(1, 2048, 50.0)
    violations, worst = 0, 0.0
    for seed in range(100):
        u = localized_random(g, seed)
        ratio = GH * hardy_term(u, 0.5) / spectral_energy(u, 0.5)
        worst = max(worst, ratio)
        violations += ratio > 1 + 1e-3
    return violations == 0, f"{violations} violations, max γ_H·hardy/spectral = {worst:.4f}"


def check_3b_hardy_minimization():
    res = minimize_hardy_quotient(make_grid(1, 2048, 50.0), 0.5)
    gap = res.relative_gap
    return 0 <= gap < 0.1, f"min spectral/hardy = {res.ratio:.5f} = γ_H·(1 + {gap:.3f}) (need gap < 0.10)"


def check_4_scaling_invariance():
    g = make_grid(1, 4096, 100.0)
    p = ProblemParams(1, 0.5, 0.25, 0.0)
    qs = [quotient_evaluate(bubble(g, 0.5, r), p).quotient for r in (0.5, 1.0, 2.0)]
    worst = max(abs(a - b) / b for a in qs for b in qs)
    return worst < 1e-6, f"quotients {', '.join(f'{q:.6f}' for q in qs)}; max pairwise rel. diff {worst:.2e} (< 1e-6)"


def check_5_constant_ordering():
    g = make_grid(1, 1024, 50.0)
    e0 = estimate_constant(P0, g)
    eg = estimate_constant(P0.with_gamma(0.5 * GH), g)
    gap = e0.value - eg.value
    bars = e0.error_bar + eg.error_bar
    ok = gap > bars and all(s == "converged" for s in e0.status + eg.status)
    return ok, f"Ŝ(0) = {e0.value:.5f}, Ŝ(γ) = {eg.value:.5f}, gap {gap:.4f} vs error bars {bars:.4f}"


def check_6_non_attainability():
    g = make_grid(1, 1024, 50.0)
    p = P0.with_gamma(-0.1 * GH)
    extremal, rep0, _ = minimize_quotient(random_smooth(g, 0), P0)
    s0 = rep0.quotient
    k_max = int(round(max_representable_shift(extremal, p) / g.spacing))
    deltas = [k * g.spacing for k in np.unique(np.linspace(0, k_max, 25).round().astype(int))]
    q = np.array(translate_scan(extremal, p, deltas).quotients)
    d0 = 0
    monotone = bool(np.all(np.diff(q[d0:]) < 0))
    close = abs(q[-1] - s0) / s0
    # descent from a centred field: the mass has to drift out by itself
    _, _, hist = minimize_quotient(gaussian(g, 2.0), p)
    drift = hist.notes["boundary_mass"]
    ok = monotone and close < 0.02 and drift > 0.5 and not hist.converged
    return ok, (f"I_δ monotone beyond δ0={deltas[d0]:.2f}: {monotone}, I(δ_max)/Ŝ(0) - 1 = {close:.4f}; "
                f"minimizer status {hist.status} with boundary mass {drift:.3f}")


def check_7_gradient():
    g = make_grid(1, 1024, 50.0)
    p = ProblemParams(1, 0.5, 0.25, 0.3 * GH)
    worst, h = 0.0, 1e-5
    for seed in range(20):
        u, phi = localized_random(g, seed), localized_random(g, 1000 + seed)
        fd = (energy_evaluate(u + phi * h, p).energy - energy_evaluate(u + phi * -h, p).energy) / (2 * h)
        exact = energy_pairing(u, phi, p)
        worst = max(worst, abs(fd - exact) / abs(exact))
    return worst < 1e-5, f"max relative finite-difference mismatch {worst:.2e} (< 1e-5)"


def check_8_energy_identity():
    g = make_grid(1, 1024, 50.0)
    p = ProblemParams(1, 0.5, 0.25, 0.3 * GH)
    worst = 0.0
    for seed in range(100):
        r = energy_evaluate(localized_random(g, seed) * (0.2 + 0.05 * seed), p)
        worst = max(worst, r.nehari_residual / (1 + abs(r.energy)))
    return worst < 1e-10, f"max nehari_residual/(1+|Ψ|) = {worst:.2e} (< 1e-10)"


def check_9_mountain_pass():
    p = ProblemParams(1, 0.5, 0.25, 0.1 * GH)
    runs = []
    for N in (1024, 2048):
        g = make_grid(1, N, 50.0)
        e0, es = estimate_constant(p.with_s(0.0), g), estimate_constant(p, g)
        cs, cs_fine = c_star(p, e0.value, es.value), c_star(p, e0.refined, es.refined)
        rep = mountain_pass(gaussian(g), p, constants=(e0.value, es.value), constants_error=abs(cs - cs_fine))
        runs.append((rep, cs, cs_fine))
    rep, cs, cs_fine = runs[0]
    bar = abs(cs - cs_fine) + abs(rep.c_est - runs[1][0].c_est)
    margin = cs - rep.c_est
    ok = (rep.converged and rep.ps_residual < 1e-4 and rep.c_est > 0 and margin > bar
          and rep.positive_mass_fraction > 0.99)
    return ok, (f"c_est = {rep.c_est:.5f}, c* = {cs:.5f}, margin {margin:.4f} vs error bar {bar:.4f}, "
                f"residual {rep.ps_residual:.1e}, positive mass {rep.positive_mass_fraction:.4f}")


def check_10_extremal_structure():
    g = make_grid(1, 1024, 50.0)
    p = ProblemParams(1, 0.5, 0.25, 0.3 * GH)
    u, _, hist = minimize_quotient(random_smooth(g, 0), p)
    viol = radial_monotonicity_violation(u) / np.max(np.abs(u.values))
    inner = g.radius < g.L / 2
    pos = float(np.mean(u.values[inner] > 0))
    ok = hist.converged and viol < 1e-6 and pos > 0.99
    return ok, f"status {hist.status}, monotonicity violation {viol:.1e}·max|u|, positive on {pos:.4f} of |x| < L/2"


def check_11_hoelder_chain():
    g = make_grid(1, 1024, 50.0)
    p = ProblemParams(1, 0.5, 0.25, 0.0)
    worst = -math.inf
    for seed in range(100):
        u = localized_random(g, seed)
        lhs = hs_term(u, p)
        rhs = hardy_term(u, 0.5) ** 0.5 * sob_term(u, p) ** 0.5
        worst = max(worst, lhs / rhs - 1)
    return worst <= 1e-10, f"max hs/(hardy^(s/α)·sob^((α-s)/α)) - 1 = {worst:.2e} (≤ 1e-10)"


CHECKS = [
    ("criterion 1 (extension isometry)", check_1_extension_isometry),
    ("criterion 2 (Hardy constant formula)", check_2_gamma_H),
    ("criterion 3a (Hardy inequality witness)", check_3a_hardy_witness),
    ("criterion 3b (Hardy quotient minimization)", check_3b_hardy_minimization),
    ("criterion 4 (scaling invariance)", check_4_scaling_invariance),
    ("criterion 5 (strict constant ordering)", check_5_constant_ordering),
    ("criterion 6 (non-attainability mechanism)", check_6_non_attainability),
    ("criterion 7 (gradient correctness)", check_7_gradient),
    ("criterion 8 (energy identity)", check_8_energy_identity),
    ("criterion 9 (mountain pass below threshold)", check_9_mountain_pass),
    ("criterion 10 (extremal structure)", check_10_extremal_structure),
    ("criterion 11 (Hölder chain)", check_11_hoelder_chain),
]


@pytest.mark.parametrize("label,check", CHECKS, ids=[c[1].__name__.removeprefix("check_") for c in CHECKS])
def test_criterion(label, check):
    ok, detail, secs = timed(check)
    report(label, ok, detail, secs)
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for label, check in CHECKS:
        ok, detail, secs = timed(check)
        failures += not report(label, ok, detail, secs)
    raise SystemExit(1 if failures else 0)
