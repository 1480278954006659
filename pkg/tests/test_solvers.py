import numpy as np
import pytest

from frachs.errors import DegenerateInitError, InvalidParameters, SupportOverflowError
from frachs.functionals import c_star, energy_evaluate, gamma_H, hs_term, model_for, quotient_evaluate
from frachs.grid import Field, ProblemParams, make_grid
from frachs.profiles import bubble, gaussian, random_smooth
from frachs.solvers import (
    MinimizerConfig,
    MountainPassConfig,
    _transfer,
    boundary_mass_fraction,
    concentration,
    estimate_constant,
    levy_median_radius,
    max_representable_shift,
    minimize_hardy_quotient,
    minimize_quotient,
    mountain_pass,
    radial_monotonicity_violation,
    ray_maximum,
    translate_scan,
)

from conftest import rel

BASE = ProblemParams(1, 0.5, 0.0, 0.0)
GH = BASE.gamma_H


@pytest.fixture(scope="module")
def grid():
    return make_grid(1, 1024, 50.0)


@pytest.fixture(scope="module")
def extremal0(grid):
    u, rep, hist = minimize_quotient(random_smooth(grid, 0), BASE)
    return u, rep, hist


def test_config_validation():
    for bad in ({"step": 0.0}, {"tol": -1.0}, {"max_iters": 0}, {"symmetrize_every": -1}):
        with pytest.raises(ValueError):
            MinimizerConfig(**bad)
    with pytest.raises(ValueError):
        MountainPassConfig(path_points=1)


def test_degenerate_init(grid):
    with pytest.raises(DegenerateInitError):
        minimize_quotient(grid.zeros(), BASE)


def test_minimizer_beats_bubble_trial(grid, extremal0):
    u, rep, hist = extremal0
    assert hist.converged
    q_bubble = quotient_evaluate(bubble(grid, 0.5), BASE).quotient
    assert rep.quotient <= q_bubble * (1 + 1e-3)
    assert hs_term(u, BASE) == pytest.approx(1.0, rel=1e-10)


def test_history_monotone_and_csv(extremal0):
    _, _, hist = extremal0
    q = hist.values("quotient")
    assert np.all(np.diff(q) <= 1e-12 * np.abs(q[1:]))
    lines = hist.to_csv().splitlines()
    assert lines[0] == "iteration,quotient,residual,step,boundary_mass,event"
    assert len(lines) == len(hist) + 1


def test_fixed_point_behaviour(extremal0):
    u, rep, _ = extremal0
    cfg = MinimizerConfig(max_iters=5)
    _, rep2, hist2 = minimize_quotient(u, BASE, cfg)
    assert rep.quotient - rep2.quotient < cfg.tol * rep.quotient + 1e-15
    assert len(hist2) <= 6


def test_radially_decreasing_with_s_positive(grid):
    p = ProblemParams(1, 0.5, 0.25, 0.0)
    u, _, hist = minimize_quotient(random_smooth(grid, 3), p)
    assert hist.converged
    assert radial_monotonicity_violation(u) < 1e-6 * np.max(np.abs(u.values))


def test_attained_sign_indefinite_case_still_descends(grid):
    p = ProblemParams(1, 0.5, 0.25, -0.3 * GH)
    _, _, hist = minimize_quotient(random_smooth(grid, 1), p, MinimizerConfig(max_iters=300))
    q = hist.values("quotient")
    assert np.all(np.diff(q) <= 1e-12 * np.abs(q[1:]))
    assert hist.status in ("converged", "max_iters", "stalled")


def test_non_attainable_is_not_converged(grid):
    p = BASE.with_gamma(-0.1 * GH)
    u, _, hist = minimize_quotient(random_smooth(grid, 0), p, MinimizerConfig(max_iters=400))
    assert not hist.converged
    assert hist.status in ("drift", "not_attained")
    assert hist.notes["boundary_mass"] == pytest.approx(boundary_mass_fraction(u, p))


def test_transfer_doubling_is_exact_for_band_limited():
    g, f = make_grid(2, 32, 4.0), make_grid(2, 64, 4.0)

    def wave(grid):
        X, Y = grid.mesh()
        return np.cos(2 * np.pi * 3 * X / 8.0) * np.sin(2 * np.pi * 5 * Y / 8.0 + 0.3)

    v = _transfer(Field(g, wave(g)), f)
    assert np.max(np.abs(v.values - wave(f))) < 1e-13


def test_estimate_constant_records_refinement(grid):
    est = estimate_constant(BASE, make_grid(1, 256, 50.0))
    assert est.error_bar == pytest.approx(abs(est.value - est.refined))
    assert est.refined < est.value
    assert est.to_dict()["status"] == ["converged", "converged"]


# -- translation scan -----------------------------------------------------------


def test_scan_delta_zero_and_gamma_zero(grid, extremal0):
    u, rep, _ = extremal0
    table = translate_scan(u, BASE, [0.0, 4 * grid.spacing, 40 * grid.spacing, 200 * grid.spacing])
    assert table.quotients[0] == pytest.approx(rep.quotient, rel=1e-14)
    q = np.array(table.quotients)
    assert np.max(np.abs(q - q[0])) < 1e-10 * q[0]


@pytest.mark.parametrize("frac,sign", [(-0.1, -1), (0.2, 1)])
def test_scan_direction_of_monotonicity(grid, extremal0, frac, sign):
    u, _, _ = extremal0
    p = BASE.with_gamma(frac * GH)
    deltas = [k * grid.spacing for k in (0, 8, 32, 64, 128, 256)]
    q = np.diff(translate_scan(u, p, deltas).quotients)
    assert np.all(sign * q > 0)


def test_scan_errors(grid, extremal0):
    u, _, _ = extremal0
    with pytest.raises(InvalidParameters):
        translate_scan(u, ProblemParams(1, 0.5, 0.25, 0.0), [0.0])
    big = max_representable_shift(u, BASE)
    with pytest.raises(SupportOverflowError):
        translate_scan(u, BASE, [big + 5 * grid.spacing])


# -- mountain pass ----------------------------------------------------------------


MP_PARAMS = ProblemParams(1, 0.5, 0.25, 0.1 * gamma_H(1, 0.5))


@pytest.fixture(scope="module")
def mp_run():
    g = make_grid(1, 512, 50.0)
    e0 = estimate_constant(MP_PARAMS.with_s(0.0), g)
    es = estimate_constant(MP_PARAMS, g)
    rep = mountain_pass(gaussian(g), MP_PARAMS, constants=(e0.value, es.value))
    return g, rep, c_star(MP_PARAMS, e0.value, es.value)


def test_mountain_pass_geometry(mp_run):
    g, rep, _ = mp_run
    model = model_for(g, MP_PARAMS)
    assert rep.rho > 0 and rep.R > 0
    assert model.energy(rep.t0 * gaussian(g).values) < 0
    assert np.sqrt(model.norm_sq(rep.t0 * gaussian(g).values)) > rep.R


def test_mountain_pass_converges_below_threshold(mp_run):
    _, rep, cs = mp_run
    assert rep.converged and rep.status == "converged"
    assert 0 < rep.c_est < cs
    assert rep.c_star == pytest.approx(cs)
    assert rep.c_est >= rep.rho


def test_mountain_pass_critical_point_identities(mp_run):
    g, rep, _ = mp_run
    u = rep.maximizer
    model = model_for(g, MP_PARAMS)
    norm_sq = model.norm_sq(u.values)
    pairing = g.h * np.sum(model.derivative(u.values) * u.values)
    assert abs(pairing) < 1e-6 * norm_sq
    er = energy_evaluate(u, MP_PARAMS)
    ex = MP_PARAMS.exponents
    ident = ex.alpha_over_2n * 2 * ex.two_star * er.sob_piece / 2 + ex.as_over_2ns * er.hs_piece * ex.two_star_s
    assert rel(er.energy, ident) < 1e-4
    assert rep.theta_full <= 2 * MP_PARAMS.n / MP_PARAMS.alpha * rep.c_est * (1 + 1e-2)


def test_mountain_pass_path_endpoints(mp_run):
    g, rep, _ = mp_run
    assert np.all(rep.path[0].values == 0.0)
    model = model_for(g, MP_PARAMS)
    assert model.energy(rep.path[-1].values) < 0
    assert rep.to_dict()["converged"] is True


def test_ray_maximum_matches_scan(mp_run):
    g, rep, _ = mp_run
    model = model_for(g, MP_PARAMS)
    w = gaussian(g).values
    t, val = ray_maximum(model, w)
    ts = np.linspace(0.5 * t, 1.5 * t, 2001)
    scan = max(model.energy(s * w) for s in ts)
    assert val >= scan - 1e-12 and val == pytest.approx(model.energy(t * w), rel=1e-14)


@pytest.mark.parametrize("p", [ProblemParams(1, 0.5, 0.0, 0.0), ProblemParams(1, 0.5, 0.25, -0.1)])
def test_mountain_pass_preconditions(p):
    g = make_grid(1, 128, 20.0)
    with pytest.raises(InvalidParameters):
        mountain_pass(gaussian(g), p, constants=(1.0, 1.0))


# -- concentration ------------------------------------------------------------------


def test_concentration_of_zero():
    g = make_grid(1, 64, 5.0)
    rep = concentration(g.zeros(), MP_PARAMS, 1.0, [0.5, 1.0, 5.0])
    assert rep.theta == rep.zeta == rep.mu == 0.0 and rep.levy == [0.0, 0.0, 0.0]


def test_levy_table_and_median(grid):
    u = gaussian(grid, 3.0)
    radii = np.linspace(0.1, grid.L * np.sqrt(grid.n), 50)
    rep = concentration(u, MP_PARAMS, 2.0, radii)
    assert np.all(np.diff(rep.levy) >= 0)
    assert rep.levy[-1] == pytest.approx(hs_term(u, MP_PARAMS), rel=1e-14)
    assert rep.theta >= 0 and rep.zeta >= 0
    r_med = levy_median_radius(u, MP_PARAMS)
    assert 0 < r_med < grid.L
    lo = concentration(u, MP_PARAMS, 1.0, [r_med - grid.spacing]).levy[0]
    hi = concentration(u, MP_PARAMS, 1.0, [r_med + grid.spacing]).levy[0]
    assert lo < 0.5 * rep.hs_total < hi


def test_levy_median_scales_with_the_profile():
    g = make_grid(1, 4096, 50.0)
    radii = [levy_median_radius(gaussian(g, w), MP_PARAMS) for w in (1.0, 2.0)]
    assert radii[1] / radii[0] == pytest.approx(2.0, rel=1e-2)


# -- Hardy quotient -----------------------------------------------------------------


def test_hardy_minimum_above_gamma_H_and_decreasing():
    gaps = [minimize_hardy_quotient(make_grid(1, N, 50.0), 0.5).relative_gap for N in (256, 1024)]
    assert gaps[0] > gaps[1] > 0
