import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from frachs.errors import IncompatibleGridError, InvalidParameters
from frachs.grid import (
    Field,
    ProblemParams,
    field_from_bytes,
    field_to_bytes,
    load_field,
    make_grid,
    save_field,
    singular_weight,
)
from frachs.profiles import random_smooth


def test_stagger_nodes_small_line():
    g = make_grid(1, 8, 1.0)
    expected = np.array([-7, -5, -3, -1, 1, 3, 5, 7]) / 8.0
    np.testing.assert_allclose(g.nodes, expected, atol=1e-15)
    assert np.min(np.abs(g.nodes)) == pytest.approx(0.125)


def test_frequency_lattice_2d():
    g = make_grid(2, 16, 10.0)
    assert g.size == 256
    xi = np.sort(g.frequencies)
    np.testing.assert_allclose(xi, np.arange(-8, 8) / 20.0)
    assert len(g.mesh()) == 2


@pytest.mark.parametrize("n,N,L", [(1, 6, 1.0), (4, 8, 1.0), (1, 8, 0.0), (2, 12, 3.0)])
def test_make_grid_rejects(n, N, L):
    with pytest.raises(ValueError):
        make_grid(n, N, L)


@pytest.mark.parametrize("n,N", [(1, 16), (2, 8), (3, 8)])
def test_origin_excluded_and_negation_closed(n, N):
    g = make_grid(n, N, 2.0)
    assert np.min(g.radius) >= g.spacing / 2 * (1 - 1e-14)
    # nodes antisymmetric, frequencies closed under negation apart from Nyquist
    np.testing.assert_array_equal(g.nodes, -g.nodes[::-1])
    u = Field(g, np.random.default_rng(1).standard_normal(g.shape))
    c = u.coefficients
    flipped = np.conj(np.roll(np.flip(c), 1, axis=tuple(range(n))))
    # staggered nodes add a phase; compare magnitudes of the conjugate pair
    np.testing.assert_allclose(np.abs(c), np.abs(flipped), rtol=1e-12, atol=1e-12)


def test_field_parseval_and_cache_coherence():
    g = make_grid(2, 32, 3.0)
    u = random_smooth(g, 4)
    c = u.coefficients
    assert abs(np.sum(np.abs(c) ** 2) - u.l2_sq()) / u.l2_sq() < 1e-12
    back = Field.from_coefficients(g, c)
    assert np.max(np.abs(back.values - u.values)) < 1e-12 * np.max(np.abs(u.values))


def test_field_is_read_only_and_grid_checked():
    g = make_grid(1, 16, 1.0)
    u = Field(g, np.ones(16))
    with pytest.raises(ValueError):
        u.values[0] = 2.0
    with pytest.raises(IncompatibleGridError):
        u + Field(make_grid(1, 32, 1.0), np.ones(32))
    with pytest.raises(ValueError):
        Field(g, np.full(16, np.nan))


def test_weights_unweighted_case():
    g = make_grid(2, 16, 1.5)
    rule = singular_weight(g, 0.0)
    assert np.all(rule.weights == 1.0)
    assert rule.integrate(np.ones(g.shape)) == pytest.approx((2 * 1.5) ** 2, rel=1e-14)


def test_origin_cell_closed_form_1d():
    g = make_grid(1, 64, 4.0)
    rule = singular_weight(g, 0.5)
    h = g.spacing
    assert rule.origin_weight == pytest.approx(2.0 / math.sqrt(h), rel=1e-14)
    mid = g.N // 2
    assert rule.weights[mid] == pytest.approx(2.0 / math.sqrt(h), rel=1e-14)


@pytest.mark.parametrize("n,a", [(2, 0.5), (2, 1.5), (3, 1.0), (3, 2.2)])
def test_origin_cell_matches_adaptive_quadrature(n, a):
    g = make_grid(n, 8, 1.0)
    h = g.spacing
    rule = singular_weight(g, a)
    if n == 2:
        val, _ = integrate.dblquad(lambda y, x: (x * x + y * y) ** (-a / 2), 0, h, 0, h, epsabs=0, epsrel=1e-12)
        ref = val / h**2
    else:
        val, _ = integrate.tplquad(lambda z, y, x: (x * x + y * y + z * z) ** (-a / 2), 0, h, 0, h, 0, h,
                                   epsabs=0, epsrel=1e-11)
        ref = val / h**3
    assert abs(rule.origin_weight - ref) / ref < 1e-9


def test_weighted_gaussian_against_adaptive_oracle():
    g = make_grid(1, 4096, 50.0)
    rule = singular_weight(g, 0.5)
    u = np.exp(-g.nodes**2)
    oracle = 2 * integrate.quad(lambda x: np.exp(-2 * x * x) * x**-0.5, 0, np.inf, limit=200)[0]
    assert abs(rule.integrate(u**2) - oracle) / oracle < 1e-4


@pytest.mark.parametrize("a", [-0.1, 1.0, 1.5])
def test_weight_exponent_rejected(a):
    with pytest.raises(ValueError):
        singular_weight(make_grid(1, 16, 1.0), a)


def test_weights_positive_finite_3d():
    g = make_grid(3, 16, 2.0)
    w = singular_weight(g, 2.5).weights
    assert np.all(np.isfinite(w)) and np.all(w > 0)


def test_params_validation_messages():
    with pytest.raises(InvalidParameters, match="0 ≤ s < α"):
        ProblemParams(1, 0.5, 0.6, 0.0)
    with pytest.raises(InvalidParameters, match="α < n"):
        ProblemParams(1, 1.2, 0.0, 0.0)
    with pytest.raises(InvalidParameters, match="γ_H"):
        ProblemParams(3, 1.0, 0.0, 0.7)
    p = ProblemParams(3, 1.0, 0.5, -2.0)
    assert p.exponents.two_star == pytest.approx(3.0)
    assert p.exponents.two_star_s == pytest.approx(2.5)


def test_fxv_roundtrip(tmp_path):
    g = make_grid(2, 16, 2.5)
    u = random_smooth(g, 11, kmax=4)
    path = save_field(tmp_path / "u.fxv", u)
    v = load_field(path)
    assert v.grid == g
    np.testing.assert_array_equal(v.values, u.values)
    assert field_from_bytes(field_to_bytes(u)).grid == g


def test_fxv_rejects_garbage():
    with pytest.raises(ValueError):
        field_from_bytes(b"nope")
    good = field_to_bytes(random_smooth(make_grid(1, 16, 1.0), 0, kmax=4))
    with pytest.raises(ValueError):
        field_from_bytes(good[:-8])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.sampled_from([8, 16, 32]))
def test_fxv_roundtrip_property(seed, N):
    g = make_grid(1, N, 1.0 + seed % 7)
    vals = np.random.default_rng(seed).standard_normal(N)
    u = Field(g, vals)
    v = field_from_bytes(field_to_bytes(u))
    np.testing.assert_array_equal(v.values, u.values)
