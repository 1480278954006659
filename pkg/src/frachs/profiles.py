"""Named reproducible fields: the bubble, Gaussians and seeded random fields."""

from __future__ import annotations

import numpy as np

from .grid import Field, SpectralGrid

__all__ = ["bubble", "gaussian", "random_smooth", "localized_random", "PROFILES", "make_profile"]


def _shifted_r2(grid: SpectralGrid, center=None):
    xs = grid.mesh()
    if center is None:
        center = np.zeros(grid.n)
    center = np.atleast_1d(np.asarray(center, dtype=float))
    return sum((x - c) ** 2 for x, c in zip(xs, center))


def bubble(grid: SpectralGrid, alpha: float, scale: float = 1.0, center=None) -> Field:
    """Analytic bubble ``r^((n-alpha)/2) (1 + r^2 |x - c|^2)^(-(n-alpha)/2)``.

    ``scale = r`` evaluates the rescaled profile exactly, without
    interpolation.
    """
    e = (grid.n - alpha) / 2.0
    r2 = _shifted_r2(grid, center)
    return Field(grid, scale**e * (1.0 + scale * scale * r2) ** (-e))


def gaussian(grid: SpectralGrid, width: float = 1.0, center=None) -> Field:
    """``exp(-|x - c|^2 / width^2)``."""
    return Field(grid, np.exp(-_shifted_r2(grid, center) / width**2))


def random_smooth(grid: SpectralGrid, seed: int, kmax: int = 8, decay: float = 1.0) -> Field:
    """Seeded band-limited noise on the box.

    Fourier coefficients with integer wave-vector ``0 < |k|_inf <= kmax``
    are independent complex Gaussians with standard deviation
    ``(1 + |k|)^-decay``; the result is real and has zero mean.
    """
    if kmax < 1 or kmax >= grid.N // 2:
        raise ValueError(f"kmax must lie in [1, N/2) (got {kmax})")
    rng = np.random.default_rng(seed)
    coeffs = np.zeros(grid.shape, dtype=complex)
    ks = np.arange(-kmax, kmax + 1)
    idx = np.stack(np.meshgrid(*([ks] * grid.n), indexing="ij"), axis=-1).reshape(-1, grid.n)
    idx = idx[np.any(idx != 0, axis=1)]
    amp = (1.0 + np.sqrt(np.sum(idx * idx, axis=1))) ** (-decay)
    vals = amp * (rng.standard_normal(len(idx)) + 1j * rng.standard_normal(len(idx)))
    coeffs[tuple(idx.T % grid.N)] = vals
    field_vals = np.fft.ifftn(coeffs).real
    field_vals /= np.max(np.abs(field_vals))
    return Field(grid, field_vals)


def localized_random(
    grid: SpectralGrid, seed: int, kmax: int | None = None, width: float | None = None, offset: bool = True
) -> Field:
    """Band-limited noise times a Gaussian envelope (a field that decays).

    ``kmax`` defaults to ``min(16, N/4)``. The envelope has width ``width``
    (default ``L/6``) and, when ``offset`` is true, a seeded random centre
    inside the inner half of the box.
    """
    rng = np.random.default_rng([seed, 7919])
    width = grid.L / 6.0 if width is None else width
    kmax = min(16, grid.N // 4) if kmax is None else kmax
    center = rng.uniform(-grid.L / 4.0, grid.L / 4.0, size=grid.n) if offset else None
    noise = random_smooth(grid, seed, kmax=kmax, decay=0.5).values
    env = np.exp(-_shifted_r2(grid, center) / width**2)
    return Field(grid, (noise + 0.3 * rng.standard_normal()) * env)


PROFILES = ("bubble", "gaussian", "random-smooth")


def make_profile(name: str, grid: SpectralGrid, alpha: float, seed: int = 0, scale: float = 1.0) -> Field:
    """Build one of the named profiles ``bubble``, ``gaussian``, ``random-smooth``."""
    if name == "bubble":
        return bubble(grid, alpha, scale)
    if name == "gaussian":
        return gaussian(grid, 1.0 / scale)
    if name == "random-smooth":
        return random_smooth(grid, seed)
    raise ValueError(f"unknown profile {name!r}; choose from {', '.join(PROFILES)}")
