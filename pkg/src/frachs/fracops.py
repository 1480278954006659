"""Fourier-multiplier operators on a :class:`~frachs.grid.SpectralGrid`.

The fractional Laplacian ``(-Delta)^p`` acts on the Parseval-normalized
coefficients as multiplication by ``|2 pi xi|^(2 p)``. Two conventions exist
for the zero mode:

``"annihilate"``
    the zero mode is mapped to zero, the torus convention;
``"zeta"``
    the zero mode receives the symbol returned by
    :func:`frachs.constants.zero_mode_symbol`. This is the leading
    correction that turns the lattice sum into a consistent quadrature of
    the continuum integral on R^n, and it is the form used by the
    variational functionals.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from .constants import zero_mode_symbol
from .errors import SupportOverflowError
from .grid import Field, SpectralGrid

__all__ = [
    "multiplier",
    "frac_laplacian",
    "seminorm_sq",
    "rescale",
    "translate",
    "schwarz_rearrange",
    "rearrangement_order",
]

ZeroMode = Literal["annihilate", "zeta"]
MASS_THRESHOLD = 0.9999


@lru_cache(maxsize=64)
def _multiplier_cached(grid: SpectralGrid, order: float, zero_mode: str) -> NDArray:
    m = grid.wavenumber**order
    if zero_mode == "annihilate":
        m.flat[0] = 0.0
    elif zero_mode == "zeta":
        m.flat[0] = zero_mode_symbol(grid.n, order, grid.L)
    else:
        raise ValueError(f"unknown zero-mode convention {zero_mode!r}")
    m.setflags(write=False)
    return m


def multiplier(grid: SpectralGrid, order: float, zero_mode: ZeroMode = "annihilate") -> NDArray:
    """Symbol ``|2 pi xi|^order`` on the frequency lattice (FFT order)."""
    if not order > 0:
        raise ValueError(f"multiplier order must be positive (got {order})")
    return _multiplier_cached(grid, float(order), zero_mode)


def frac_laplacian(u: Field, power: float, zero_mode: ZeroMode = "annihilate") -> Field:
    """``(-Delta)^power u`` as a Fourier multiplier.

    Parameters
    ----------
    u : Field
    power : float
        Positive exponent ``p``; the symbol is ``|2 pi xi|^(2 p)``.
    zero_mode : {"annihilate", "zeta"}
        Treatment of the zero frequency (see module docstring).
    """
    if not power > 0:
        raise ValueError(f"power must be positive (got {power})")
    m = multiplier(u.grid, 2.0 * power, zero_mode)
    return Field.from_coefficients(u.grid, m * u.coefficients)


def seminorm_sq(u: Field, alpha: float, zero_mode: ZeroMode = "annihilate") -> float:
    """Discrete ``||(-Delta)^(alpha/4) u||^2 = sum |2 pi xi|^alpha |c_xi|^2``."""
    m = multiplier(u.grid, alpha, zero_mode)
    c = u.coefficients
    return float(np.sum(m * (c.real**2 + c.imag**2)))


# ---------------------------------------------------------------------------
# group actions
# ---------------------------------------------------------------------------


def _check_mass(u: Field, keep: NDArray[np.bool_], threshold: float, power: float, what: str) -> None:
    dens = np.abs(u.values) ** power
    total = float(np.sum(dens))
    if total == 0.0:
        return
    frac = float(np.sum(dens[keep])) / total
    if frac < threshold:
        raise SupportOverflowError(
            f"{what}: only {frac:.6%} of sum |u|^{power:g} stays representable "
            f"(threshold {threshold:.4%})"
        )


def _interp_matrix(grid: SpectralGrid, points: NDArray) -> NDArray:
    """Rows evaluate the trigonometric interpolant at ``points`` from FFT data.

    The Nyquist column uses a cosine so that real data give real values.
    Points outside ``[-L, L)`` get zero rows (the field vanishes outside
    the box).
    """
    N = grid.N
    xi = grid.frequencies
    d = points[:, None] - grid.nodes[0]
    E = np.exp(2j * np.pi * xi[None, :] * d) / N
    E[:, N // 2] = np.cos(2.0 * np.pi * xi[N // 2] * d[:, 0]) / N
    outside = (points < -grid.L) | (points >= grid.L)
    E[outside, :] = 0.0
    return E


def rescale(u: Field, r: float, alpha: float, *, mass_threshold: float = MASS_THRESHOLD) -> Field:
    """Conformal rescaling ``T_r u(x) = r^((n - alpha)/2) u(r x)``.

    The field is resampled by evaluating its trigonometric interpolant.
    ``r = 1`` returns ``u`` unchanged.

    Raises
    ------
    SupportOverflowError
        If less than ``mass_threshold`` of ``sum u^2`` lies in the part of
        the box that ``x -> r x`` maps back into the box (only possible for
        ``r < 1``).
    """
    if not (np.isfinite(r) and r > 0):
        raise ValueError(f"scale r must be positive (got {r})")
    if r == 1.0:
        return u
    g = u.grid
    if r < 1.0:
        coords = np.stack(g.mesh(), axis=-1) if g.n > 1 else g.nodes[:, None]
        keep = np.max(np.abs(coords), axis=-1) < r * g.L
        _check_mass(u, keep.reshape(g.shape), mass_threshold, 2.0, f"rescale by r={r}")
    E = _interp_matrix(g, r * g.nodes)
    V = np.fft.fftn(u.values)
    for axis in range(g.n):
        V = np.moveaxis(np.tensordot(E, V, axes=([1], [axis])), 0, axis)
    return Field(g, r ** ((g.n - alpha) / 2.0) * V.real)


def translate(
    u: Field,
    shift,
    *,
    mass_threshold: float = MASS_THRESHOLD,
    mass_power: float = 2.0,
) -> Field:
    """Translate ``u`` by ``shift``: the result samples ``u(x - shift)``.

    Shifts by whole multiples of the spacing are exact index rolls; other
    shifts multiply the coefficients by ``exp(-2 pi i xi . shift)`` (with
    the real cosine factor on the Nyquist mode).

    Parameters
    ----------
    u : Field
    shift : float or sequence of float
        Displacement vector (a scalar is accepted when ``n = 1``).
    mass_threshold : float
        Minimal fraction of ``sum |u|^mass_power`` that must not wrap
        around the periodic box.
    mass_power : float
        Exponent of the density used for the representability check.

    Raises
    ------
    SupportOverflowError
    """
    g = u.grid
    vec = np.atleast_1d(np.asarray(shift, dtype=float))
    if vec.shape != (g.n,):
        raise ValueError(f"shift must have {g.n} components (got {vec.shape})")
    if not np.all(np.isfinite(vec)):
        raise ValueError("shift must be finite")
    if np.all(vec == 0.0):
        return u
    keep = np.ones(g.shape, dtype=bool)
    for axis, d in enumerate(vec):
        moved = g.nodes + d
        ok = (moved >= -g.L) & (moved < g.L)
        shape = [1] * g.n
        shape[axis] = g.N
        keep &= ok.reshape(shape)
    _check_mass(u, keep, mass_threshold, mass_power, f"translate by {vec.tolist()}")

    steps = vec / g.spacing
    if np.allclose(steps, np.round(steps), rtol=0.0, atol=1e-12):
        return Field(g, np.roll(u.values, tuple(int(k) for k in np.round(steps)), axis=tuple(range(g.n))))
    V = np.fft.fftn(u.values)
    xi = g.frequencies
    for axis, d in enumerate(vec):
        ph = np.exp(-2j * np.pi * xi * d)
        ph[g.N // 2] = np.cos(2.0 * np.pi * xi[g.N // 2] * d)
        shape = [1] * g.n
        shape[axis] = g.N
        V = V * ph.reshape(shape)
    return Field(g, np.fft.ifftn(V).real)


# ---------------------------------------------------------------------------
# rearrangement
# ---------------------------------------------------------------------------


@lru_cache(maxsize=32)
def _order_cached(grid: SpectralGrid) -> NDArray[np.intp]:
    order = np.argsort(grid.radius_key.ravel(), kind="stable")
    order.setflags(write=False)
    return order


def rearrangement_order(grid: SpectralGrid) -> NDArray[np.intp]:
    """Flat node indices sorted by radius, ties in lexicographic order."""
    return _order_cached(grid)


def schwarz_rearrange(u: Field, signed: bool = False) -> Field:
    """Discrete Schwarz symmetrization.

    The multiset of ``|u|`` is sorted in decreasing order and laid onto the
    nodes in order of increasing radius. With ``signed=True`` the signed
    values are used instead of their moduli (useful for nonnegative
    iterates carrying small negative round-off).
    """
    vals = u.values.ravel() if signed else np.abs(u.values).ravel()
    out = np.empty_like(vals)
    out[rearrangement_order(u.grid)] = np.sort(vals, kind="stable")[::-1]
    return Field(u.grid, out.reshape(u.grid.shape))
