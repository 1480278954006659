"""Weighted half-space extension of a grid field.

For every lattice frequency the extension is ``c_xi * phi(|2 pi xi| y)``
where ``phi`` solves ``phi'' + ((1 - alpha)/t) phi' = phi`` with
``phi(0) = 1`` and decay at infinity::

    phi(t) = 2^(1 - nu) / Gamma(nu) * t^nu K_nu(t),    nu = alpha / 2.

Vertical discretization
-----------------------
The strip ``(0, Y]`` is sampled at ``M`` geometrically graded nodes. In the
variable ``z = y^alpha`` the weighted vertical energy loses its weight,
``int y^(1-alpha) |d_y w|^2 dy = alpha int |d_z w|^2 dz``, and the boundary
behaviour ``w ~ u + c y^alpha`` becomes linear. The energy is therefore
evaluated with piecewise quadratic elements in ``z`` over consecutive pairs
of cells, integrated exactly. The node at ``y = 0`` carries the trace,
extrapolated linearly in ``z`` from the two lowest nodes. Because the
discrete energy is the exact energy of an admissible function on the strip,
the trace inequality holds for every discrete extension up to the
exponentially small top truncation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.typing import NDArray
from scipy import sparse, special

from ._io import csv_text, atomic_write_text
from .constants import k_alpha
from .errors import IncompatibleGridError
from .fracops import seminorm_sq
from .grid import Field, SpectralGrid

__all__ = [
    "ExtensionField",
    "graded_mesh",
    "default_ratio",
    "profile",
    "profile_derivative",
    "extend",
    "extension_energy",
    "trace",
    "trace_defect",
    "default_height",
    "profile_table",
    "write_profile_csv",
]

DEFAULT_RATIO = 1.05
GRADING_NODES = 256  # above this many nodes the default ratio flattens
SHORT_STRIP = 5.0


def default_ratio(M: int) -> float:
    """1.05 up to 256 nodes, then ``1.05^(256/M)``.

    A fixed ratio makes the first cell shrink like ``1.05^-M``; beyond a few
    hundred nodes that cell drops below round-off and the energy loses
    accuracy. Flattening the ratio keeps the total grading fixed instead.
    """
    return DEFAULT_RATIO ** (min(1.0, GRADING_NODES / M))


def graded_mesh(Y: float, M: int, ratio: float | None = None) -> NDArray[np.float64]:
    """``M`` nodes on ``(0, Y]`` with cell widths growing by ``ratio`` away from 0.

    ``ratio`` defaults to :func:`default_ratio`.
    """
    ratio = default_ratio(M) if ratio is None else ratio
    if not Y > 0:
        raise ValueError(f"strip height must be positive (got {Y})")
    if M < 2:
        raise ValueError("need at least two y-nodes")
    widths = ratio ** np.arange(M, dtype=float)
    y = np.cumsum(widths)
    return Y * y / y[-1]


def profile(t, alpha: float) -> NDArray[np.float64]:
    """Normalized decaying solution of ``phi'' + ((1-alpha)/t) phi' = phi``."""
    nu = alpha / 2.0
    t = np.asarray(t, dtype=float)
    out = np.ones_like(t)
    pos = t > 0
    tp = t[pos]
    c = 2.0 ** (1.0 - nu) * special.rgamma(nu)
    # kve is exp-scaled: K_nu(t) = kve(nu, t) * exp(-t)
    with np.errstate(under="ignore"):
        out[pos] = c * tp**nu * special.kve(nu, tp) * np.exp(-tp)
    return out


def profile_derivative(t, alpha: float) -> NDArray[np.float64]:
    """``phi'(t) = -2^(1-nu)/Gamma(nu) t^nu K_(nu-1)(t)`` for ``t > 0``."""
    nu = alpha / 2.0
    t = np.asarray(t, dtype=float)
    c = 2.0 ** (1.0 - nu) * special.rgamma(nu)
    with np.errstate(under="ignore"):
        return -c * t**nu * special.kve(nu - 1.0, t) * np.exp(-t)


def default_height(grid: SpectralGrid, decay: float = 12.0) -> float:
    """Strip height with ``|2 pi xi_min| Y = decay`` for the lowest nonzero mode."""
    return decay / grid.min_wavenumber


@dataclass(frozen=True, eq=False)
class ExtensionField:
    """Samples of an extension ``w(x, y)`` at the nodes ``y_1 < ... < y_M``.

    Attributes
    ----------
    grid : SpectralGrid
        Horizontal grid.
    alpha : float
    y : ndarray, shape (M,)
        Graded vertical nodes on ``(0, Y]``.
    values : ndarray, shape grid.shape + (M,)
    status : str
        ``"ok"`` or ``"short_strip"`` when ``(pi/L) Y < 5``, in which case
        the lowest modes have not decayed at the top of the strip.
    """

    grid: SpectralGrid
    alpha: float
    y: NDArray[np.float64] = field(repr=False)
    values: NDArray[np.float64] = field(repr=False)
    status: str = "ok"

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.shape + (len(self.y),):
            raise ValueError(f"values must have shape {self.grid.shape + (len(self.y),)}")
        if not np.all(np.diff(self.y) > 0) or self.y[0] <= 0:
            raise ValueError("y-nodes must be positive and increasing")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def Y(self) -> float:
        return float(self.y[-1])

    @property
    def M(self) -> int:
        return len(self.y)

    @property
    def k_alpha(self) -> float:
        return k_alpha(self.alpha)

    @cached_property
    def _mode_coeffs(self) -> NDArray[np.complex128]:
        """Parseval coefficients of every horizontal slice, shape (N^n, M)."""
        axes = tuple(range(self.grid.n))
        c = np.sqrt(self.grid.h) * np.fft.fftn(self.values, axes=axes, norm="ortho")
        return c.reshape(self.grid.size, self.M)

    def with_values(self, values) -> "ExtensionField":
        return ExtensionField(self.grid, self.alpha, self.y, values, self.status)


def _strip_status(grid: SpectralGrid, Y: float) -> str:
    return "short_strip" if grid.min_wavenumber * Y < SHORT_STRIP else "ok"


def extend(
    u: Field,
    Y: float,
    M: int = 256,
    alpha: float | None = None,
    *,
    ratio: float | None = None,
) -> ExtensionField:
    """Extension of ``u`` to the strip ``(0, Y] x box``.

    Parameters
    ----------
    u : Field
    Y : float
        Strip height (positive).
    M : int
        Number of graded y-nodes, at least 16.
    alpha : float
        Order of the extension, in ``(0, 2)``.
    ratio : float, optional
        Geometric grading ratio of the y-mesh (default :func:`default_ratio`).
        Grading so strong that ``y_1^alpha`` drops below double precision
        relative to one makes the lowest nodal values indistinguishable and
        spoils the vertical energy; the default keeps well clear of that.
    """
    if alpha is None:
        raise TypeError("extend() needs the order alpha")
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha must lie in (0, 2) (got {alpha})")
    if not (np.isfinite(Y) and Y > 0):
        raise ValueError(f"strip height must be positive (got {Y})")
    if M < 16:
        raise ValueError(f"need M >= 16 y-nodes (got {M})")
    g = u.grid
    y = graded_mesh(Y, M, ratio)
    kappa = g.wavenumber.reshape(-1)
    prof = profile(np.outer(kappa, y), alpha)  # (N^n, M); zero mode -> 1
    coeffs = u.coefficients.reshape(-1, 1) * prof
    coeffs = coeffs.reshape(g.shape + (M,))
    axes = tuple(range(g.n))
    vals = np.fft.ifftn(coeffs / np.sqrt(g.h), axes=axes, norm="ortho").real
    return ExtensionField(g, float(alpha), y, vals, _strip_status(g, Y))


# ---------------------------------------------------------------------------
# energy
# ---------------------------------------------------------------------------


def _z_nodes(y: NDArray, alpha: float) -> NDArray:
    return np.concatenate([[0.0], y**alpha])


def _lagrange(zq: NDArray, zn: NDArray) -> tuple[NDArray, NDArray]:
    """Quadratic Lagrange basis values and z-derivatives at points ``zq``."""
    z0, z1, z2 = zn
    L = np.stack([
        (zq - z1) * (zq - z2) / ((z0 - z1) * (z0 - z2)),
        (zq - z0) * (zq - z2) / ((z1 - z0) * (z1 - z2)),
        (zq - z0) * (zq - z1) / ((z2 - z0) * (z2 - z1)),
    ])
    dL = np.stack([
        (2 * zq - z1 - z2) / ((z0 - z1) * (z0 - z2)),
        (2 * zq - z0 - z2) / ((z1 - z0) * (z1 - z2)),
        (2 * zq - z0 - z1) / ((z2 - z0) * (z2 - z1)),
    ])
    return L, dL


def _linear(zq: NDArray, zn: NDArray) -> tuple[NDArray, NDArray]:
    z0, z1 = zn
    L = np.stack([(z1 - zq) / (z1 - z0), (zq - z0) / (z1 - z0)])
    dL = np.stack([np.full_like(zq, -1.0 / (z1 - z0)), np.full_like(zq, 1.0 / (z1 - z0))])
    return L, dL


def _element_matrices(
    y: NDArray, alpha: float
) -> tuple[sparse.csr_matrix, NDArray, sparse.csr_matrix]:
    """Vertical derivative sampler ``G``, its weights ``g`` and mass ``W``.

    For a nodal vector ``a`` (index 0 is ``y = 0``)::

        sum(g * (G a)**2) = int_0^Y y^(1-alpha) |d_y w|^2 dy
        a^T W a           = int_0^Y y^(1-alpha) |w|^2 dy

    where ``w`` is the piecewise quadratic interpolant in ``z = y^alpha``.
    The stiffness term is kept as a sum of squares of ``d_z w`` at
    quadrature points rather than assembled into a matrix. With strong
    grading the matrix entries grow like ``1 / dz`` and nearly cancel, which
    would put a round-off floor of order ``eps / dz_min`` on the energy.
    """
    z = _z_nodes(y, alpha)
    n_nodes = len(z)
    beta = (2.0 - 2.0 * alpha) / alpha
    xg, wg = np.polynomial.legendre.leggauss(16)
    # d_z w is at most linear per element, so two points integrate its square
    xd, wd = np.polynomial.legendre.leggauss(2)
    xj, wj = special.roots_jacobi(12, 0.0, beta)
    rows, cols, wvals = [], [], []
    grows, gcols, gvals, gw = [], [], [], []
    start = 0
    q = 0
    while start < n_nodes - 1:
        idx = np.arange(start, min(start + 3, n_nodes))
        if len(idx) == 2:
            basis = _linear
        else:
            basis = _lagrange
        za, zb = z[idx[0]], z[idx[-1]]
        if za == 0.0:
            # weight (1/alpha) z^beta on [0, zb]: Gauss-Jacobi
            zq = 0.5 * zb * (1.0 + xj)
            wq = (0.5 * zb) ** (beta + 1.0) * wj / alpha
        else:
            zq = za + 0.5 * (zb - za) * (1.0 + xg)
            wq = 0.5 * (zb - za) * wg * zq**beta / alpha
        L, _ = basis(zq, z[idx])
        half = 0.5 * (zb - za)
        _, dLd = basis(za + half * (1.0 + xd), z[idx])
        We = (L * wq) @ L.T
        ii, jj = np.meshgrid(idx, idx, indexing="ij")
        rows.append(ii.ravel())
        cols.append(jj.ravel())
        wvals.append(We.ravel())
        qq, kk = np.meshgrid(q + np.arange(len(xd)), idx, indexing="ij")
        grows.append(qq.ravel())
        gcols.append(kk.ravel())
        gvals.append(dLd.T.ravel())
        gw.append(alpha * half * wd)
        q += len(xd)
        start = idx[-1]
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    W = sparse.csr_matrix((np.concatenate(wvals), (r, c)), shape=(n_nodes, n_nodes))
    G = sparse.csr_matrix(
        (np.concatenate(gvals), (np.concatenate(grows), np.concatenate(gcols))), shape=(q, n_nodes)
    )
    return G, np.concatenate(gw), W


def _trace_coeffs(w: ExtensionField) -> NDArray[np.complex128]:
    c = w._mode_coeffs
    z1, z2 = w.y[0] ** w.alpha, w.y[1] ** w.alpha
    return c[:, 0] - (c[:, 1] - c[:, 0]) * z1 / (z2 - z1)


def trace(w: ExtensionField) -> Field:
    """Boundary values ``w(., 0+)``, linear extrapolation in ``y^alpha``."""
    c0 = _trace_coeffs(w).reshape(w.grid.shape)
    return Field.from_coefficients(w.grid, c0)


def extension_energy(w: ExtensionField) -> float:
    """``k_alpha * int_strip y^(1-alpha) |grad w|^2``.

    Horizontal derivatives are spectral, the vertical direction uses the
    quadratic elements in ``y^alpha`` described in the module docstring.
    The sum over modes runs in FFT order, so the result does not depend on
    how the per-mode work is scheduled.
    """
    G, gw, W = _element_matrices(w.y, w.alpha)
    coeffs = np.concatenate([_trace_coeffs(w)[:, None], w._mode_coeffs], axis=1)
    kappa2 = (w.grid.wavenumber**2).reshape(-1)
    re, im = coeffs.real, coeffs.imag
    grad_v = gw @ ((G @ re.T) ** 2 + (G @ im.T) ** 2)
    mass = np.sum(re * (W @ re.T).T + im * (W @ im.T).T, axis=1)
    per_mode = grad_v + kappa2 * mass
    return float(w.k_alpha * np.sum(per_mode))


def trace_defect(w: ExtensionField, u: Field) -> float:
    """``extension_energy(w) - seminorm_sq(trace(w), alpha)``.

    Raises
    ------
    IncompatibleGridError
        If ``u`` and ``w`` live on different horizontal grids.
    """
    if u.grid != w.grid:
        raise IncompatibleGridError(f"extension grid {w.grid} differs from field grid {u.grid}")
    return extension_energy(w) - seminorm_sq(trace(w), w.alpha)


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------


def profile_table(w: ExtensionField, max_modes: int | None = 32) -> list[tuple[float, float, float]]:
    """Rows ``(|xi|, y, phi(2 pi |xi| y))`` for the distinct nonzero ``|xi|``."""
    mags = np.unique(np.round(w.grid.wavenumber.ravel() / (2.0 * np.pi), 12))
    mags = mags[mags > 0]
    if max_modes is not None:
        mags = mags[:max_modes]
    rows = []
    for xi in mags:
        vals = profile(2.0 * np.pi * xi * w.y, w.alpha)
        rows.extend((float(xi), float(yy), float(v)) for yy, v in zip(w.y, vals))
    return rows


def write_profile_csv(path, w: ExtensionField, max_modes: int | None = 32):
    return atomic_write_text(path, csv_text(("xi_abs", "y", "phi"), profile_table(w, max_modes)))
