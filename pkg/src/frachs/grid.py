"""Discretization of R^n by a truncated periodic box.

The box ``[-L, L)^n`` carries ``N`` nodes per axis placed at cell centres,
``x_j = (j + 1/2 - N/2) h`` with ``h = 2L/N``, so that no node sits at the
origin. Singular radial weights ``|x|^-a`` are replaced by their cell
averages, which keeps every nodal weight finite.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path

import numpy as np
from numpy.typing import NDArray
from scipy import integrate

from . import constants
from ._io import atomic_write_bytes, atomic_write_text
from .errors import InvalidParameters

__all__ = [
    "ProblemParams",
    "Exponents",
    "SpectralGrid",
    "Field",
    "SingularWeightRule",
    "make_grid",
    "singular_weight",
    "save_field",
    "load_field",
    "field_to_csv",
]

FIELD_MAGIC = b"FXV1"
_HEADER = struct.Struct("<4siid")


# ---------------------------------------------------------------------------
# problem parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Exponents:
    """Critical exponents attached to ``(n, alpha, s)``."""

    two_star: float
    two_star_s: float
    alpha_over_2n: float
    as_over_2ns: float

    @classmethod
    def from_values(cls, n: int, alpha: float, s: float) -> "Exponents":
        return cls(
            two_star=2.0 * n / (n - alpha),
            two_star_s=2.0 * (n - s) / (n - alpha),
            alpha_over_2n=alpha / (2.0 * n),
            as_over_2ns=(alpha - s) / (2.0 * (n - s)),
        )


@dataclass(frozen=True)
class ProblemParams:
    """The quadruple ``(n, alpha, s, gamma)``.

    Construction validates ``0 < alpha < 2``, ``0 <= s < alpha``,
    ``alpha < n`` and ``gamma < gamma_H(n, alpha)``; a violation raises
    :class:`InvalidParameters` whose message names the hypothesis.
    """

    n: int
    alpha: float
    s: float = 0.0
    gamma: float = 0.0

    def __post_init__(self) -> None:
        n, alpha, s, gamma = self.n, self.alpha, self.s, self.gamma
        if n not in (1, 2, 3):
            raise InvalidParameters(f"dimension must be 1, 2 or 3 (got n={n})")
        for name, val in (("alpha", alpha), ("s", s), ("gamma", gamma)):
            if not np.isfinite(val):
                raise InvalidParameters(f"{name} must be finite (got {val})")
        if not 0.0 < alpha < 2.0:
            raise InvalidParameters(f"hypothesis 0 < α < 2 violated (alpha={alpha})")
        if not 0.0 <= s < alpha:
            raise InvalidParameters(f"hypothesis 0 ≤ s < α violated (s={s}, alpha={alpha})")
        if not alpha < n:
            raise InvalidParameters(f"hypothesis α < n violated (alpha={alpha}, n={n})")
        gh = constants.gamma_H(n, alpha)
        if not gamma < gh:
            raise InvalidParameters(
                f"hypothesis γ < γ_H violated (gamma={gamma}, gamma_H={gh:.12g})"
            )

    @cached_property
    def exponents(self) -> Exponents:
        return Exponents.from_values(self.n, self.alpha, self.s)

    @cached_property
    def gamma_H(self) -> float:
        return constants.gamma_H(self.n, self.alpha)

    def with_gamma(self, gamma: float) -> "ProblemParams":
        return ProblemParams(self.n, self.alpha, self.s, gamma)

    def with_s(self, s: float) -> "ProblemParams":
        return ProblemParams(self.n, self.alpha, s, self.gamma)

    def to_dict(self) -> dict:
        return {"n": self.n, "alpha": self.alpha, "s": self.s, "gamma": self.gamma}


# ---------------------------------------------------------------------------
# grid and fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralGrid:
    """Periodic box ``[-L, L)^n`` with ``N`` staggered nodes per axis.

    Attributes
    ----------
    n : int
        Dimension (1, 2 or 3).
    N : int
        Points per axis, a power of two.
    L : float
        Box half-length.
    """

    n: int
    N: int
    L: float

    @property
    def spacing(self) -> float:
        """Node spacing ``2L/N``."""
        return 2.0 * self.L / self.N

    @property
    def h(self) -> float:
        """Cell volume ``(2L/N)^n``; the weight in every Riemann sum."""
        return self.spacing**self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        return self.N**self.n

    @cached_property
    def nodes(self) -> NDArray[np.float64]:
        """One-dimensional node coordinates, exactly antisymmetric."""
        j = np.arange(self.N, dtype=float)
        return (j + 0.5 - self.N / 2.0) * self.spacing

    @cached_property
    def frequencies(self) -> NDArray[np.float64]:
        """One-dimensional frequency lattice ``k / (2L)`` in FFT order."""
        return np.fft.fftfreq(self.N, d=self.spacing)

    def mesh(self) -> tuple[NDArray[np.float64], ...]:
        """Coordinate arrays of shape ``grid.shape`` (``ij`` indexing)."""
        return tuple(np.meshgrid(*([self.nodes] * self.n), indexing="ij"))

    @cached_property
    def radius_key(self) -> NDArray[np.int64]:
        """Integer proxy ``sum_i (2 j_i + 1 - N)^2 = 4 |x|^2 / spacing^2``.

        Exact integers make ties between nodes of equal radius exact.
        """
        odd = 2 * np.arange(self.N, dtype=np.int64) + 1 - self.N
        sq = odd * odd
        key = np.zeros(self.shape, dtype=np.int64)
        for axis in range(self.n):
            shape = [1] * self.n
            shape[axis] = self.N
            key = key + sq.reshape(shape)
        return key

    @cached_property
    def radius(self) -> NDArray[np.float64]:
        """``|x|`` at every node."""
        return 0.5 * self.spacing * np.sqrt(self.radius_key.astype(float))

    @cached_property
    def wavenumber(self) -> NDArray[np.float64]:
        """``|2 pi xi|`` on the full frequency lattice (FFT order)."""
        k2 = np.zeros(self.shape)
        for axis in range(self.n):
            shape = [1] * self.n
            shape[axis] = self.N
            k2 = k2 + ((2.0 * np.pi * self.frequencies) ** 2).reshape(shape)
        return np.sqrt(k2)

    @property
    def min_wavenumber(self) -> float:
        """Smallest nonzero ``|2 pi xi|``, equal to ``pi / L``."""
        return np.pi / self.L

    def metadata(self) -> dict:
        return {"n": self.n, "N": self.N, "L": self.L, "spacing": self.spacing}

    def field(self, values) -> "Field":
        return Field(self, values)

    def zeros(self) -> "Field":
        return Field(self, np.zeros(self.shape))


def _is_power_of_two(N: int) -> bool:
    return N > 0 and (N & (N - 1)) == 0


def make_grid(n: int, N: int, L: float) -> SpectralGrid:
    """Build a :class:`SpectralGrid` after validating its arguments.

    Raises
    ------
    ValueError
        If ``n`` is not 1, 2 or 3, ``N`` is not a power of two ``>= 8`` or
        ``L`` is not positive.
    """
    if isinstance(n, bool) or int(n) != n or n not in (1, 2, 3):
        raise ValueError(f"dimension n must be 1, 2 or 3 (got {n})")
    if isinstance(N, bool) or int(N) != N or not _is_power_of_two(int(N)) or N < 8:
        raise ValueError(f"N must be a power of two >= 8 (got {N})")
    if not (np.isfinite(L) and L > 0):
        raise ValueError(f"L must be positive (got {L})")
    return SpectralGrid(int(n), int(N), float(L))


@dataclass(frozen=True, eq=False)
class Field:
    """Real samples of a function on the nodes of a :class:`SpectralGrid`.

    Values are stored as an ``n``-dimensional read-only array; the flat
    row-major view is ``values.ravel()``. Fourier coefficients are computed
    once on first access and normalized so that
    ``sum |coefficients|^2 == h * sum values^2``.
    """

    grid: SpectralGrid
    values: NDArray[np.float64] = field(repr=False)

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=np.float64, copy=True)
        if vals.size != self.grid.size:
            raise ValueError(f"expected {self.grid.size} values, got {vals.size}")
        vals = vals.reshape(self.grid.shape)
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @cached_property
    def coefficients(self) -> NDArray[np.complex128]:
        """Parseval-normalized discrete Fourier coefficients (FFT order)."""
        coeffs = np.sqrt(self.grid.h) * np.fft.fftn(self.values, norm="ortho")
        coeffs.setflags(write=False)
        return coeffs

    @classmethod
    def from_coefficients(cls, grid: SpectralGrid, coeffs: NDArray) -> "Field":
        vals = np.fft.ifftn(np.asarray(coeffs) / np.sqrt(grid.h), norm="ortho").real
        return cls(grid, vals)

    def l2_sq(self) -> float:
        return float(self.grid.h * np.sum(self.values**2))

    def lp(self, p: float) -> float:
        """``h * sum |u|^p``."""
        return float(self.grid.h * np.sum(np.abs(self.values) ** p))

    def with_values(self, values) -> "Field":
        return Field(self.grid, values)

    def __mul__(self, scalar: float) -> "Field":
        return Field(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __add__(self, other: "Field") -> "Field":
        _same_grid(self, other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        _same_grid(self, other)
        return Field(self.grid, self.values - other.values)

    def __neg__(self) -> "Field":
        return Field(self.grid, -self.values)


def _same_grid(a: Field, b: Field) -> None:
    if a.grid != b.grid:
        from .errors import IncompatibleGridError

        raise IncompatibleGridError(f"fields live on different grids: {a.grid} vs {b.grid}")


# ---------------------------------------------------------------------------
# singular weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SingularWeightRule:
    """Cell averages of ``|x|^-a`` on the nodes of a grid.

    ``h * sum(weights * |u|^p)`` is the quadrature of ``int |u|^p |x|^-a``.
    """

    grid: SpectralGrid
    exponent: float
    weights: NDArray[np.float64] = field(repr=False)
    origin_weight: float

    def integrate(self, density: NDArray) -> float:
        """``h * sum(weights * density)`` for a nodal density."""
        return float(self.grid.h * np.sum(self.weights * density))


def _origin_cell_average(n: int, spacing: float, a: float) -> float:
    """Exact mean of ``|x|^-a`` over the cube ``[0, spacing]^n``.

    Splitting the cube into ``n`` pyramids with apex at the origin, one per
    far face, reduces the singular integral to a smooth face integral::

        int_cube |x|^-a = n * spacing/(n-a) * int_{[0,spacing]^(n-1)} (spacing^2 + |y|^2)^(-a/2) dy
    """
    hh = spacing
    if n == 1:
        return hh ** (-a) / (1.0 - a)
    if n == 2:
        face, _ = integrate.quad(lambda y: (hh * hh + y * y) ** (-a / 2.0), 0.0, hh, epsabs=0.0, epsrel=1e-13)
    else:
        face, _ = integrate.dblquad(
            lambda y2, y1: (hh * hh + y1 * y1 + y2 * y2) ** (-a / 2.0),
            0.0, hh, 0.0, hh, epsabs=0.0, epsrel=1e-13,
        )
    return n * hh / (n - a) * face / hh**n


def _gauss_cell_average(centres: NDArray, spacing: float, a: float, order: int = 12) -> NDArray:
    """Tensor Gauss-Legendre mean of ``|x|^-a`` over cells away from the origin."""
    t, w = np.polynomial.legendre.leggauss(order)
    t = 0.5 * spacing * t
    w = 0.5 * w
    n = centres.shape[1]
    offs = np.stack(np.meshgrid(*([t] * n), indexing="ij"), axis=-1).reshape(-1, n)
    wts = np.prod(np.stack(np.meshgrid(*([w] * n), indexing="ij"), axis=-1).reshape(-1, n), axis=1)
    out = np.empty(len(centres))
    for start in range(0, len(centres), 256):
        pts = centres[start:start + 256, None, :] + offs[None, :, :]
        r = np.sqrt(np.sum(pts * pts, axis=-1))
        out[start:start + 256] = (r ** (-a)) @ wts
    return out


@lru_cache(maxsize=32)
def _weights_cached(grid: SpectralGrid, a: float) -> tuple[NDArray, float]:
    n, hh = grid.n, grid.spacing
    if a == 0.0:
        w = np.ones(grid.shape)
        return w, 1.0
    if n == 1:
        # exact cell averages through the antiderivative sign(t)|t|^(1-a)/(1-a)
        r = np.abs(grid.nodes)

        def F(t):
            return np.sign(t) * np.abs(t) ** (1.0 - a) / (1.0 - a)

        w = (F(r + hh / 2.0) - F(r - hh / 2.0)) / hh
        origin = _origin_cell_average(1, hh, a)
        w[np.abs(grid.nodes) < hh] = origin
        return w, origin
    # n = 2, 3: second-order cell average away from the origin,
    # tensor Gauss-Legendre near it, adaptive quadrature on the origin cells.
    r = grid.radius
    w = r ** (-a) * (1.0 + hh * hh * a * (a + 2.0 - n) / (24.0 * r * r))
    coords = np.stack(grid.mesh(), axis=-1)
    cheb = np.max(np.abs(coords), axis=-1)
    near = cheb < 8.5 * hh
    origin_mask = cheb < hh
    gl_mask = near & ~origin_mask
    w[gl_mask] = _gauss_cell_average(coords[gl_mask], hh, a)
    origin = _origin_cell_average(n, hh, a)
    w[origin_mask] = origin
    return w, origin


def singular_weight(grid: SpectralGrid, a: float) -> SingularWeightRule:
    """Quadrature weights for ``|x|^-a`` on ``grid``.

    Parameters
    ----------
    grid : SpectralGrid
    a : float
        Exponent with ``0 <= a < n``.

    Returns
    -------
    SingularWeightRule
        Cell averages: exact in one dimension, exact (adaptive quadrature) on
        the cells touching the origin in two and three dimensions, tensor
        Gauss-Legendre on the next cells and a second-order corrected point
        value ``|x|^-a (1 + h^2 a (a+2-n) / (24 |x|^2))`` further out.
    """
    a = float(a)
    if not np.isfinite(a) or a < 0.0:
        raise ValueError(f"weight exponent must be >= 0 (got {a})")
    if a >= grid.n:
        raise ValueError(f"weight exponent a={a} >= n={grid.n} is not locally integrable")
    w, origin = _weights_cached(grid, a)
    w = w.copy()
    w.setflags(write=False)
    return SingularWeightRule(grid, a, w, float(origin))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def field_to_bytes(u: Field) -> bytes:
    g = u.grid
    header = _HEADER.pack(FIELD_MAGIC, g.n, g.N, g.L)
    body = np.ascontiguousarray(u.values, dtype="<f8").tobytes(order="C")
    return header + body


def field_from_bytes(data: bytes) -> Field:
    if len(data) < _HEADER.size:
        raise ValueError("truncated field container")
    magic, n, N, L = _HEADER.unpack_from(data, 0)
    if magic != FIELD_MAGIC:
        raise ValueError(f"bad magic {magic!r}, expected {FIELD_MAGIC!r}")
    grid = make_grid(n, N, L)
    body = data[_HEADER.size:]
    if len(body) != 8 * grid.size:
        raise ValueError(f"expected {8 * grid.size} payload bytes, got {len(body)}")
    vals = np.frombuffer(body, dtype="<f8").reshape(grid.shape)
    return Field(grid, vals)


def save_field(path, u: Field) -> Path:
    """Write ``u`` in the ``FXV1`` binary container (atomic)."""
    return atomic_write_bytes(path, field_to_bytes(u))


def load_field(path) -> Field:
    return field_from_bytes(Path(path).read_bytes())


def field_to_csv(path, u: Field) -> Path:
    """CSV export with columns ``x1..xn, value`` in row-major node order."""
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"x{i + 1}" for i in range(u.grid.n)] + ["value"])
    coords = [c.ravel() for c in u.grid.mesh()]
    for idx, val in enumerate(u.values.ravel()):
        writer.writerow([repr(float(c[idx])) for c in coords] + [repr(float(val))])
    return atomic_write_text(path, buf.getvalue())
