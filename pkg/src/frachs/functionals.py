"""Scalar functionals: Hardy and Hardy-Sobolev terms, the twisted norm, the
Rayleigh quotient, the energy, its derivative and the Sobolev gradient.

Notation on a grid with cell volume ``h``::

    spectral(u) = sum m_xi |c_xi|^2              (zeta zero-mode form)
    hardy(u)    = h sum w_alpha u^2               (w_a = cell mean of |x|^-a)
    hs(u)       = h sum w_s |u|^q,  q = two_star_s = 2(n-s)/(n-alpha)
    sob(u)      = h sum |u|^p,      p = two_star   = 2n/(n-alpha)

    Q(u)   = (spectral - gamma hardy) / hs^(2/q)
    Psi(u) = (spectral - gamma hardy)/2 - sob/p - hs/q

The spectral energy uses the zeta convention of :mod:`frachs.fracops` for the
zero mode, so that the discrete energy is a consistent quadrature of the
energy on R^n and the quadratic form is invertible.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from functools import cached_property, lru_cache

import numpy as np
from numpy.typing import NDArray

from . import constants
from .errors import ZeroDenominatorError
from .fracops import multiplier, seminorm_sq
from .grid import Field, ProblemParams, SpectralGrid, singular_weight

__all__ = [
    "REPORT_VERSION",
    "gamma_H",
    "c_star",
    "VariationalModel",
    "model_for",
    "spectral_energy",
    "hardy_term",
    "hs_term",
    "sob_term",
    "twisted_norm_sq",
    "QuotientReport",
    "EnergyReport",
    "quotient_evaluate",
    "energy_evaluate",
    "energy_derivative",
    "energy_pairing",
    "energy_gradient",
]

REPORT_VERSION = 1

gamma_H = constants.gamma_H


def c_star(params: ProblemParams, S0: float, Ss: float) -> float:
    """Energy threshold ``min{(alpha/2n) S0^(n/alpha), ((alpha-s)/(2(n-s))) Ss^((n-s)/(alpha-s))}``.

    Parameters
    ----------
    params : ProblemParams
    S0, Ss : float
        Positive estimates of the best constants with ``s = 0`` and with the
        given ``s``.
    """
    if not (S0 > 0 and Ss > 0):
        raise ValueError(f"constants must be positive (got S0={S0}, Ss={Ss})")
    n, a, s = params.n, params.alpha, params.s
    ex = params.exponents
    first = ex.alpha_over_2n * S0 ** (n / a)
    second = ex.as_over_2ns * Ss ** ((n - s) / (a - s))
    return float(min(first, second))


# ---------------------------------------------------------------------------
# array-level model shared with the solvers
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class VariationalModel:
    """Precomputed symbols and weights for one ``(grid, params)`` pair.

    All methods take and return plain arrays of shape ``grid.shape``; they
    are the building blocks of the solvers. The :class:`Field`-level
    functions of this module wrap them.
    """

    grid: SpectralGrid
    params: ProblemParams

    @cached_property
    def symbol(self) -> NDArray:
        return multiplier(self.grid, self.params.alpha, "zeta")

    @cached_property
    def metric_symbol(self) -> NDArray:
        """Sobolev metric ``eps + |2 pi xi|^alpha`` with ``eps = (pi/L)^alpha``."""
        m = (np.pi / self.grid.L) ** self.params.alpha + self.grid.wavenumber**self.params.alpha
        m.setflags(write=False)
        return m

    @cached_property
    def w_alpha(self) -> NDArray:
        return singular_weight(self.grid, self.params.alpha).weights

    @cached_property
    def w_s(self) -> NDArray:
        return singular_weight(self.grid, self.params.s).weights

    @property
    def p(self) -> float:
        return self.params.exponents.two_star

    @property
    def q(self) -> float:
        return self.params.exponents.two_star_s

    # -- linear pieces ----------------------------------------------------
    def coeffs(self, v: NDArray) -> NDArray:
        return np.sqrt(self.grid.h) * np.fft.fftn(v, norm="ortho")

    def apply(self, v: NDArray, symbol: NDArray) -> NDArray:
        return np.fft.ifftn(symbol * np.fft.fftn(v)).real

    def A(self, v: NDArray) -> NDArray:
        """Nodal operator of the spectral energy: ``spectral(v) = h sum v A v``."""
        return self.apply(v, self.symbol)

    def metric_inverse(self, r: NDArray) -> NDArray:
        return self.apply(r, 1.0 / self.metric_symbol)

    def metric_dot(self, a: NDArray, b: NDArray) -> float:
        """Inner product ``h sum a M b`` of the Sobolev metric."""
        ca, cb = self.coeffs(a), self.coeffs(b)
        return float(np.sum(self.metric_symbol * (ca.real * cb.real + ca.imag * cb.imag)))

    # -- scalar pieces ----------------------------------------------------
    def spectral(self, v: NDArray) -> float:
        c = self.coeffs(v)
        return float(np.sum(self.symbol * (c.real**2 + c.imag**2)))

    def hardy(self, v: NDArray) -> float:
        return float(self.grid.h * np.sum(self.w_alpha * v * v))

    def hs(self, v: NDArray) -> float:
        return float(self.grid.h * np.sum(self.w_s * np.abs(v) ** self.q))

    def sob(self, v: NDArray) -> float:
        return float(self.grid.h * np.sum(np.abs(v) ** self.p))

    def norm_sq(self, v: NDArray) -> float:
        return self.spectral(v) - self.params.gamma * self.hardy(v)

    def quotient(self, v: NDArray) -> float:
        hs = self.hs(v)
        if not hs > 1e-300:
            raise ZeroDenominatorError(f"Hardy-Sobolev term {hs:.3e} too small")
        return self.norm_sq(v) / hs ** (2.0 / self.q)

    def energy(self, v: NDArray) -> float:
        return 0.5 * self.norm_sq(v) - self.sob(v) / self.p - self.hs(v) / self.q

    # -- derivatives ------------------------------------------------------
    def linear_part(self, v: NDArray) -> NDArray:
        return self.A(v) - self.params.gamma * self.w_alpha * v

    def derivative(self, v: NDArray) -> NDArray:
        """Nodal representative ``D`` of ``Psi'(v)``: ``<Psi'(v), phi> = h sum D phi``."""
        av = np.abs(v)
        return (
            self.linear_part(v)
            - av ** (self.p - 2.0) * v
            - self.w_s * av ** (self.q - 2.0) * v
        )

    def gradient(self, v: NDArray) -> NDArray:
        """Sobolev gradient ``M^-1 D`` of the energy."""
        return self.metric_inverse(self.derivative(v))

    def quotient_and_gradient(self, v: NDArray) -> tuple[float, NDArray]:
        """Quotient and its Sobolev gradient ``M^-1 dQ``."""
        hs = self.hs(v)
        if not hs > 1e-300:
            raise ZeroDenominatorError(f"Hardy-Sobolev term {hs:.3e} too small")
        den = hs ** (2.0 / self.q)
        Q = self.norm_sq(v) / den
        av = np.abs(v)
        raw = (2.0 / den) * (
            self.linear_part(v) - Q * hs ** (2.0 / self.q - 1.0) * self.w_s * av ** (self.q - 2.0) * v
        )
        return Q, self.metric_inverse(raw)

    def normalize(self, v: NDArray) -> NDArray:
        """Scale ``v`` so that ``hs(v) = 1``."""
        return v / self.hs(v) ** (1.0 / self.q)


@lru_cache(maxsize=32)
def model_for(grid: SpectralGrid, params: ProblemParams) -> VariationalModel:
    return VariationalModel(grid, params)


# ---------------------------------------------------------------------------
# Field-level functionals
# ---------------------------------------------------------------------------


def spectral_energy(u: Field, alpha: float) -> float:
    """Spectral energy ``int |(-Delta)^(alpha/4) u|^2`` in the zeta form."""
    return seminorm_sq(u, alpha, zero_mode="zeta")


def hardy_term(u: Field, alpha: float) -> float:
    """``int |u|^2 |x|^-alpha`` by cell-average quadrature."""
    return singular_weight(u.grid, alpha).integrate(u.values**2)


def hs_term(u: Field, params: ProblemParams) -> float:
    """``int |u|^q |x|^-s`` with ``q = two_star_s``."""
    q = params.exponents.two_star_s
    return singular_weight(u.grid, params.s).integrate(np.abs(u.values) ** q)


def sob_term(u: Field, params: ProblemParams) -> float:
    """``int |u|^p`` with ``p = two_star``."""
    return u.lp(params.exponents.two_star)


def twisted_norm_sq(u: Field, params: ProblemParams) -> float:
    """``spectral_energy(u) - gamma * hardy_term(u)``."""
    spec = spectral_energy(u, params.alpha)
    if params.gamma == 0.0:
        return spec
    return spec - params.gamma * hardy_term(u, params.alpha)


def _provenance(u: Field, params: ProblemParams) -> dict:
    return {
        "report_version": REPORT_VERSION,
        "grid": u.grid.metadata(),
        "params": params.to_dict(),
        "gamma_H": params.gamma_H,
        "exponents": asdict(params.exponents),
    }


@dataclass(frozen=True)
class QuotientReport:
    """Pieces of the Rayleigh quotient of one field.

    ``quotient = (spectral - gamma * hardy) / hs_term^(2/two_star_s)``.
    """

    spectral: float
    hardy: float
    hs_term: float
    sob_term: float
    quotient: float
    gamma: float
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def twisted(self) -> float:
        return self.spectral - self.gamma * self.hardy

    def coercive(self, tol: float = 1e-10) -> bool:
        """Whether ``spectral - gamma hardy > -tol * spectral``."""
        return self.twisted > -tol * abs(self.spectral)

    CSV_COLUMNS = ("spectral", "hardy", "hs_term", "sob_term", "quotient", "gamma")

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.CSV_COLUMNS}
        d.update(self.meta)
        return d

    def csv_row(self) -> list:
        return [getattr(self, k) for k in self.CSV_COLUMNS]


def quotient_evaluate(u: Field, params: ProblemParams) -> QuotientReport:
    """Evaluate the Rayleigh quotient of ``u`` and its pieces.

    Raises
    ------
    ZeroDenominatorError
        If the Hardy-Sobolev term is at most ``1e-300``.
    """
    spec = spectral_energy(u, params.alpha)
    hardy = hardy_term(u, params.alpha)
    hs = hs_term(u, params)
    if not hs > 1e-300:
        raise ZeroDenominatorError(f"Hardy-Sobolev term {hs:.3e} too small for a quotient")
    sob = sob_term(u, params)
    num = spec - params.gamma * hardy if params.gamma != 0.0 else spec
    Q = num / hs ** (2.0 / params.exponents.two_star_s)
    return QuotientReport(spec, hardy, hs, sob, float(Q), params.gamma, _provenance(u, params))


@dataclass(frozen=True)
class EnergyReport:
    """Decomposition ``energy = half_norm - sob_piece - hs_piece``."""

    half_norm: float
    sob_piece: float
    hs_piece: float
    energy: float
    nehari_residual: float
    derivative_pairing: float
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    CSV_COLUMNS = ("half_norm", "sob_piece", "hs_piece", "energy", "nehari_residual", "derivative_pairing")

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.CSV_COLUMNS}
        d.update(self.meta)
        return d

    def csv_row(self) -> list:
        return [getattr(self, k) for k in self.CSV_COLUMNS]


def energy_evaluate(u: Field, params: ProblemParams) -> EnergyReport:
    """Energy of ``u`` with the Nehari-type consistency residual.

    ``nehari_residual = |Psi - <Psi'(u), u>/2 - (alpha/2n) sob - ((alpha-s)/(2(n-s))) hs|``
    where the pairing is computed from the nodal derivative, independently
    of the energy pieces.
    """
    ex = params.exponents
    model = model_for(u.grid, params)
    v = u.values
    norm = twisted_norm_sq(u, params)
    sob = sob_term(u, params)
    hs = hs_term(u, params)
    half = 0.5 * norm
    sp = sob / ex.two_star
    hp = hs / ex.two_star_s
    energy = half - sp - hp
    pairing = float(u.grid.h * np.sum(model.derivative(v) * v))
    resid = abs(energy - 0.5 * pairing - ex.alpha_over_2n * sob - ex.as_over_2ns * hs)
    return EnergyReport(half, sp, hp, float(energy), float(resid), pairing, _provenance(u, params))


def energy_derivative(u: Field, params: ProblemParams) -> Field:
    """Nodal representative of ``Psi'(u)`` (the raw derivative)."""
    return Field(u.grid, model_for(u.grid, params).derivative(u.values))


def energy_pairing(u: Field, phi: Field, params: ProblemParams) -> float:
    """``<Psi'(u), phi>``."""
    return float(u.grid.h * np.sum(model_for(u.grid, params).derivative(u.values) * phi.values))


def energy_gradient(u: Field, params: ProblemParams) -> Field:
    """Sobolev gradient ``M^-1 Psi'(u)`` with ``M = (pi/L)^alpha + |2 pi xi|^alpha``.

    ``<Psi'(u), g> = h sum D M^-1 D >= 0`` with equality only when the raw
    derivative ``D`` vanishes.
    """
    return Field(u.grid, model_for(u.grid, params).gradient(u.values))
