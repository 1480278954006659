"""Closed-form constants: the sharp fractional Hardy constant, the extension
normalization and the lattice zeta value used for the zero Fourier mode."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy import integrate, special


def gamma_H(n: int, alpha: float) -> float:
    """Sharp constant of the fractional Hardy inequality on R^n.

    ``gamma_H = 2^alpha * Gamma((n+alpha)/4)^2 / Gamma((n-alpha)/4)^2``.

    The reciprocal Gamma function is used so that the value tends to zero
    continuously as ``n`` approaches ``alpha`` from above.
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"gamma_H needs 0 < alpha < 2, got alpha={alpha}")
    if not n > alpha:
        raise ValueError(f"gamma_H needs n > alpha, got n={n}, alpha={alpha}")
    num = special.gamma((n + alpha) / 4.0)
    den_inv = special.rgamma((n - alpha) / 4.0)
    return float(2.0**alpha * (num * den_inv) ** 2)


def k_alpha(alpha: float) -> float:
    """Normalization of the weighted extension energy,
    ``Gamma(alpha/2) / (2^(1-alpha) * Gamma(1 - alpha/2))``."""
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"k_alpha needs 0 < alpha < 2, got alpha={alpha}")
    return float(special.gamma(alpha / 2.0) / (2.0 ** (1.0 - alpha) * special.gamma(1.0 - alpha / 2.0)))


def _theta_minus_one(t: float, n: int) -> float:
    # theta(t)^n - 1 with theta(t) = sum_k exp(-pi k^2 t), t >= 1
    k = np.arange(1, 16, dtype=float)
    theta = 1.0 + 2.0 * np.sum(np.exp(-np.pi * k * k * t))
    return theta**n - 1.0


@lru_cache(maxsize=64)
def epstein_zeta(n: int, s: float) -> float:
    """Epstein zeta function of the integer lattice, ``sum_{k != 0} |k|^(-2 s)``,
    analytically continued to real ``s`` (``s`` not in ``{0, n/2}``).

    For ``n = 1`` this is ``2 * zeta(2 s)``. In higher dimension the theta
    function representation is used::

        pi^-s Gamma(s) Z(s) = -1/s - 1/(n/2 - s)
                              + int_1^inf (theta(t)^n - 1)(t^(s-1) + t^(n/2-s-1)) dt
    """
    if n not in (1, 2, 3):
        raise ValueError("epstein_zeta is implemented for n in {1, 2, 3}")
    if s == 0.0 or s == n / 2.0:
        raise ValueError("epstein_zeta has a pole or a trivial value at s in {0, n/2}")
    if n == 1:
        return float(2.0 * special.zeta(2.0 * s))

    def integrand(t: float) -> float:
        return _theta_minus_one(t, n) * (t ** (s - 1.0) + t ** (n / 2.0 - s - 1.0))

    tail, _ = integrate.quad(integrand, 1.0, np.inf, epsabs=1e-15, epsrel=1e-13, limit=200)
    bracket = -1.0 / s - 1.0 / (n / 2.0 - s) + tail
    return float(np.pi**s * special.rgamma(s) * bracket)


def zero_mode_symbol(n: int, alpha: float, L: float) -> float:
    """Effective multiplier of the zero Fourier mode on the box ``[-L, L)^n``.

    The lattice sum ``sum_k |2 pi xi_k|^alpha |u_hat(xi_k)|^2 dxi^n`` misses
    the continuum integral near ``xi = 0`` by a term that, to leading order,
    only involves ``|u_hat(0)|^2``. Its coefficient is the analytically
    continued lattice sum ``-Z_n(-alpha/2)`` (Euler-Maclaurin in n dimensions),
    giving the positive symbol ``-Z_n(-alpha/2) (pi / L)^alpha``.
    """
    return float(-epstein_zeta(n, -alpha / 2.0) * (np.pi / L) ** alpha)
