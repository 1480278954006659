"""Pseudospectral toolkit for fractional Hardy-Sobolev quotients.

Modules
-------
grid         periodic staggered grids, fields, singular-weight quadrature
fracops      Fourier multipliers, rescaling, translation, rearrangement
extension    weighted half-space extension and its energy
functionals  Hardy/Sobolev terms, quotient, energy, gradients, thresholds
solvers      quotient minimization, translation scans, mountain pass
cli          command-line front end
"""

__version__ = "0.1.0"

from .constants import gamma_H, k_alpha
from .grid import Field, ProblemParams, SpectralGrid, make_grid

__all__ = ["__version__", "gamma_H", "k_alpha", "Field", "ProblemParams", "SpectralGrid", "make_grid"]
