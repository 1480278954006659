"""Variational solvers on the grid.

* :func:`minimize_quotient` - projected Sobolev-gradient descent on the
  Rayleigh quotient, with periodic symmetrization (``gamma >= 0``) or a
  lattice translation search (``gamma < 0``).
* :func:`estimate_constant` - the minimum on a grid and on its refinement,
  giving an estimate with an error bar.
* :func:`translate_scan` - quotients of translates of a fixed profile.
* :func:`mountain_pass` - a path-deformation search for a mountain-pass
  critical point of the energy.
* :func:`concentration` - local masses in a ball and the Levy function.
* :func:`minimize_hardy_quotient` - the smallest value of spectral/hardy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import NDArray
from scipy import optimize
from scipy.sparse.linalg import LinearOperator, eigsh

from ._io import csv_text
from .errors import DegenerateInitError, InvalidParameters, PathCollapseError
from .fracops import _interp_matrix, rearrangement_order, translate
from .functionals import (
    REPORT_VERSION,
    QuotientReport,
    VariationalModel,
    c_star,
    model_for,
    quotient_evaluate,
)
from .grid import Field, ProblemParams, SpectralGrid, make_grid
from .profiles import random_smooth

__all__ = [
    "MinimizerConfig",
    "History",
    "minimize_quotient",
    "boundary_mass_fraction",
    "ConstantEstimate",
    "estimate_constant",
    "ScanTable",
    "translate_scan",
    "max_representable_shift",
    "MountainPassConfig",
    "MountainPassReport",
    "mountain_pass",
    "ray_maximum",
    "ConcentrationReport",
    "concentration",
    "levy_median_radius",
    "HardyMinimum",
    "minimize_hardy_quotient",
    "radial_monotonicity_violation",
]


# ---------------------------------------------------------------------------
# diagnostics shared by several solvers
# ---------------------------------------------------------------------------


def _outer_mask(grid: SpectralGrid) -> NDArray[np.bool_]:
    coords = grid.mesh()
    cheb = np.max(np.abs(np.stack(coords, axis=0)), axis=0)
    return cheb > grid.L / 2.0


def boundary_mass_fraction(u: Field, params: ProblemParams) -> float:
    """Share of the Hardy-Sobolev density ``w_s |u|^q`` in ``|x|_inf > L/2``."""
    model = model_for(u.grid, params)
    dens = model.w_s * np.abs(u.values) ** model.q
    total = float(np.sum(dens))
    if total == 0.0:
        return 0.0
    return float(np.sum(dens[_outer_mask(u.grid)]) / total)


def radial_monotonicity_violation(u: Field) -> float:
    """Largest increase of ``u`` along nodes sorted by radius.

    Zero for a radially non-increasing field (ties in radius are ordered
    lexicographically, as in the discrete rearrangement).
    """
    vals = u.values.ravel()[rearrangement_order(u.grid)]
    if len(vals) < 2:
        return 0.0
    return float(max(0.0, np.max(np.diff(vals))))


# ---------------------------------------------------------------------------
# quotient minimization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MinimizerConfig:
    """Settings of :func:`minimize_quotient`.

    Attributes
    ----------
    step : float
        Initial Sobolev-gradient step; it doubles after a successful step
        and halves on rejection.
    max_iters : int
    tol : float
        Stop when the relative quotient decrease over the last five
        iterations is below ``tol``.
    symmetrize_every : int
        Cadence of the symmetrization (``gamma >= 0``) or of the lattice
        translation search (``gamma < 0``); ``0`` disables both.
    renormalize : bool
        Rescale every iterate to ``hs_term = 1``.
    grad_tol : float
        Stop when the Sobolev norm of the quotient gradient divided by the
        quotient is below ``grad_tol``.
    """

    step: float = 1.0
    max_iters: int = 2000
    tol: float = 1e-12
    symmetrize_every: int = 10
    renormalize: bool = True
    grad_tol: float = 1e-7

    def __post_init__(self) -> None:
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.symmetrize_every < 0:
            raise ValueError("symmetrize_every must be >= 0")


@dataclass
class History:
    """Iteration log of a solver run.

    ``records`` holds one dict per iteration with the keys listed in
    ``columns``. ``status`` is one of ``converged``, ``max_iters``,
    ``stalled``, ``drift`` or ``not_attained``.
    """

    columns: tuple[str, ...]
    records: list[dict] = field(default_factory=list)
    status: str = "running"
    converged: bool = False
    notes: dict = field(default_factory=dict)

    def append(self, **row) -> None:
        self.records.append(row)

    def values(self, key: str) -> NDArray:
        return np.array([r[key] for r in self.records])

    def to_csv(self) -> str:
        return csv_text(self.columns, ([r[c] for c in self.columns] for r in self.records))

    def __len__(self) -> int:
        return len(self.records)


def _symmetrize(v: NDArray, grid: SpectralGrid) -> NDArray:
    # signed rearrangement: keeps the sign pattern of a positive iterate
    flat = v.ravel()
    out = np.empty_like(flat)
    out[rearrangement_order(grid)] = np.sort(flat, kind="stable")[::-1]
    return out.reshape(v.shape)


def _translation_search(model: VariationalModel, v: NDArray, q: float) -> tuple[NDArray, float, int]:
    """Best improving lattice shift of ``v`` by ``+-2^j`` nodes along an axis."""
    grid = model.grid
    best_v, best_q, best_shift = v, q, 0
    for axis in range(grid.n):
        j = 1
        while j < grid.N:
            for sgn in (1, -1):
                w = np.roll(v, sgn * j, axis=axis)
                qw = model.quotient(w)
                if qw < best_q * (1.0 - 1e-14):
                    best_v, best_q, best_shift = w, qw, sgn * j
            j *= 2
    return best_v, best_q, best_shift


def _non_attainable(params: ProblemParams) -> bool:
    return params.s == 0.0 and params.gamma < 0.0


def minimize_quotient(
    init: Field,
    params: ProblemParams,
    cfg: MinimizerConfig | None = None,
) -> tuple[Field, QuotientReport, History]:
    """Minimize the Rayleigh quotient from ``init``.

    Each iteration takes a Sobolev-gradient step on the quotient with a
    backtracking line search that only accepts non-increasing values, so
    the recorded quotient history is monotone. Every
    ``cfg.symmetrize_every`` iterations the iterate is replaced by its
    rearrangement (``gamma >= 0``) or by its best lattice translate
    (``gamma < 0``) when that does not increase the quotient.

    Returns
    -------
    u : Field
        Best iterate, normalized so that ``hs_term(u) = 1`` when
        ``cfg.renormalize`` is set, and with nonnegative mean.
    report : QuotientReport
    history : History
        Per-iteration records and the final status. For ``s = 0`` and
        ``gamma < 0`` (no extremal exists) the run is never reported as
        converged: the status is ``drift`` when more than half of the
        Hardy-Sobolev mass sits in ``|x|_inf > L/2`` and ``not_attained``
        otherwise.

    Raises
    ------
    DegenerateInitError
        If ``init`` has (numerically) zero Hardy-Sobolev term.
    """
    cfg = cfg or MinimizerConfig()
    if init.grid.n != params.n:
        raise InvalidParameters(f"field dimension {init.grid.n} differs from params.n={params.n}")
    model = model_for(init.grid, params)
    v = np.array(init.values, dtype=float)
    hs0 = model.hs(v)
    if not (np.isfinite(hs0) and hs0 > 1e-300):
        raise DegenerateInitError("initial field has vanishing Hardy-Sobolev term")
    if cfg.renormalize:
        v = model.normalize(v)
    hist = History(("iteration", "quotient", "residual", "step", "boundary_mass", "event"))
    q, g = model.quotient_and_gradient(v)
    step = cfg.step
    status = "max_iters"
    use_sym = params.gamma >= 0.0
    bm = boundary_mass_fraction(Field(init.grid, v), params)
    hist.append(iteration=0, quotient=q, residual=math.nan, step=step, boundary_mass=bm, event="init")
    for it in range(1, cfg.max_iters + 1):
        res = math.sqrt(max(model.metric_dot(g, g), 0.0)) / abs(q)
        if res < cfg.grad_tol:
            status = "converged"
            hist.records[-1]["residual"] = res
            break
        accepted = False
        while step > 1e-14:
            w = v - step * g
            try:
                qw = model.quotient(w)
            except ArithmeticError:
                qw = math.inf
            if qw <= q:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            status = "stalled"
            hist.records[-1]["residual"] = res
            break
        v, q = (model.normalize(w) if cfg.renormalize else w), qw
        step *= 2.0
        event = "step"
        if cfg.symmetrize_every and it % cfg.symmetrize_every == 0:
            if use_sym:
                sign = 1.0 if np.sum(v) >= 0 else -1.0
                ws = sign * _symmetrize(sign * v, model.grid)
                qs = model.quotient(ws)
                if qs <= q:
                    v, q, event = ws, qs, "symmetrize"
            else:
                vt, qt, shift = _translation_search(model, v, q)
                if shift:
                    v, q, event = vt, qt, f"shift{shift:+d}"
        q, g = model.quotient_and_gradient(v)
        bm = boundary_mass_fraction(Field(init.grid, v), params)
        hist.append(iteration=it, quotient=q, residual=res, step=step, boundary_mass=bm, event=event)
        if len(hist) > 6:
            q_old = hist.records[-6]["quotient"]
            if (q_old - q) <= cfg.tol * abs(q) and event == "step":
                status = "converged"
                break
    if np.sum(v) < 0:
        v = -v
    u = Field(init.grid, v)
    final_bm = boundary_mass_fraction(u, params)
    if _non_attainable(params):
        status = "drift" if final_bm > 0.5 else "not_attained"
    hist.status = status
    hist.converged = status == "converged"
    hist.notes.update(iterations=len(hist) - 1, boundary_mass=final_bm,
                      normalization="hs_term = 1" if cfg.renormalize else "none")
    return u, quotient_evaluate(u, params), hist


@dataclass(frozen=True)
class ConstantEstimate:
    """Grid estimate of a best constant with a refinement error bar.

    ``value`` is the minimum found on the base grid, ``refined`` the one on
    the grid with twice as many points per axis (same box), and
    ``error_bar = |value - refined|``.
    """

    params: ProblemParams
    value: float
    refined: float
    error_bar: float
    minimizer: Field = field(repr=False, compare=False)
    refined_minimizer: Field = field(repr=False, compare=False)
    status: tuple[str, str] = ("", "")

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "value": self.value,
            "refined": self.refined,
            "error_bar": self.error_bar,
            "status": list(self.status),
        }


def _default_init(grid: SpectralGrid, seed: int) -> Field:
    return random_smooth(grid, seed, kmax=min(8, grid.N // 4))


def _transfer(u: Field, grid: SpectralGrid) -> Field:
    """Resample ``u`` on a grid with the same box by trigonometric interpolation."""
    if u.grid == grid:
        return u
    if u.grid.L != grid.L or u.grid.n != grid.n:
        raise ValueError("transfer only between grids on the same box")
    if grid.N == 2 * u.grid.N:
        return _upsample2(u, grid)
    E = _interp_matrix(u.grid, grid.nodes)
    V = np.fft.fftn(u.values)
    for axis in range(grid.n):
        V = np.moveaxis(np.tensordot(E, V, axes=([1], [axis])), 0, axis)
    return Field(grid, V.real)


def _upsample2(u: Field, fine: SpectralGrid) -> Field:
    """Exact trigonometric interpolation onto the grid with twice the nodes.

    Fine node ``2k`` sits at ``x_k - h/4`` and node ``2k+1`` at ``x_k + h/4``
    along each axis, so each axis is a pair of quarter-cell phase shifts.
    """
    g = u.grid
    xi = g.frequencies
    vals = u.values
    for axis in range(g.n):
        V = np.fft.fft(vals, axis=axis)
        halves = []
        for d in (-0.25 * g.spacing, 0.25 * g.spacing):
            ph = np.exp(2j * np.pi * xi * d)
            ph[g.N // 2] = np.cos(2.0 * np.pi * xi[g.N // 2] * d)
            shape = [1] * vals.ndim
            shape[axis] = g.N
            halves.append(np.fft.ifft(V * ph.reshape(shape), axis=axis).real)
        out_shape = list(vals.shape)
        out_shape[axis] *= 2
        out = np.empty(out_shape)
        sl_even = [slice(None)] * vals.ndim
        sl_odd = [slice(None)] * vals.ndim
        sl_even[axis] = slice(0, None, 2)
        sl_odd[axis] = slice(1, None, 2)
        out[tuple(sl_even)] = halves[0]
        out[tuple(sl_odd)] = halves[1]
        vals = out
    return Field(fine, vals)


def estimate_constant(
    params: ProblemParams,
    grid: SpectralGrid,
    cfg: MinimizerConfig | None = None,
    init: Field | None = None,
    seed: int = 0,
) -> ConstantEstimate:
    """Minimize the quotient on ``grid`` and on its refinement ``2N``.

    The refined run starts from the interpolated base minimizer.
    """
    cfg = cfg or MinimizerConfig()
    init = init if init is not None else _default_init(grid, seed)
    u, rep, hist = minimize_quotient(init, params, cfg)
    fine = make_grid(grid.n, 2 * grid.N, grid.L)
    uf, repf, histf = minimize_quotient(_transfer(u, fine), params, cfg)
    return ConstantEstimate(
        params, rep.quotient, repf.quotient, abs(rep.quotient - repf.quotient),
        u, uf, (hist.status, histf.status),
    )


# ---------------------------------------------------------------------------
# translation scan
# ---------------------------------------------------------------------------


@dataclass
class ScanTable:
    """Rows ``(delta, quotient)`` of a translation scan."""

    deltas: list[float]
    quotients: list[float]
    direction: tuple[float, ...]
    params: ProblemParams

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.deltas, self.quotients))

    def to_csv(self) -> str:
        return csv_text(("delta", "quotient"), self.rows())

    def to_dict(self) -> dict:
        return {
            "report_version": REPORT_VERSION,
            "params": self.params.to_dict(),
            "direction": list(self.direction),
            "rows": [{"delta": d, "quotient": q} for d, q in self.rows()],
        }


def max_representable_shift(
    u: Field,
    params: ProblemParams,
    direction=None,
    *,
    mass_threshold: float = 0.9999,
) -> float:
    """Largest whole-node shift along ``direction`` passing the mass guard.

    The guard is measured in the critical density ``|u|^two_star``, as in
    :func:`translate_scan`.
    """
    g = u.grid
    d = _unit(direction, g.n)
    p = params.exponents.two_star
    best = 0.0
    for k in range(1, g.N):
        shift = k * g.spacing
        try:
            translate(u, shift * d, mass_threshold=mass_threshold, mass_power=p)
        except ValueError:
            break
        best = shift
    return best


def _unit(direction, n: int) -> NDArray:
    if direction is None:
        d = np.zeros(n)
        d[0] = 1.0
        return d
    d = np.atleast_1d(np.asarray(direction, dtype=float))
    if d.shape != (n,) or not np.linalg.norm(d) > 0:
        raise ValueError("direction must be a nonzero vector with n components")
    return d / np.linalg.norm(d)


def translate_scan(
    bubble: Field,
    params: ProblemParams,
    deltas: Sequence[float],
    direction=None,
    *,
    mass_threshold: float = 0.9999,
) -> ScanTable:
    """Quotients ``I_delta`` of the translates ``bubble(x - delta e)``.

    Representability of each translate is checked with the critical
    density ``|u|^two_star`` (the scale-invariant mass of the problem).

    Raises
    ------
    InvalidParameters
        If ``params.s != 0``.
    SupportOverflowError
        If a translate wraps more than ``1 - mass_threshold`` of the mass.
    """
    if params.s != 0.0:
        raise InvalidParameters("translate_scan needs s = 0")
    d = _unit(direction, bubble.grid.n)
    p = params.exponents.two_star
    qs = []
    for delta in deltas:
        moved = translate(bubble, float(delta) * d, mass_threshold=mass_threshold, mass_power=p)
        qs.append(quotient_evaluate(moved, params).quotient)
    return ScanTable([float(x) for x in deltas], qs, tuple(d.tolist()), params)


# ---------------------------------------------------------------------------
# mountain pass
# ---------------------------------------------------------------------------


def ray_maximum(model: VariationalModel, w: NDArray) -> tuple[float, float]:
    """Maximize ``t -> Psi(t w)`` over ``t > 0``.

    With ``a = norm(w)``, ``b = sob(w)``, ``c = hs(w)`` the maximizer solves
    ``a = b t^(p-2) + c t^(q-2)``, whose right side increases in ``t``.

    Returns
    -------
    t, value
    """
    a = model.norm_sq(w)
    b = model.sob(w)
    c = model.hs(w)
    if not a > 0:
        raise PathCollapseError("direction with non-positive quadratic form")
    p, q = model.p, model.q

    def f(t):
        return a - b * t ** (p - 2.0) - c * t ** (q - 2.0)

    hi = 1.0
    while f(hi) > 0:
        hi *= 2.0
    lo = hi / 2.0
    while f(lo) < 0:
        lo /= 2.0
    t = optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    value = 0.5 * a * t * t - b * t**p / p - c * t**q / q
    return float(t), float(value)


@dataclass(frozen=True)
class MountainPassConfig:
    """Settings of :func:`mountain_pass`.

    Attributes
    ----------
    path_points : int
        Number of points ``P`` of the discretized path.
    tol : float
        Convergence threshold on ``||Psi'(u)||_M / ||u||_M`` at the maximizer.
    max_iters : int
    step : float
        Initial deformation step (adapted by backtracking).
    armijo : float
        Sufficient-decrease constant for the path maximum.
    delta : float or None
        Ball radius for the concentration diagnostics (default ``L/4``).
    """

    path_points: int = 16
    tol: float = 1e-4
    max_iters: int = 500
    step: float = 1.0
    armijo: float = 1e-4
    delta: float | None = None

    def __post_init__(self) -> None:
        if self.path_points < 3:
            raise ValueError("path_points must be at least 3")
        if not self.tol > 0 or not self.step > 0:
            raise ValueError("tol and step must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass
class MountainPassReport:
    """Result of :func:`mountain_pass`.

    Attributes
    ----------
    path : list of Field
        Discretized path from 0 through the maximizer to ``t0 * seed``.
    maximizer : Field
        Path maximizer (sign-normalized to nonnegative mean).
    c_est : float
        Maximum of the energy along the final path.
    c_star : float
        Threshold computed from the supplied constants.
    ps_residual : float
        ``||Psi'(u)||_M / ||u||_M`` at the maximizer.
    theta, zeta, mu : float
        Concentration quantities in the ball of radius ``delta``.
    theta_full : float
        ``int |u|^two_star`` over the whole box.
    converged : bool
    """

    path: list[Field]
    maximizer: Field
    c_est: float
    c_star: float
    ps_residual: float
    theta: float
    zeta: float
    mu: float
    theta_full: float
    delta: float
    converged: bool
    status: str
    t0: float
    R: float
    rho: float
    pairing_residual: float
    identity_residual: float
    positive_mass_fraction: float
    history: History
    constants: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        g = self.maximizer.grid
        keys = ("c_est", "c_star", "ps_residual", "theta", "zeta", "mu", "theta_full", "delta",
                "converged", "status", "t0", "R", "rho", "pairing_residual", "identity_residual",
                "positive_mass_fraction")
        d = {k: getattr(self, k) for k in keys}
        d.update(report_version=REPORT_VERSION, grid=g.metadata(), path_points=len(self.path),
                 iterations=len(self.history) - 1, constants=self.constants)
        return d


def _path_points(u: NDArray, end: NDArray, P: int) -> list[NDArray]:
    """``P`` points on the polyline ``0 -> u -> end``, equidistributed per segment."""
    n1 = max(2, (P + 1) // 2)
    n2 = P - n1 + 1
    first = [t * u for t in np.linspace(0.0, 1.0, n1)]
    second = [u + t * (end - u) for t in np.linspace(0.0, 1.0, n2)[1:]]
    return first + second


def _path_max(model: VariationalModel, u: NDArray, end: NDArray, samples: int = 64) -> tuple[float, float]:
    """Energy at ``u`` and the largest sampled energy on the segment ``u -> end``."""
    eu = model.energy(u)
    seg = max(model.energy(u + t * (end - u)) for t in np.linspace(0.0, 1.0, samples)[1:])
    return eu, seg


def _geometry(model: VariationalModel, seed: NDArray, S0: float, Ss: float, n_dirs: int = 8) -> tuple[float, float, float]:
    """Numerical check of the mountain-pass geometry.

    Returns ``(t0, R, rho)``: ``Psi(t0 seed) < 0`` (doubling scan from
    ``t = 1``), and on the sphere ``||w|| = R`` the energy stays above
    ``rho > 0``. ``R`` maximizes the lower bound
    ``R^2/2 - S0^(-p/2) R^p / p - Ss^(-q/2) R^q / q`` and ``rho`` is the
    minimum of that bound and of the energy sampled along ``n_dirs``
    seeded directions (plus the seed itself).
    """
    t0 = 1.0
    for _ in range(200):
        if model.energy(t0 * seed) < 0:
            break
        t0 *= 2.0
    else:
        raise PathCollapseError("no t0 with negative energy found")
    p, q = model.p, model.q

    def bound(R):
        return 0.5 * R * R - S0 ** (-p / 2.0) * R**p / p - Ss ** (-q / 2.0) * R**q / q

    res = optimize.minimize_scalar(lambda r: -bound(r), bounds=(1e-8, 1e3), method="bounded",
                                   options={"xatol": 1e-12})
    R = float(res.x)
    lower = bound(R)
    dirs = [seed] + [random_smooth(model.grid, 1000 + k, kmax=min(8, model.grid.N // 4)).values
                     for k in range(n_dirs)]
    sampled = min(model.energy(R * d / math.sqrt(model.norm_sq(d))) for d in dirs)
    rho = min(lower, sampled)
    if not rho > 0:
        raise PathCollapseError(f"mountain-pass geometry fails: rho={rho:.3e}")
    if model.energy(t0 * seed) >= 0 or math.sqrt(model.norm_sq(t0 * seed)) <= R:
        # push the end point outside the sphere as well
        while math.sqrt(model.norm_sq(t0 * seed)) <= R:
            t0 *= 2.0
    return t0, R, float(rho)


def mountain_pass(
    seed: Field,
    params: ProblemParams,
    cfg: MountainPassConfig | None = None,
    constants: tuple[float, float] | None = None,
    constants_error: float | None = None,
) -> MountainPassReport:
    """Numerical mountain pass for the energy.

    Steps
    -----
    1. ``t0``: doubling scan until ``Psi(t0 seed) < 0``; ``R`` and ``rho``
       from the energy on a sphere (see :func:`_geometry`).
    2. The initial path is the segment ``t -> t t0 seed`` with ``P`` points.
    3. Each iteration takes the path maximizer ``u`` (the maximum along the
       ray through the current deformed point), deforms it by a Sobolev
       gradient step projected off the path tangent, and redistributes the
       points of the polyline ``0 -> u -> t0 seed`` evenly on both legs.
       The step is accepted when the path maximum decreases by an Armijo
       margin; otherwise it is halved.
    4. Stop when ``||Psi'(u)||_M / ||u||_M < tol``.

    Parameters
    ----------
    seed : Field
    params : ProblemParams
        Requires ``s > 0`` and ``0 <= gamma < gamma_H``.
    cfg : MountainPassConfig
    constants : (S0, Ss), optional
        Estimates of the best constants with ``s = 0`` and with ``s``. When
        omitted they are estimated on the seed's grid.
    constants_error : float, optional
        Refinement error bar of ``c_star``, recorded in the report.

    Raises
    ------
    InvalidParameters
        If ``s = 0`` or ``gamma < 0``.
    PathCollapseError
        If the path maximum falls below ``rho``.
    DegenerateInitError
        If ``seed`` vanishes.
    """
    cfg = cfg or MountainPassConfig()
    if not params.s > 0.0:
        raise InvalidParameters("mountain pass needs 0 < s < α (s = 0 is not covered)")
    if params.gamma < 0.0:
        raise InvalidParameters("mountain pass needs 0 ≤ γ < γ_H")
    grid = seed.grid
    model = model_for(grid, params)
    w0 = np.array(seed.values, dtype=float)
    if not np.any(w0) or not model.norm_sq(w0) > 0:
        raise DegenerateInitError("seed must be a nonzero field")
    if constants is None:
        cfg_min = MinimizerConfig()
        S0 = minimize_quotient(seed, params.with_s(0.0), cfg_min)[1].quotient
        Ss = minimize_quotient(seed, params, cfg_min)[1].quotient
    else:
        S0, Ss = constants
    cs = c_star(params, S0, Ss)
    t0, R, rho = _geometry(model, w0, S0, Ss)
    end = t0 * w0

    hist = History(("iteration", "c", "residual", "step", "event"))
    t, c = ray_maximum(model, w0)
    u = t * w0
    lam = cfg.step
    status = "max_iters"
    res = math.inf
    for it in range(cfg.max_iters + 1):
        g = model.gradient(u)
        nu = model.metric_dot(u, u)
        res = math.sqrt(max(model.metric_dot(g, g), 0.0) / nu)
        _, seg = _path_max(model, u, end)
        c_path = max(c, seg)
        hist.append(iteration=it, c=c_path, residual=res, step=lam, event="deform" if it else "init")
        if c_path < rho:
            raise PathCollapseError(f"path maximum {c_path:.6g} fell below rho={rho:.6g}")
        if res < cfg.tol:
            status = "converged"
            break
        if it == cfg.max_iters:
            break
        gp = g - model.metric_dot(g, u) / nu * u
        gg = model.metric_dot(gp, gp)
        while True:
            trial = u - lam * gp
            try:
                tt, ct = ray_maximum(model, trial)
            except PathCollapseError:
                ct = math.inf
            if ct <= c - cfg.armijo * lam * gg:
                break
            lam *= 0.5
            if lam < 1e-14:
                status = "stalled"
                break
        if status == "stalled":
            break
        u = tt * trial
        c = ct
        lam *= 2.0

    if np.sum(u) < 0:
        u = -u
        end = -end
    eu, seg = _path_max(model, u, end)
    c_est = max(eu, seg)
    path = [Field(grid, p) for p in _path_points(u, end, cfg.path_points)]
    umax = Field(grid, u)
    ex = params.exponents
    norm_u = model.norm_sq(u)
    pairing = float(grid.h * np.sum(model.derivative(u) * u))
    sob, hs = model.sob(u), model.hs(u)
    ident = ex.alpha_over_2n * sob + ex.as_over_2ns * hs
    pos = np.clip(u, 0.0, None)
    pos_frac = float(np.sum(pos * pos) / np.sum(u * u))
    delta = cfg.delta if cfg.delta is not None else grid.L / 4.0
    conc = concentration(umax, params, delta, [])
    converged = status == "converged" and 0.0 < c_est < cs
    if status == "converged" and not converged:
        status = "above_threshold"
    hist.status = status
    hist.converged = converged
    return MountainPassReport(
        path=path,
        maximizer=umax,
        c_est=float(c_est),
        c_star=float(cs),
        ps_residual=float(res),
        theta=conc.theta,
        zeta=conc.zeta,
        mu=conc.mu,
        theta_full=float(sob),
        delta=float(delta),
        converged=converged,
        status=status,
        t0=float(t0),
        R=R,
        rho=rho,
        pairing_residual=abs(pairing) / norm_u,
        identity_residual=abs(eu - ident) / abs(eu),
        positive_mass_fraction=pos_frac,
        history=hist,
        constants={"S0": S0, "Ss": Ss, "c_star_error": constants_error},
    )


# ---------------------------------------------------------------------------
# concentration diagnostics
# ---------------------------------------------------------------------------


@dataclass
class ConcentrationReport:
    """Local masses of a field in the ball ``|x| <= delta`` and the Levy table.

    ``levy[i]`` is the Hardy-Sobolev mass ``int_{|x| <= radii[i]} |u|^q |x|^-s``.
    """

    delta: float
    theta: float
    zeta: float
    mu: float
    radii: list[float]
    levy: list[float]
    hs_total: float

    def to_dict(self) -> dict:
        return {
            "delta": self.delta, "theta": self.theta, "zeta": self.zeta, "mu": self.mu,
            "hs_total": self.hs_total,
            "levy": [{"r": r, "Q": q} for r, q in zip(self.radii, self.levy)],
        }


def concentration(u: Field, params: ProblemParams, delta: float, radii: Sequence[float]) -> ConcentrationReport:
    """``theta``, ``zeta``, ``mu`` on the ball ``B_delta`` and Levy values ``Q(r)``.

    The spectral density ``|(-Delta)^(alpha/4) u|^2`` is evaluated pointwise
    with the square root of the zeta-form symbol, so that its integral over
    the whole box equals the spectral energy.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    model = model_for(u.grid, params)
    v = u.values
    r = u.grid.radius
    ball = r <= delta
    h = u.grid.h
    half = model.apply(v, np.sqrt(model.symbol))
    theta = float(h * np.sum(np.abs(v[ball]) ** model.p))
    hs_dens = model.w_s * np.abs(v) ** model.q
    zeta = float(h * np.sum(hs_dens[ball]))
    mu = float(h * np.sum((half * half - params.gamma * model.w_alpha * v * v)[ball]))
    radii = [float(x) for x in radii]
    # one cumulative sum in radius order keeps Q exactly non-decreasing
    key, cum, rad = _radial_cumsum(u.grid, hs_dens)
    idx = np.searchsorted(rad, np.asarray(radii), side="right")
    levy = [float(h * cum[i]) for i in idx]
    return ConcentrationReport(float(delta), theta, zeta, mu, radii, levy, float(h * cum[-1]))


def _radial_cumsum(grid: SpectralGrid, dens: NDArray) -> tuple[NDArray, NDArray, NDArray]:
    """Shell sums of ``dens`` accumulated outward.

    Returns the distinct radius keys, the cumulative sums (with a leading
    zero) and the corresponding shell radii.
    """
    key = grid.radius_key.ravel()
    order = np.argsort(key, kind="stable")
    keys, starts = np.unique(key[order], return_index=True)
    sums = np.add.reduceat(dens.ravel()[order], starts)
    cum = np.concatenate([[0.0], np.cumsum(sums)])
    return keys, cum, 0.5 * grid.spacing * np.sqrt(keys.astype(float))


def levy_median_radius(u: Field, params: ProblemParams) -> float:
    """Radius ``r`` with ``Q(r) = hs_term / 2``.

    The mass of each shell of nodes is taken as fully inside at the
    midpoint between its radius and the next one (the cell edge in one
    dimension), and ``Q`` is interpolated linearly in between, which makes
    it strictly increasing when the density is positive.
    """
    model = model_for(u.grid, params)
    _, cum, rad = _radial_cumsum(u.grid, model.w_s * np.abs(u.values) ** model.q)
    edges = np.concatenate([0.5 * (rad[:-1] + rad[1:]), [rad[-1] + 0.5 * u.grid.spacing]])
    radii = np.concatenate([[0.0], edges])
    total = cum[-1]
    if total == 0.0:
        raise ValueError("field has no Hardy-Sobolev mass")
    return float(np.interp(0.5 * total, cum, radii))


# ---------------------------------------------------------------------------
# Hardy quotient
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HardyMinimum:
    """Smallest value of ``spectral / hardy`` on a grid and its minimizer."""

    ratio: float
    minimizer: Field = field(repr=False)
    gamma_H: float = math.nan

    @property
    def relative_gap(self) -> float:
        return self.ratio / self.gamma_H - 1.0


def minimize_hardy_quotient(grid: SpectralGrid, alpha: float, tol: float = 1e-10) -> HardyMinimum:
    """Minimize ``spectral(u) / hardy(u)`` exactly on the grid.

    The minimum is ``1 / lambda_max`` for the symmetric operator
    ``W^(1/2) A^-1 W^(1/2)``, where ``A`` is the (invertible) spectral
    operator and ``W`` the Hardy weights; ``lambda_max`` is found with
    Lanczos iterations.
    """
    params = ProblemParams(grid.n, alpha, 0.0, 0.0)
    model = model_for(grid, params)
    sw = np.sqrt(model.w_alpha).ravel()
    inv_symbol = 1.0 / model.symbol
    shape = grid.shape

    def matvec(x):
        x = np.asarray(x).reshape(-1)
        y = model.apply((sw * x).reshape(shape), inv_symbol).ravel()
        return sw * y

    op = LinearOperator((grid.size, grid.size), matvec=matvec, dtype=float)
    v0 = sw.copy()
    vals, vecs = eigsh(op, k=1, which="LA", tol=tol, v0=v0)
    lam = float(vals[0])
    x = vecs[:, 0]
    u = model.apply((sw * x).reshape(shape), inv_symbol)
    if np.sum(u) < 0:
        u = -u
    return HardyMinimum(1.0 / lam, Field(grid, u), params.gamma_H)
