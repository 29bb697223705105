"""Independent numerical oracle: grid quadrature, momentum stencils, propagation.

This module knows nothing about the closed forms it is used to check.
States live on a uniform grid (by default the half-line [x_min, 0] with
the wall as the last point); moments and overlaps are composite-Simpson
quadratures, momentum moments use finite-difference derivatives with an
internal convergence estimate, and time evolution is an unconditionally
stable, exactly norm-preserving Cayley (implicit midpoint) step of the
free Hamiltonian with hard-wall (Dirichlet) ends.

Spatial derivatives inside the Cayley step use a 4th-order compact
(Numerov-type) correction, which keeps the linear systems tridiagonal
while pushing the spatial phase error to O(h**4); the time error is the
usual O(dt**2), which dominates on the grids used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from .packets import PacketParams

__all__ = [
    "TailCaptureError",
    "GridMismatchError",
    "StencilConvergenceError",
    "PropagationError",
    "GridSpec",
    "GridState",
    "sample",
    "moment_x",
    "moment_p",
    "overlap",
    "propagate",
    "half_line_grid",
    "full_line_grid",
]

#: endpoint amplitude (relative to the max) above which a grid is
#: considered too narrow to capture the state's tails
TAIL_RTOL = 1e-12


class TailCaptureError(ValueError):
    """State amplitude at a grid end is too large for reliable quadrature."""


class GridMismatchError(ValueError):
    """Binary grid operation applied to states on different grids."""


class StencilConvergenceError(RuntimeError):
    """Finite-difference momentum moment did not converge on this grid."""


class PropagationError(RuntimeError):
    """Tridiagonal solve failed or the propagated state went non-finite."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid of n_points from x_min to x_max inclusive.

    The default x_max = 0.0 is the hard wall, giving the half-line grid
    [x_min, 0] with the last point exactly at the wall; pass x_max > 0
    for the full-line variant used with free packets.  n_points must be
    odd so composite Simpson weights exist.
    """

    x_min: float
    n_points: int
    x_max: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise ValueError("grid bounds must be finite")
        if self.x_min >= self.x_max:
            raise ValueError(f"x_min must be < x_max, got [{self.x_min}, {self.x_max}]")
        if self.n_points < 3:
            raise ValueError(f"n_points must be >= 3, got {self.n_points}")
        if self.n_points % 2 == 0:
            raise ValueError(f"n_points must be odd for composite Simpson, got {self.n_points}")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    def refined(self) -> "GridSpec":
        """Same span with halved spacing (n -> 2n - 1 keeps n odd)."""
        return GridSpec(self.x_min, 2 * self.n_points - 1, self.x_max)


@dataclass
class GridState:
    """Complex wavefunction values on a grid at one time."""

    grid: GridSpec
    values: np.ndarray
    time: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.grid.n_points,):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid ({self.grid.n_points},)"
            )


def sample(wavefn, grid: GridSpec, t: float) -> GridState:
    """Evaluate wavefn(x, t) pointwise on the grid."""
    values = np.asarray(wavefn(grid.points(), t), dtype=np.complex128)
    if values.shape != (grid.n_points,):
        raise ValueError(f"wavefn returned shape {values.shape}, expected ({grid.n_points},)")
    if not np.all(np.isfinite(values)):
        raise ValueError("wavefn produced non-finite values on the grid")
    return GridState(grid, values, t)


def _quadrature_weights(grid: GridSpec, rule: str) -> np.ndarray:
    h = grid.h
    if rule == "simpson":
        w = np.ones(grid.n_points)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return w * (h / 3.0)
    if rule == "trapezoid":
        w = np.full(grid.n_points, h)
        w[0] = w[-1] = 0.5 * h
        return w
    raise ValueError(f"unknown quadrature rule {rule!r}")


def _check_tails(state: GridState):
    amax = float(np.max(np.abs(state.values)))
    if amax == 0.0:
        return
    # the x_max end is a tail only on full-line grids; on the half-line
    # (x_max == 0) it is the wall, where states vanish by construction
    ends = [(0, "x_min")] if state.grid.x_max == 0.0 else [(0, "x_min"), (-1, "x_max")]
    for end, label in ends:
        if abs(state.values[end]) > TAIL_RTOL * amax:
            span = state.grid.x_max - state.grid.x_min
            raise TailCaptureError(
                f"|psi({label})| = {abs(state.values[end]):.3e} exceeds "
                f"{TAIL_RTOL:g} * max|psi| = {TAIL_RTOL * amax:.3e}; widen the grid "
                f"(e.g. x_min <= {state.grid.x_min - 0.5 * span:.6g})"
            )


def moment_x(state: GridState, order: int, rule: str = "simpson") -> float:
    """Quadrature of x**order * |psi|^2 over the grid.

    order 0 is the norm, orders 1 and 2 give <x> and <x^2>.  Raises
    TailCaptureError when the state is not negligible at the grid ends.
    """
    if order < 0 or int(order) != order:
        raise ValueError(f"order must be a nonnegative integer, got {order!r}")
    _check_tails(state)
    x = state.grid.points()
    density = np.abs(state.values) ** 2
    w = _quadrature_weights(state.grid, rule)
    if order == 0:
        return float(np.sum(w * density))
    return float(np.sum(w * x ** int(order) * density))


def _derivative_o4(v: np.ndarray, h: float) -> np.ndarray:
    """First derivative, 4th-order central stencils with 4th-order one-sided ends."""
    d = np.empty_like(v)
    d[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
    d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h)
    d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * h)
    d[-1] = (25.0 * v[-1] - 48.0 * v[-2] + 36.0 * v[-3] - 16.0 * v[-4] + 3.0 * v[-5]) / (12.0 * h)
    d[-2] = (3.0 * v[-1] + 10.0 * v[-2] - 18.0 * v[-3] + 6.0 * v[-4] - v[-5]) / (12.0 * h)
    return d


def _derivative_o2(v: np.ndarray, h: float) -> np.ndarray:
    """First derivative, 2nd-order; used only to estimate stencil convergence."""
    d = np.empty_like(v)
    d[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
    d[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    return d


def moment_p(state: GridState, order: int, *, hbar: float = 1.0, rtol: float = 1e-6) -> float:
    """Momentum moment via the operator (hbar/i) d/dx on the grid.

    order 1 returns Re Int psi* (hbar/i) psi' dx; order 2 returns
    hbar**2 Int |psi'|^2 dx (the boundary term vanishes because the
    state is zero at the wall / in the tails).  The result is checked
    against a 2nd-order stencil: their difference estimates the
    low-order error, from which the 4th-order error is extrapolated;
    StencilConvergenceError is raised if that estimate exceeds
    rtol * scale.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order!r}")
    if state.grid.n_points < 5:
        raise ValueError("momentum moments need at least 5 grid points")
    _check_tails(state)
    v = state.values
    if not np.any(v):
        return 0.0
    h = state.grid.h
    w = _quadrature_weights(state.grid, "simpson")
    d4 = _derivative_o4(v, h)
    d2 = _derivative_o2(v, h)
    if order == 1:
        m4 = hbar * float(np.sum(w * np.imag(np.conj(v) * d4)))
        m2 = hbar * float(np.sum(w * np.imag(np.conj(v) * d2)))
        # momentum scale for near-zero means, from the same derivative data
        scale = max(abs(m4), hbar * math.sqrt(abs(float(np.sum(w * np.abs(d4) ** 2)))))
    else:
        m4 = hbar**2 * float(np.sum(w * np.abs(d4) ** 2))
        m2 = hbar**2 * float(np.sum(w * np.abs(d2) ** 2))
        scale = abs(m4)
    if scale > 0.0:
        # second-order error ~ (m2 - m4); fourth-order error ~ 1.2 * e2^2/scale,
        # kept with a safety factor of 4
        err_est = 5.0 * (m4 - m2) ** 2 / scale
        if err_est > rtol * scale:
            raise StencilConvergenceError(
                f"estimated stencil error {err_est:.3e} exceeds rtol*scale = "
                f"{rtol * scale:.3e}; refine the grid (h = {h:.3e})"
            )
    return m4


def overlap(a: GridState, b: GridState) -> complex:
    """Simpson quadrature of Int a* b dx; grids must be identical."""
    if a.grid != b.grid:
        raise GridMismatchError(f"grids differ: {a.grid} vs {b.grid}")
    w = _quadrature_weights(a.grid, "simpson")
    return complex(np.sum(w * np.conj(a.values) * b.values))


class _CayleyStepper:
    """Factored tridiagonal Cayley step (M - icK) psi+ = (M + icK) psi.

    K is the standard 3-point Laplacian stencil, M = I + K/12 the
    Numerov mass matrix; both are rational in K so the step is exactly
    unitary in the discrete l2 norm, for either sign of dt.
    """

    def __init__(self, n_interior: int, h: float, dt: float, hbar: float, mass: float):
        c = hbar * dt / (4.0 * mass * h * h)
        diag = np.full(n_interior, 5.0 / 6.0 + 2.0j * c, dtype=np.complex128)
        off = np.full(max(n_interior - 1, 0), 1.0 / 12.0 - 1.0j * c, dtype=np.complex128)
        self._rhs_diag = np.conj(diag[0])
        self._rhs_off = np.conj(off[0]) if n_interior > 1 else 0.0
        # scipy's wrappers copy inputs unless overwrite flags are passed
        dl, d, du, du2, ipiv, info = lapack.zgttrf(off, diag, off)
        if info != 0:
            raise PropagationError(f"tridiagonal factorization failed (info={info})")
        self._factors = (dl, d, du, du2, ipiv)

    def step(self, psi: np.ndarray) -> np.ndarray:
        rhs = self._rhs_diag * psi
        if psi.size > 1:
            rhs[:-1] += self._rhs_off * psi[1:]
            rhs[1:] += self._rhs_off * psi[:-1]
        out, info = lapack.zgttrs(*self._factors, rhs)
        if info != 0:
            raise PropagationError(f"tridiagonal solve failed (info={info})")
        return out


def propagate(
    initial: GridState,
    dt: float,
    steps: int,
    *,
    hbar: float = 1.0,
    mass: float = 1.0,
) -> GridState:
    """Evolve a state under the free Hamiltonian with hard walls at both grid ends.

    Cayley stepping conserves the discrete norm to round-off per step
    and is exactly reversible: stepping with -dt undoes stepping with
    +dt.  The grid ends are pinned to zero (Dirichlet); the caller must
    place x_min far enough out that nothing reflects off the artificial
    edge over the simulated horizon.
    """
    if int(steps) != steps or steps < 0:
        raise ValueError(f"steps must be a nonnegative integer, got {steps!r}")
    if dt == 0.0 or not math.isfinite(dt):
        raise ValueError(f"dt must be finite and nonzero, got {dt!r}")
    values = initial.values.astype(np.complex128, copy=True)
    if not np.all(np.isfinite(values)):
        raise PropagationError("initial state contains non-finite values")
    if steps == 0:
        return GridState(initial.grid, values, initial.time)
    _check_tails(initial)
    values[0] = 0.0
    values[-1] = 0.0
    stepper = _CayleyStepper(
        initial.grid.n_points - 2, initial.grid.h, dt, hbar, mass
    )
    interior = values[1:-1].copy()
    for _ in range(int(steps)):
        interior = stepper.step(interior)
    if not np.all(np.isfinite(interior)):
        raise PropagationError("propagated state went non-finite")
    out = np.zeros_like(values)
    out[1:-1] = interior
    return GridState(initial.grid, out, initial.time + dt * steps)


def _odd_at_least(n: float) -> int:
    m = max(int(math.ceil(n)), 3)
    return m if m % 2 == 1 else m + 1


def _resolved_spacing(params: PacketParams, points_per_beta: float | None, mirrored: bool) -> float:
    if points_per_beta is not None:
        return params.beta / points_per_beta
    # resolve the fastest oscillation in the density: the carrier (doubled
    # when a mirror partner beats against the packet), the momentum-tail
    # wiggles, and the spreading chirp where the envelope still has mass
    dp = 1.0 / (params.alpha * math.sqrt(2.0))
    carrier = (2.0 if mirrored else 1.0) * abs(params.p0)
    k_max = (carrier + 8.0 * dp) / params.hbar + 4.0 / params.beta
    # (k*h)^4/180 <= 1e-10  =>  k*h <= 0.0116
    return min(params.beta / 100.0, 0.0116 / k_max)


def half_line_grid(
    params: PacketParams,
    t_max: float,
    *,
    pad: float = 12.0,
    points_per_beta: float | None = None,
) -> GridSpec:
    """Grid on [x_min, 0] wide and fine enough for mirror states up to t_max.

    x_min = min(x0, 0) - pad*beta_t(t_max) keeps the tail mass below any
    tolerance used here; the spacing resolves the fastest density
    oscillation (or beta/points_per_beta when given).
    """
    bt = params.beta_t(t_max)
    x_lo = min(params.x0, 0.0) - pad * bt
    h = _resolved_spacing(params, points_per_beta, mirrored=True)
    return GridSpec(x_lo, _odd_at_least((0.0 - x_lo) / h + 1.0), 0.0)


def full_line_grid(
    params: PacketParams,
    t_min: float,
    t_max: float,
    *,
    pad: float = 12.0,
    points_per_beta: float | None = None,
) -> GridSpec:
    """Full-line grid covering the packet's trajectory from t_min to t_max."""
    bt = params.beta_t(max(abs(t_min), abs(t_max)))
    centers = (params.center(t_min), params.center(t_max))
    x_lo = min(centers) - pad * bt
    x_hi = max(centers) + pad * bt
    h = _resolved_spacing(params, points_per_beta, mirrored=False)
    return GridSpec(x_lo, _odd_at_least((x_hi - x_lo) / h + 1.0), x_hi)
