"""Gaussian packet bouncing off an infinite wall at x = 0.

The half-line solution is built by the method of images: subtract the
mirrored packet so the wavefunction vanishes at the wall,

    psi_mirror(x, t) = N * [psi(x, t) - psi(-x, t)]   for x < 0,
    psi_mirror(x, t) = 0                              for x >= 0.

Because the difference is odd in x, every integral of an even quantity
over the half-line equals half the full-line integral, which is what
makes the normalization N, the even moments ``<x^2>`` and ``<p^2>``, and
the autocorrelation available in closed form.  Odd moments only admit
near-collision expansions; the exact values are left to the numerical
oracle.

Geometry convention: the physical packet lives at x <= 0, so constructors
require x0 <= 0, and p0 > 0 means "moving toward the wall".  The
classical collision time t_c = -mass*x0/p0 exists only for x0 < 0,
p0 > 0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .packets import PacketParams, autocorrelation_free, psi_free

__all__ = [
    "ApproximationWindowWarning",
    "DegenerateMirrorError",
    "BouncerParams",
    "phase_space_distance",
    "mirror_normalization",
    "overlap_correction",
    "psi_bouncer",
    "position_second_moment",
    "momentum_second_moment",
    "energy_shift",
    "in_expansion_window",
    "x_mean_near_collision",
    "p_mean_at_collision",
    "effective_force",
    "collision_force_scale",
    "autocorrelation_bouncer",
]

_SQRT_PI = math.sqrt(math.pi)


class DegenerateMirrorError(ValueError):
    """The packet sits exactly at the wall with zero momentum.

    The mirror difference is then identically zero and cannot be
    normalized; use the wall packet from :mod:`wallbounce.special`.
    """


class ApproximationWindowWarning(UserWarning):
    """Near-collision expansion evaluated outside its validity window."""


def phase_space_distance(params: PacketParams) -> float:
    """Dimensionless squared phase-space offset of packet and mirror image.

    (x0/beta)**2 + (p0*beta/hbar)**2, equivalently
    0.5*[(x0/dx0)**2 + (p0/dp0)**2].  It controls how strongly the
    mirrored packet overlaps the physical one: corrections to
    free-particle behaviour scale like exp(-distance).
    """
    return (params.x0 / params.beta) ** 2 + (params.p0 * params.beta / params.hbar) ** 2


def mirror_normalization(params: PacketParams) -> float:
    """Normalization constant N = [1 - exp(-distance)]**(-1/2) of the mirror difference.

    Exact for arbitrary parameters and independent of time.  N > 1
    always, approaching 1 exponentially fast as the packet moves away
    from the wall in phase space.
    """
    z = phase_space_distance(params)
    if z == 0.0:
        raise DegenerateMirrorError(
            "degenerate mirror solution (x0 = p0 = 0); "
            "use the wall packet from wallbounce.special instead"
        )
    # expm1 keeps 1 - exp(-z) accurate for tiny z
    return 1.0 / math.sqrt(-math.expm1(-z))


def overlap_correction(z: float) -> float:
    """Mirror-overlap factor z*exp(-z)/(1 - exp(-z)) entering even moments.

    Continuous at z = 0 with value 1, strictly decreasing, and
    exponentially suppressed for large z.
    """
    z = float(z)
    if z < 0.0:
        raise ValueError(f"z must be >= 0, got {z!r}")
    if z == 0.0:
        return 1.0
    return z * math.exp(-z) / (-math.expm1(-z))


@dataclass(frozen=True)
class BouncerParams:
    """Gaussian packet on the half-line x <= 0 with a wall at x = 0."""

    base: PacketParams

    def __post_init__(self):
        if self.base.x0 > 0.0:
            raise ValueError(
                f"bouncing packet must start at x0 <= 0 (wall at x = 0), got x0 = {self.base.x0!r}"
            )

    @property
    def phase_space_distance(self) -> float:
        return phase_space_distance(self.base)

    @property
    def norm_constant(self) -> float:
        return mirror_normalization(self.base)

    @property
    def collision_time(self) -> float | None:
        """Classical wall-hit time -mass*x0/p0, or None if the packet never hits."""
        if self.base.x0 < 0.0 and self.base.p0 > 0.0:
            return -self.base.mass * self.base.x0 / self.base.p0
        return None


def psi_bouncer(bp: BouncerParams, x, t: float):
    """Normalized mirror-difference wavefunction on the half-line.

    Returns N*[psi(x,t) - psi(-x,t)] for x < 0 and exactly 0 for
    x >= 0; the wall value psi(0, t) is zero for all t by construction.
    """
    n = bp.norm_constant
    x = np.asarray(x, dtype=float)
    diff = psi_free(bp.base, x, t) - psi_free(bp.base, -x, t)
    out = np.where(x < 0.0, n * np.asarray(diff), 0.0 + 0.0j)
    return out[()] if out.ndim == 0 else out


def position_second_moment(bp: BouncerParams, t: float) -> float:
    """Exact <x^2> at time t: free value X(t)**2 + beta_t**2/2 plus the
    wall correction beta_t**2 * overlap_correction(distance)."""
    bt2 = bp.base.beta_t(t) ** 2
    free = bp.base.center(t) ** 2 + 0.5 * bt2
    return free + bt2 * overlap_correction(bp.phase_space_distance)


def momentum_second_moment(bp: BouncerParams) -> float:
    """Exact, time-independent <p^2>: free value p0**2 + hbar**2/(2*beta**2)
    plus (hbar/beta)**2 * overlap_correction(distance).

    Conserved because the Hamiltonian on the half-line is
    time-independent.
    """
    hb2 = (bp.base.hbar / bp.base.beta) ** 2
    free = bp.base.p0**2 + 0.5 * hb2
    return free + hb2 * overlap_correction(bp.phase_space_distance)


def energy_shift(bp: BouncerParams) -> float:
    """Relative kinetic-energy increase caused by the wall.

    Equals 2*overlap_correction(distance) / (1 + 2*(p0*beta/hbar)**2),
    which is exactly (<p^2>_wall - <p^2>_free)/<p^2>_free; the wall far
    away in phase space perturbs the energy only exponentially little.
    """
    b = bp.base.p0 * bp.base.beta / bp.base.hbar
    return 2.0 * overlap_correction(bp.phase_space_distance) / (1.0 + 2.0 * b * b)


def in_expansion_window(bp: BouncerParams, t: float) -> bool:
    """True when |X(t)| <= beta_t, the regime of the near-collision expansion."""
    return abs(bp.base.center(t)) <= bp.base.beta_t(t)


def x_mean_near_collision(bp: BouncerParams, t: float, terms: int = 2) -> float:
    """Near-collision expansion of <x> in powers of the classical center X(t).

    terms=1 gives the leading value -beta_t/sqrt(pi); terms=2 adds
    -X(t)**2/(beta_t*sqrt(pi)), the softened-parabola correction.  Only
    meaningful while |X(t)| <~ beta_t; outside that window a warning is
    emitted (no hard validity radius is claimed).
    """
    if terms not in (1, 2):
        raise ValueError(f"terms must be 1 or 2, got {terms!r}")
    bt = bp.base.beta_t(t)
    big_x = bp.base.center(t)
    if abs(big_x) > bt:
        warnings.warn(
            f"|X(t)| = {abs(big_x):.4g} exceeds beta_t = {bt:.4g}; "
            "near-collision expansion is outside its validity window",
            ApproximationWindowWarning,
            stacklevel=2,
        )
    value = -bt / _SQRT_PI
    if terms == 2:
        value -= big_x**2 / (bt * _SQRT_PI)
    return value


def _require_collision_time(bp: BouncerParams) -> float:
    tc = bp.collision_time
    if tc is None:
        raise ValueError("collision time undefined: requires x0 < 0 and p0 > 0")
    return tc


def p_mean_at_collision(bp: BouncerParams) -> float:
    """<p> at the classical collision time.

    -(hbar/(beta*sqrt(pi))) * (t_c/t0)/sqrt(1 + (t_c/t0)**2), tending to
    -1/(sqrt(pi)*alpha) for t_c >> t0.  Nonzero because the fastest
    momentum components have already reflected by t_c while the slow
    ones have not.
    """
    tc = _require_collision_time(bp)
    s = tc / bp.base.t0
    return -(bp.base.hbar / (bp.base.beta * _SQRT_PI)) * s / math.sqrt(1.0 + s * s)


def effective_force(bp: BouncerParams) -> float:
    """Effective wall force m*d2<x>/dt2 at the collision time:
    -(2/sqrt(pi)) * p0**2/(mass*beta_t(t_c))."""
    tc = _require_collision_time(bp)
    return -(2.0 / _SQRT_PI) * bp.base.p0**2 / (bp.base.mass * bp.base.beta_t(tc))


def collision_force_scale(bp: BouncerParams) -> float:
    """Dimensional estimate -2*p0**2/(mass*beta_t(t_c)) of the collision force.

    Momentum transfer ~ -2*p0 over a crossing time ~ beta_t*mass/p0; the
    exact coefficient is 1/sqrt(pi) of this.
    """
    tc = _require_collision_time(bp)
    return -2.0 * bp.base.p0**2 / (bp.base.mass * bp.base.beta_t(tc))


def _one_minus_exp(w):
    """1 - exp(-w) for complex w, accurate near w = 0."""
    w = complex(w)
    if abs(w) < 1e-4:
        # series for 1 - exp(-w); relative error < |w|**4/120
        return w * (1.0 - w / 2.0 * (1.0 - w / 3.0 * (1.0 - w / 4.0)))
    return -(np.exp(-w) - 1.0)


def autocorrelation_bouncer(bp: BouncerParams, t: float) -> complex:
    """Overlap of the bouncing packet at time t with its initial state.

    Equals the free autocorrelation times the mirror factor
    [1 - exp(-distance/(1 + i*t/2t0))] / [1 - exp(-distance)]; the
    modulus decreases monotonically, with no visible signature of the
    collision itself.
    """
    z = bp.phase_space_distance
    if z == 0.0:
        raise DegenerateMirrorError(
            "degenerate mirror solution (x0 = p0 = 0); "
            "use the wall packet from wallbounce.special instead"
        )
    u = 1.0 + 0.5j * t / bp.base.t0
    factor = _one_minus_exp(z / u) / _one_minus_exp(z)
    return complex(autocorrelation_free(bp.base, t) * factor)
