"""Non-standard Gaussian packets: the node packet and the wall packet.

The *node packet* is a free-particle solution whose momentum amplitude
carries an odd prefactor (p - p0), so both the momentum and position
densities have a node riding at the packet center.  Its zero-offset
limit (x0 = p0 = 0) vanishes at x = 0 for all times and therefore also
solves the hard-wall problem directly; restricted to x <= 0 and
renormalized by sqrt(2) it is called the *wall packet* here.  The wall
packet is the degenerate limit of the mirror construction in
:mod:`wallbounce.bouncer` and has unusual closed-form behaviour: its
momentum spread *decreases* with time as the outgoing components reflect
off the wall.

All moments below are exact closed forms; the momentum ones follow from
applying (hbar/i)*d/dx to the explicit wavefunctions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .packets import Moments

__all__ = [
    "SpecialParams",
    "phi_node_packet",
    "psi_node_packet",
    "node_packet_moments",
    "psi_wall_packet",
    "wall_packet_moments",
    "wall_packet_force",
    "wall_packet_uncertainty",
]

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class SpecialParams:
    """Length-scale-first parameterization of the non-standard packets.

    ``beta`` is the position width scale; the spreading time
    ``t0 = mass*beta**2/hbar`` and the momentum-width parameter
    ``alpha = beta/hbar`` are derived from it so the scales can never be
    inconsistent.  ``x0``/``p0`` apply to the node packet only; the wall
    packet requires both to be zero.
    """

    beta: float
    hbar: float = 1.0
    mass: float = 1.0
    x0: float = 0.0
    p0: float = 0.0

    def __post_init__(self):
        for name in ("beta", "hbar", "mass", "x0", "p0"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        for name in ("beta", "hbar", "mass"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")

    @property
    def alpha(self) -> float:
        return self.beta / self.hbar

    @property
    def t0(self) -> float:
        return self.mass * self.beta**2 / self.hbar

    def beta_t(self, t: float) -> float:
        return self.beta * math.sqrt(1.0 + (t / self.t0) ** 2)

    def center(self, t: float) -> float:
        return self.x0 + self.p0 * t / self.mass


def phi_node_packet(sp: SpecialParams, p, t: float):
    """Momentum-space node packet: a Gaussian with an odd (p - p0) prefactor.

    phi(p, t) = sqrt(2*alpha**3/sqrt(pi)) * (p - p0)
    * exp(-alpha**2*(p - p0)**2/2) * exp(-i*p*x0/hbar)
    * exp(-i*p**2*t/(2*m*hbar)); normalized on the full p-line, with a
    node at p = p0.
    """
    p = np.asarray(p, dtype=float)
    a = sp.alpha
    amp = math.sqrt(2.0 * a**3 / _SQRT_PI)
    out = (
        amp
        * (p - sp.p0)
        * np.exp(-(a**2) * (p - sp.p0) ** 2 / 2.0)
        * np.exp(-1j * p * sp.x0 / sp.hbar - 1j * p**2 * t / (2.0 * sp.mass * sp.hbar))
    )
    return out[()] if out.ndim == 0 else out


def psi_node_packet(sp: SpecialParams, x, t: float):
    """Position-space node packet (Fourier transform of :func:`phi_node_packet`).

    psi(x, t) = i * sqrt(2 / (sqrt(pi)*beta**3*(1 + i*t/t0)**3))
    * exp(i*p0*(x - x0)/hbar) * exp(-i*p0**2*t/(2*m*hbar))
    * (x - X(t)) * exp(-(x - X(t))**2/(2*beta**2*(1 + i*t/t0))),
    with the principal branch for the 3/2-power and a node at x = X(t).
    The prefactor is fixed by unit full-line norm.
    """
    x = np.asarray(x, dtype=float)
    w = 1.0 + 1j * t / sp.t0
    amp = 1j * math.sqrt(2.0 / (_SQRT_PI * sp.beta**3)) / (w * np.sqrt(w))
    xc = x - sp.center(t)
    phase = np.exp(
        1j * sp.p0 * (x - sp.x0) / sp.hbar - 1j * sp.p0**2 * t / (2.0 * sp.mass * sp.hbar)
    )
    out = amp * phase * xc * np.exp(-(xc**2) / (2.0 * sp.beta**2 * w))
    return out[()] if out.ndim == 0 else out


def node_packet_moments(sp: SpecialParams, t: float) -> Moments:
    """Closed-form moments of the node packet.

    <p> = p0 with constant dp = sqrt(3/2)/alpha; <x> = X(t) with
    dx = sqrt(3/2)*beta_t, so dx*dp = (3*hbar/2)*sqrt(1 + (t/t0)**2),
    three times the minimal Gaussian product.
    """
    x_mean = sp.center(t)
    x_var = 1.5 * sp.beta_t(t) ** 2
    p_var = 1.5 / sp.alpha**2
    return Moments.from_raw(t, x_mean, x_mean**2 + x_var, sp.p0, sp.p0**2 + p_var)


def _require_zero_offset(sp: SpecialParams):
    if sp.x0 != 0.0 or sp.p0 != 0.0:
        raise ValueError("wall packet requires x0 = 0 and p0 = 0")


def psi_wall_packet(sp: SpecialParams, x, t: float):
    """Half-line wall packet: sqrt(2) times the zero-offset node packet for x <= 0.

    Vanishes identically for x >= 0 and at the wall for all t, so it is
    an exact bouncing solution in its own right; the sqrt(2) restores
    unit norm on the half-line.
    """
    _require_zero_offset(sp)
    x = np.asarray(x, dtype=float)
    w = 1.0 + 1j * t / sp.t0
    amp = 1j * math.sqrt(4.0 / (_SQRT_PI * sp.beta**3)) / (w * np.sqrt(w))
    val = amp * x * np.exp(-(x**2) / (2.0 * sp.beta**2 * w))
    out = np.where(x <= 0.0, np.asarray(val), 0.0 + 0.0j)
    return out[()] if out.ndim == 0 else out


def wall_packet_moments(sp: SpecialParams, t: float) -> Moments:
    """Closed-form moments of the wall packet.

    <x> = -2*beta_t/sqrt(pi), <x^2> = 3*beta_t**2/2,
    <p> = -(2*hbar/(beta*sqrt(pi))) * (t/t0)/sqrt(1 + (t/t0)**2),
    <p^2> = 3*hbar**2/(2*beta**2) (conserved).  The momentum spread
    decreases in time: the positive-momentum half of the distribution is
    folded to negative values as it reflects off the wall.
    """
    _require_zero_offset(sp)
    s = t / sp.t0
    bt = sp.beta_t(t)
    hb = sp.hbar / sp.beta
    x_mean = -2.0 * bt / _SQRT_PI
    x2_mean = 1.5 * bt**2
    p_mean = -(2.0 * hb / _SQRT_PI) * s / math.sqrt(1.0 + s * s)
    p2_mean = 1.5 * hb**2
    return Moments.from_raw(t, x_mean, x2_mean, p_mean, p2_mean)


def wall_packet_force(sp: SpecialParams, t: float) -> float:
    """Wall force d<p>/dt on the wall packet:
    -(2/(alpha*sqrt(pi)*t0)) * (1 + (t/t0)**2)**(-3/2).

    Always negative, with magnitude decreasing monotonically from the
    initial value of order dp0/t0.
    """
    _require_zero_offset(sp)
    s = t / sp.t0
    return -(2.0 / (sp.alpha * _SQRT_PI * sp.t0)) * (1.0 + s * s) ** -1.5


def wall_packet_uncertainty(sp: SpecialParams, t: float) -> float:
    """Uncertainty product dx*dp of the wall packet.

    Starts at (hbar/2)*sqrt(3*(3*pi - 8)/pi) ~ 0.58*hbar, and grows for
    t >> t0 with slope (3*pi - 8)/pi ~ 0.45 relative to the standard
    Gaussian product.
    """
    m = wall_packet_moments(sp, t)
    return m.uncertainty_product()
