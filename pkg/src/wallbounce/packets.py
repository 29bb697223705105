"""Free-particle Gaussian wave packets in closed form.

Everything here is the textbook free Gaussian: the position- and
momentum-space wavefunctions, their first and second moments, and the
autocorrelation (overlap of the evolved state with the initial one).
``hbar`` and ``mass`` are carried explicitly so any unit system works;
the CLI defaults to natural units hbar = mass = 1.

All wavefunction evaluators are pure, vectorized over the position or
momentum argument, and use the principal branch for the complex square
roots (the branch argument always has positive real part, so no cut is
ever crossed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PacketParams",
    "Moments",
    "psi_free",
    "phi_free",
    "free_moments",
    "autocorrelation_free",
]

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class PacketParams:
    """Physical configuration of a Gaussian packet.

    Parameters
    ----------
    x0, p0 : float
        Initial center position and momentum.
    alpha : float
        Momentum-space width parameter (units of 1/momentum); the
        momentum spread is 1/(alpha*sqrt(2)).
    hbar, mass : float
        Action quantum and particle mass, default 1.

    Notes
    -----
    Derived scales: ``beta = alpha*hbar`` is the position-space width,
    ``t0 = mass*hbar*alpha**2`` the spreading time, and
    ``beta_t(t) = beta*sqrt(1 + (t/t0)**2)`` the width at time t.
    """

    x0: float
    p0: float
    alpha: float
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        for name in ("x0", "p0", "alpha", "hbar", "mass"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        for name in ("alpha", "hbar", "mass"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")

    @property
    def beta(self) -> float:
        return self.alpha * self.hbar

    @property
    def t0(self) -> float:
        return self.mass * self.hbar * self.alpha**2

    def beta_t(self, t: float) -> float:
        """Width scale at time t; beta_t(0) = beta, growing like |t|/t0."""
        return self.beta * math.sqrt(1.0 + (t / self.t0) ** 2)

    def center(self, t: float) -> float:
        """Classical free-flight center X(t) = x0 + p0*t/mass."""
        return self.x0 + self.p0 * t / self.mass


@dataclass(frozen=True)
class Moments:
    """Position and momentum moments of a state at one instant.

    ``x_sd`` and ``p_sd`` are the standard deviations derived from the
    first and second moments; construction via :meth:`from_raw` keeps
    them consistent by definition.
    """

    time: float
    x_mean: float
    x2_mean: float
    x_sd: float
    p_mean: float
    p2_mean: float
    p_sd: float

    @classmethod
    def from_raw(cls, time, x_mean, x2_mean, p_mean, p2_mean) -> "Moments":
        x_var = x2_mean - x_mean**2
        p_var = p2_mean - p_mean**2
        if x_var < 0.0 or p_var < 0.0:
            raise ValueError("second moment smaller than squared mean")
        return cls(time, x_mean, x2_mean, math.sqrt(x_var), p_mean, p2_mean, math.sqrt(p_var))

    def uncertainty_product(self) -> float:
        return self.x_sd * self.p_sd


def psi_free(params: PacketParams, x, t: float):
    """Position-space Gaussian packet psi(x, t).

    Parameters
    ----------
    params : PacketParams
    x : float or ndarray
        Position(s) to evaluate at.
    t : float
        Time.

    Returns
    -------
    complex or ndarray
        psi(x, t) = [sqrt(pi)*alpha*hbar*(1 + i*t/t0)]**(-1/2)
        * exp(i*p0*(x - x0)/hbar) * exp(-i*p0**2*t/(2*m*hbar))
        * exp(-(x - X(t))**2 / (2*beta**2*(1 + i*t/t0))).
    """
    x = np.asarray(x, dtype=float)
    w = 1.0 + 1j * t / params.t0
    amp = 1.0 / np.sqrt(_SQRT_PI * params.alpha * params.hbar * w)
    phase = np.exp(
        1j * params.p0 * (x - params.x0) / params.hbar
        - 1j * params.p0**2 * t / (2.0 * params.mass * params.hbar)
    )
    envelope = np.exp(-((x - params.center(t)) ** 2) / (2.0 * params.beta**2 * w))
    out = amp * phase * envelope
    return out[()] if out.ndim == 0 else out


def phi_free(params: PacketParams, p, t: float):
    """Momentum-space Gaussian packet phi(p, t).

    phi(p, t) = (alpha/sqrt(pi))**(1/2) * exp(-alpha**2*(p - p0)**2/2)
    * exp(-i*p*x0/hbar) * exp(-i*p**2*t/(2*m*hbar)).

    Free evolution multiplies phi by a pure phase, so |phi(p, t)| is
    independent of t.
    """
    p = np.asarray(p, dtype=float)
    amp = math.sqrt(params.alpha / _SQRT_PI)
    out = (
        amp
        * np.exp(-params.alpha**2 * (p - params.p0) ** 2 / 2.0)
        * np.exp(-1j * p * params.x0 / params.hbar - 1j * p**2 * t / (2.0 * params.mass * params.hbar))
    )
    return out[()] if out.ndim == 0 else out


def free_moments(params: PacketParams, t: float) -> Moments:
    """Closed-form moments of the free Gaussian at time t.

    <x> = X(t), dx = beta_t/sqrt(2); <p> = p0, dp = 1/(alpha*sqrt(2)).
    The uncertainty product is (hbar/2)*sqrt(1 + (t/t0)**2).
    """
    x_mean = params.center(t)
    x_var = 0.5 * params.beta_t(t) ** 2
    p_var = 0.5 / params.alpha**2
    return Moments.from_raw(t, x_mean, x_mean**2 + x_var, params.p0, params.p0**2 + p_var)


def autocorrelation_free(params: PacketParams, t: float):
    """Overlap Int psi*(x,0) psi(x,t) dx of the free Gaussian with its evolution.

    A(t) = (1 + i*t/2t0)**(-1/2) * exp[-i*alpha**2*p0**2*t / (2*t0*(1 + i*t/2t0))],
    so A(0) = 1 and |A(t)|**2 = (1 + (t/2t0)**2)**(-1/2)
    * exp[-2*alpha**2*p0**2*(t/2t0)**2/(1 + (t/2t0)**2)] decreases
    monotonically in |t| through both the dispersive prefactor and the
    p0-dependent exponential.  The phase rotates with the (positive)
    mean energy, as the defining integral requires.
    """
    u = 1.0 + 0.5j * t / params.t0
    return complex(
        np.exp(-1j * params.alpha**2 * params.p0**2 * t / (2.0 * params.t0 * u)) / np.sqrt(u)
    )
