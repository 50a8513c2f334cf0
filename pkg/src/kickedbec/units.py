"""Bridge between laboratory units and the dimensionless kick parameters.

For a standing wave of wavelength lambda (counterpropagating beams, so the
grating period is lambda/2 and the grating vector G = 4*pi/lambda):

    half-Talbot time   T_1/2 = 2*pi*M / (hbar*G^2)
    kick period        tau   = 2*pi * T / T_1/2   (tau = 2*pi at T = T_1/2)
    gravity parameter  eta   = g*M*T / (hbar*G)

The experimental kick strength k ~ Omega^2*dt/Delta is included only as a
documentation-grade estimate; simulations take k directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.constants import hbar

TWO_PI = 2.0 * math.pi

# 87Rb, the workhorse atom for these experiments
RB87_MASS_KG = 86.909180527 * 1.66053906892e-27


@dataclass(frozen=True)
class UnitContext:
    """Laboratory quantities; SI units throughout."""

    wavelength: float          # kicking light wavelength (m)
    mass: float                # atomic mass (kg)
    pulse_period: float        # kick period T (s)
    gravity: float = 9.81      # effective acceleration (m/s^2)
    rabi_frequency: float | None = None   # Omega (rad/s), for k estimate only
    detuning: float | None = None         # Delta (rad/s)
    pulse_length: float | None = None     # dt (s)

    def __post_init__(self):
        for name in ("wavelength", "mass", "pulse_period", "gravity"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")

    @property
    def grating_vector(self) -> float:
        # counterpropagating beams: grating period = wavelength/2
        return TWO_PI / (self.wavelength / 2.0)


@dataclass(frozen=True)
class UnitResult:
    tau: float
    eta: float
    half_talbot_time: float
    grating_vector: float


def half_talbot_time(u: UnitContext) -> float:
    g_vec = u.grating_vector
    return TWO_PI * u.mass / (hbar * g_vec * g_vec)


def convert_units(u: UnitContext) -> UnitResult:
    """Dimensionless (tau, eta) for the given lab configuration."""
    t_half = half_talbot_time(u)
    tau = TWO_PI * u.pulse_period / t_half
    eta = u.gravity * u.mass * u.pulse_period / (hbar * u.grating_vector)
    return UnitResult(
        tau=tau,
        eta=eta,
        half_talbot_time=t_half,
        grating_vector=u.grating_vector,
    )


def pulse_period_for_tau(u: UnitContext, tau: float) -> float:
    """Inverse mapping: the pulse period T realizing a given tau."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    return tau / TWO_PI * half_talbot_time(u)


def kick_strength_estimate(rabi_frequency: float, pulse_length: float,
                           detuning: float) -> float:
    """Rough experimental kick strength, Omega^2 * dt / Delta."""
    if rabi_frequency <= 0 or pulse_length <= 0 or detuning <= 0:
        raise ValueError("all inputs must be positive")
    return rabi_frequency ** 2 * pulse_length / detuning
