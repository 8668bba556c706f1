"""Environment coupling laws lambda(t) and thermal decoherence time scales.

``lambda = 0`` is the quantum (de Broglie-Bohm) limit and ``lambda = 1`` the
classical one.  The bath helpers work in SI units and use CODATA constants
from :mod:`scipy.constants`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants

from .errors import DomainError

HBAR = constants.hbar
K_B = constants.k


@dataclass(frozen=True)
class PureQuantum:
    """lambda(t) = 0."""

    def value(self, t):
        return 0.0 * t


@dataclass(frozen=True)
class PureClassical:
    """lambda(t) = 1."""

    def value(self, t):
        return 0.0 * t + 1.0


@dataclass(frozen=True)
class Fixed:
    """Constant coupling ``lambda0`` in [0, 1]."""

    lambda0: float

    def __post_init__(self):
        if not (0.0 <= self.lambda0 <= 1.0):
            raise DomainError(f"Fixed coupling must lie in [0, 1], got {self.lambda0!r}")

    def value(self, t):
        return 0.0 * t + self.lambda0


@dataclass(frozen=True)
class ExponentialRelaxation:
    """lambda(t) = 1 - exp(-b t); ``b`` is the inverse decoherence time."""

    b: float

    def __post_init__(self):
        if not (math.isfinite(self.b) and self.b >= 0.0):
            raise DomainError(f"relaxation rate b must be finite and >= 0, got {self.b!r}")

    def value(self, t):
        return -np.expm1(-self.b * t)


CouplingLaw = PureQuantum | PureClassical | Fixed | ExponentialRelaxation


def lambda_at(law: CouplingLaw, t):
    """Coupling strength at time ``t >= 0``.

    Accepts scalars or arrays. Negative times raise :class:`DomainError`;
    callers that need a pre-``t=0`` window clamp their own clock.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0) or not np.all(np.isfinite(t_arr)):
        raise DomainError("lambda(t) is defined for finite t >= 0")
    out = np.asarray(law.value(t_arr), dtype=float)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class BathParams:
    """Heat-bath and system parameters in SI units.

    ``gamma`` is the relaxation *rate* (``tau_R = 1/gamma``).
    """

    gamma: float
    temperature: float
    mass: float
    separation_dx: float

    def __post_init__(self):
        for name in ("gamma", "temperature", "mass", "separation_dx"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")

    @classmethod
    def from_relaxation_time(cls, tau_r, temperature, mass, separation_dx):
        if not tau_r > 0:
            raise DomainError(f"relaxation time must be positive, got {tau_r!r}")
        return cls(1.0 / tau_r, temperature, mass, separation_dx)


def thermal_wavelength(bath: BathParams) -> float:
    """``hbar / sqrt(2 m k_B T)`` in metres."""
    return HBAR / math.sqrt(2.0 * bath.mass * K_B * bath.temperature)


def relaxation_time(bath: BathParams) -> float:
    return 1.0 / bath.gamma


def diffusion_coefficient(bath: BathParams) -> float:
    """Momentum diffusion ``D = 2 m gamma k_B T`` (kg^2 m^2 s^-3)."""
    return 2.0 * bath.mass * bath.gamma * K_B * bath.temperature


def decoherence_time(bath: BathParams) -> float:
    """``tau_D = (1/gamma) (lambda_T / dx)^2`` in seconds."""
    ratio = thermal_wavelength(bath) / bath.separation_dx
    return ratio * ratio / bath.gamma
