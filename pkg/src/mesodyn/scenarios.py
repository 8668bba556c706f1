"""Closed-form wave fields for the three model systems.

Each scenario writes its wavefunction as ``psi = R exp(iS/hbar)`` and
supplies the amplitude ``R``, the phase (action) ``S``, the quantum potential
``Q = -(hbar^2/2m) R''/R`` and the analytic gradients needed by the trajectory
integrator.  All field functions broadcast over numpy arrays in ``x`` and
``t``.

Natural units are used throughout (``hbar = m = omega = 1`` by default).

Scenarios
---------
HOStationary(n)
    Harmonic-oscillator energy eigenstate ``n``; ``S = -E_n t``.
HOCoherent
    Non-dispersive Gaussian packet oscillating with amplitude ``a``.
FreeGaussian
    Spreading free Gaussian with initial width ``sigma0`` and drift ``u``.

The set is closed on purpose: the trajectory force uses ``Q`` in closed
form, so a new system means a new subclass implementing the abstract
field methods of :class:`Scenario`.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize, special

from .errors import DomainError


@dataclass(frozen=True)
class PhysParams:
    """Physical parameters shared by the scenarios (natural units)."""

    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0
    amplitude_a: float = 1.0
    sigma0: float = 1.0
    drift_u: float = 0.0

    def __post_init__(self):
        for name in ("hbar", "mass", "omega", "sigma0"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")
        for name in ("amplitude_a", "drift_u"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")


class Scenario(ABC):
    """Common interface of the closed-form systems."""

    params: PhysParams

    @abstractmethod
    def amplitude(self, x, t):
        """Amplitude R(x, t)."""

    @abstractmethod
    def phase(self, x, t):
        """Action S(x, t)."""

    @abstractmethod
    def quantum_potential(self, x, t):
        """Q(x, t) in closed form."""

    @abstractmethod
    def quantum_force(self, x, t):
        """-dQ/dx, analytic."""

    @abstractmethod
    def phase_gradient(self, x, t):
        """dS/dx, analytic."""

    @abstractmethod
    def accel_kernel(self):
        """Fused ``a(x, t, c) = (F_cl(x) + c F_Q(x, t)) / m`` for scalar ``t``.

        Works on floats and ndarrays alike; the integrator's inner loop.
        """

    @abstractmethod
    def velocity_kernel(self):
        """Fused guidance velocity ``v(x, t)`` for scalar ``t``."""

    @abstractmethod
    def potential(self, x):
        """External potential V(x)."""

    @abstractmethod
    def classical_force(self, x):
        """-dV/dx."""

    @abstractmethod
    def center(self, t):
        """Symmetry centre of the position density at time t."""

    @abstractmethod
    def width(self, t):
        """Standard deviation of the position density at time t."""

    @abstractmethod
    def quantile(self, q, t):
        """Inverse CDF of R^2 at time t."""

    @abstractmethod
    def default_dt(self):
        """Default integrator step (1/2000 of the natural time scale)."""

    def wavefunction(self, x, t):
        """Complex ``R exp(iS/hbar)``."""
        return self.amplitude(x, t) * np.exp(1j * self.phase(x, t) / self.params.hbar)


def _as_float(value):
    arr = np.asarray(value, dtype=float)
    return arr if arr.ndim else float(arr)


@dataclass(frozen=True)
class HOStationary(Scenario):
    """Oscillator eigenstate ``n``.

    ``R`` is the signed Hermite-Gaussian eigenfunction; use ``R**2`` for
    densities.  ``Q = (n + 1/2) hbar omega - m omega^2 x^2 / 2`` is taken in
    its polynomial form, which stays finite at the nodes of ``R``.
    """

    n: int = 0
    params: PhysParams = field(default_factory=PhysParams)

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 0:
            raise DomainError(f"HOStationary needs a non-negative integer n, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def energy(self):
        p = self.params
        return (self.n + 0.5) * p.hbar * p.omega

    @property
    def length(self):
        p = self.params
        return math.sqrt(p.hbar / (p.mass * p.omega))

    def amplitude(self, x, t=0.0):
        n, ell = self.n, self.length
        xi = np.asarray(x, dtype=float) / ell
        norm = 1.0 / math.sqrt(ell * math.sqrt(math.pi) * 2.0**n * math.factorial(n))
        values = norm * special.eval_hermite(n, xi) * np.exp(-0.5 * xi * xi)
        return _as_float(values + 0.0 * np.asarray(t, dtype=float))

    def phase(self, x, t):
        x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
        return _as_float(-self.energy * t)

    def quantum_potential(self, x, t=0.0):
        p = self.params
        x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
        return _as_float(self.energy - 0.5 * p.mass * p.omega**2 * x * x)

    def quantum_force(self, x, t=0.0):
        p = self.params
        x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
        return _as_float(p.mass * p.omega**2 * x)

    def phase_gradient(self, x, t=0.0):
        x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
        return _as_float(np.zeros_like(x))

    def potential(self, x):
        p = self.params
        x = np.asarray(x, dtype=float)
        return _as_float(0.5 * p.mass * p.omega**2 * x * x)

    def classical_force(self, x):
        p = self.params
        return _as_float(-p.mass * p.omega**2 * np.asarray(x, dtype=float))

    def accel_kernel(self):
        p = self.params
        k = p.mass * p.omega**2
        inv_m = 1.0 / p.mass

        def accel(x, t, c):
            # -k x + c k x: cancels exactly at c = 1
            return (-k * x + c * (k * x)) * inv_m

        return accel

    def velocity_kernel(self):
        def velocity(x, t):
            return 0.0 * x

        return velocity

    def center(self, t=0.0):
        return 0.0

    def width(self, t=0.0):
        return self.length * math.sqrt(self.n + 0.5)

    def _cdf_xi(self, xi):
        n = self.n
        norm = 1.0 / (math.sqrt(math.pi) * 2.0**n * math.factorial(n))

        def density(s):
            return norm * special.eval_hermite(n, s) ** 2 * math.exp(-s * s)

        half, _ = integrate.quad(density, 0.0, abs(xi), epsabs=1e-15, epsrel=1e-13, limit=200)
        return 0.5 + math.copysign(half, xi)

    def quantile(self, q, t=0.0):
        if self.n == 0:
            return self.length * math.sqrt(0.5) * float(special.ndtri(q))
        if q == 0.5:
            return 0.0
        reach = math.sqrt(2 * self.n + 1) + 12.0
        xi = optimize.brentq(lambda s: self._cdf_xi(s) - q, -reach, reach, xtol=1e-14, maxiter=200)
        return self.length * xi

    def default_dt(self):
        return (2.0 * math.pi / self.params.omega) / 2000.0


@dataclass(frozen=True)
class HOCoherent(Scenario):
    """Non-dispersive oscillator packet centred on ``a cos(omega t)``."""

    params: PhysParams = field(default_factory=PhysParams)

    def center(self, t=0.0):
        p = self.params
        return _as_float(p.amplitude_a * np.cos(p.omega * np.asarray(t, dtype=float)))

    def width(self, t=0.0):
        p = self.params
        return math.sqrt(p.hbar / (2.0 * p.mass * p.omega))

    def amplitude(self, x, t):
        p = self.params
        y = np.asarray(x, dtype=float) - self.center(t)
        norm = (p.mass * p.omega / (math.pi * p.hbar)) ** 0.25
        return _as_float(norm * np.exp(-p.mass * p.omega / (2.0 * p.hbar) * y * y))

    def phase(self, x, t):
        p = self.params
        m, w, a = p.mass, p.omega, p.amplitude_a
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        s = -0.5 * p.hbar * w * t + 0.25 * m * w * a * a * np.sin(2.0 * w * t) - m * w * x * a * np.sin(w * t)
        return _as_float(s)

    def quantum_potential(self, x, t):
        p = self.params
        y = np.asarray(x, dtype=float) - self.center(t)
        return _as_float(-0.5 * p.mass * p.omega**2 * y * y + 0.5 * p.hbar * p.omega)

    def quantum_force(self, x, t):
        p = self.params
        y = np.asarray(x, dtype=float) - self.center(t)
        return _as_float(p.mass * p.omega**2 * y)

    def phase_gradient(self, x, t):
        p = self.params
        x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
        return _as_float(-p.mass * p.omega * p.amplitude_a * np.sin(p.omega * t))

    def potential(self, x):
        p = self.params
        x = np.asarray(x, dtype=float)
        return _as_float(0.5 * p.mass * p.omega**2 * x * x)

    def classical_force(self, x):
        p = self.params
        return _as_float(-p.mass * p.omega**2 * np.asarray(x, dtype=float))

    def accel_kernel(self):
        p = self.params
        k = p.mass * p.omega**2
        w, a, inv_m = p.omega, p.amplitude_a, 1.0 / p.mass
        cos = math.cos

        def accel(x, t, c):
            return (-k * x + c * (k * (x - a * cos(w * t)))) * inv_m

        return accel

    def velocity_kernel(self):
        p = self.params
        w, a = p.omega, p.amplitude_a
        sin = math.sin

        def velocity(x, t):
            return 0.0 * x - w * a * sin(w * t)

        return velocity

    def quantile(self, q, t=0.0):
        return float(self.center(t)) + self.width(t) * float(special.ndtri(q))

    def default_dt(self):
        return (2.0 * math.pi / self.params.omega) / 2000.0


@dataclass(frozen=True)
class FreeGaussian(Scenario):
    """Free Gaussian packet, width ``sigma(t)``, centre ``u t``.

    The phase carries the spreading term ``(x - ut)^2 hbar^2 t / (8 m
    sigma0^2 sigma^2)``, linear in ``t``; that is the form whose gradient
    reproduces the ``sigma(t)`` law.
    """

    params: PhysParams = field(default_factory=PhysParams)

    def sigma(self, t):
        """Width ``sigma0 sqrt(1 + hbar^2 t^2 / (4 m^2 sigma0^4))``."""
        p = self.params
        t = np.asarray(t, dtype=float)
        s0 = p.sigma0
        return _as_float(s0 * np.sqrt(1.0 + (p.hbar * t / (2.0 * p.mass * s0 * s0)) ** 2))

    def center(self, t=0.0):
        return _as_float(self.params.drift_u * np.asarray(t, dtype=float))

    def width(self, t=0.0):
        return self.sigma(t)

    def amplitude(self, x, t):
        sig = np.asarray(self.sigma(t))
        y = np.asarray(x, dtype=float) - self.center(t)
        return _as_float((2.0 * math.pi * sig * sig) ** -0.25 * np.exp(-y * y / (4.0 * sig * sig)))

    def phase(self, x, t):
        p = self.params
        m, u, hbar, s0 = p.mass, p.drift_u, p.hbar, p.sigma0
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        sig2 = np.asarray(self.sigma(t)) ** 2
        y = x - u * t
        s = (
            -0.5 * hbar * np.arctan(hbar * t / (2.0 * m * s0 * s0))
            + m * u * (x - 0.5 * u * t)
            + y * y * hbar * hbar * t / (8.0 * m * s0 * s0 * sig2)
        )
        return _as_float(s)

    def quantum_potential(self, x, t):
        p = self.params
        sig2 = np.asarray(self.sigma(t)) ** 2
        y = np.asarray(x, dtype=float) - self.center(t)
        return _as_float(p.hbar**2 / (4.0 * p.mass * sig2) * (1.0 - y * y / (2.0 * sig2)))

    def quantum_force(self, x, t):
        p = self.params
        sig2 = np.asarray(self.sigma(t)) ** 2
        y = np.asarray(x, dtype=float) - self.center(t)
        return _as_float(p.hbar**2 * y / (4.0 * p.mass * sig2 * sig2))

    def phase_gradient(self, x, t):
        p = self.params
        m, u, hbar, s0 = p.mass, p.drift_u, p.hbar, p.sigma0
        t = np.asarray(t, dtype=float)
        sig2 = np.asarray(self.sigma(t)) ** 2
        y = np.asarray(x, dtype=float) - u * t
        return _as_float(m * u + y * hbar * hbar * t / (4.0 * m * s0 * s0 * sig2))

    def potential(self, x):
        return _as_float(np.zeros_like(np.asarray(x, dtype=float)))

    def classical_force(self, x):
        return _as_float(np.zeros_like(np.asarray(x, dtype=float)))

    def accel_kernel(self):
        p = self.params
        hb2_4m2 = p.hbar**2 / (4.0 * p.mass * p.mass)
        u = p.drift_u
        tau = p.hbar / (2.0 * p.mass * p.sigma0**2)
        s0sq = p.sigma0**2

        def accel(x, t, c):
            sig2 = s0sq * (1.0 + (tau * t) ** 2)
            return c * (hb2_4m2 * (x - u * t) / (sig2 * sig2))

        return accel

    def velocity_kernel(self):
        p = self.params
        u = p.drift_u
        tau = p.hbar / (2.0 * p.mass * p.sigma0**2)

        def velocity(x, t):
            # u + (x - ut) sigma'/sigma
            rate = tau * tau * t / (1.0 + (tau * t) ** 2)
            return u + (x - u * t) * rate

        return velocity

    def quantile(self, q, t=0.0):
        return float(self.center(t)) + float(self.sigma(t)) * float(special.ndtri(q))

    def default_dt(self):
        p = self.params
        return p.sigma0**2 * p.mass / p.hbar / 2000.0


# -- functional surface -------------------------------------------------------


def wave_amplitude(scn: Scenario, x, t):
    """Amplitude ``R(x, t)`` (signed for :class:`HOStationary`)."""
    return scn.amplitude(x, t)


def wave_phase(scn: Scenario, x, t):
    """Action ``S(x, t)``."""
    return scn.phase(x, t)


def quantum_potential(scn: Scenario, x, t):
    """Closed-form quantum potential ``Q(x, t)``."""
    return scn.quantum_potential(x, t)


def quantum_force(scn: Scenario, x, t):
    """Exact ``-dQ/dx``."""
    return scn.quantum_force(x, t)


def classical_force(scn: Scenario, x):
    """``-dV/dx``: ``-m omega^2 x`` for the oscillators, zero for the free packet."""
    return scn.classical_force(x)


def guidance_velocity(scn: Scenario, x, t):
    """Guidance-law velocity ``(1/m) dS/dx``."""
    return _as_float(np.asarray(scn.phase_gradient(x, t)) / scn.params.mass)


def density_quantile(scn: Scenario, q: float, t: float = 0.0) -> float:
    """Position ``x`` with ``int_{-inf}^x R^2 = q`` at time ``t``.

    Gaussian densities use the inverse error function directly; excited
    oscillator states are inverted by bracketing root search on the
    quadrature CDF.
    """
    q = float(q)
    if not (0.0 < q < 1.0):
        raise DomainError(f"quantile level must lie in (0, 1), got {q!r}")
    return scn.quantile(q, t)
