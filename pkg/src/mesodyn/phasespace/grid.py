"""Spatial grids, sampled states and density matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, DomainError
from ..scenarios import FreeGaussian, HOStationary, PhysParams, Scenario


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform grid ``x_j = x_min + j dx``, ``j = 0 .. n_points - 1``.

    ``x_max`` is the right edge of the periodic cell and is not itself a
    sample, which keeps ``dx = (x_max - x_min) / n_points`` consistent with
    the FFT conventions used for kinetic propagation.
    """

    x_min: float
    x_max: float
    n_points: int = 256

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ConfigurationError(f"x_max must exceed x_min, got [{self.x_min}, {self.x_max}]")
        if int(self.n_points) != self.n_points or self.n_points < 16:
            raise ConfigurationError(f"n_points must be an integer >= 16, got {self.n_points!r}")

    @classmethod
    def centered(cls, half_width, n_points=256):
        return cls(-half_width, half_width, n_points)

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.n_points

    @property
    def x(self):
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def wavenumbers(self):
        """Angular wavenumbers in FFT order."""
        return 2.0 * math.pi * np.fft.fftfreq(self.n_points, self.dx)

    def index_of(self, x):
        """Nearest grid index to ``x``."""
        j = int(round((x - self.x_min) / self.dx))
        if not 0 <= j < self.n_points:
            raise DomainError(f"x={x!r} lies outside the grid")
        return j


@dataclass(frozen=True)
class OscillatorPair:
    """``n = 1`` oscillator states centred at ``x1`` and ``x2`` (superposed)."""

    x1: float
    x2: float
    params: PhysParams = field(default_factory=PhysParams)

    def centers(self, t=0.0):
        return (self.x1, self.x2)

    def width(self, t=0.0):
        return HOStationary(1, self.params).width()

    def sample(self, x, t=0.0):
        # Each component is the n = 1 eigenfunction of an oscillator centred
        # on its own x_k; the pair shares the E_1 time phase.
        one = HOStationary(1, self.params)
        psi = one.amplitude(x - self.x1) + one.amplitude(x - self.x2)
        return psi * np.exp(-1j * one.energy * t / self.params.hbar)


@dataclass(frozen=True)
class GaussianPair:
    """Two free dispersive Gaussians starting at ``x1`` and ``x2``."""

    x1: float
    x2: float
    params: PhysParams = field(default_factory=PhysParams)

    def centers(self, t=0.0):
        u = self.params.drift_u
        return (self.x1 + u * t, self.x2 + u * t)

    def width(self, t=0.0):
        return float(FreeGaussian(self.params).sigma(t))

    def sample(self, x, t=0.0):
        packet = FreeGaussian(self.params)
        return (packet.wavefunction(x - self.x1, t) + packet.wavefunction(x - self.x2, t)) / math.sqrt(2.0)


def _extent(state, t):
    if isinstance(state, Scenario):
        return (float(state.center(t)),), float(state.width(t))
    return state.centers(t), state.width(t)


def default_grid(state, t=0.0, n_points=256, widths=12.0):
    """Centered grid covering ``widths`` packet widths around every centre."""
    centers, width = _extent(state, t)
    half = max(abs(c) for c in centers) + widths * width
    return SpatialGrid.centered(half, n_points)


def discretize_state(state, grid: SpatialGrid, t: float = 0.0, *, min_widths: float = 4.0):
    """Sample a scenario or two-centre superposition on ``grid`` and normalise.

    The grid must reach ``min_widths`` packet widths beyond every centre.
    """
    centers, width = _extent(state, t)
    lo = min(centers) - min_widths * width
    hi = max(centers) + min_widths * width
    if lo < grid.x_min or hi > grid.x[-1]:
        raise DomainError(
            f"grid [{grid.x_min}, {grid.x[-1]}] does not cover [{lo:.6g}, {hi:.6g}] "
            f"({min_widths} widths around the centres)"
        )
    x = grid.x
    psi = state.wavefunction(x, t) if isinstance(state, Scenario) else state.sample(x, t)
    psi = np.asarray(psi, dtype=complex)
    norm = math.sqrt(float(np.sum(np.abs(psi) ** 2)) * grid.dx)
    return psi / norm


@dataclass
class DensityMatrixGrid:
    """``values[i, j] ~ rho(x_i, x_j)`` on a square grid at time ``t``."""

    grid: SpatialGrid
    values: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        n = self.grid.n_points
        if self.values.shape != (n, n):
            raise ConfigurationError(f"density matrix shape {self.values.shape} does not match grid ({n}, {n})")

    def trace(self):
        return float(np.real(np.trace(self.values)) * self.grid.dx)

    def hermiticity_error(self):
        return float(np.abs(self.values - self.values.conj().T).max())

    def diagonal(self):
        return np.real(np.diag(self.values)).copy()

    def at(self, x_a, x_b):
        return complex(self.values[self.grid.index_of(x_a), self.grid.index_of(x_b)])


def density_from_pure(psi, grid: SpatialGrid, t: float = 0.0) -> DensityMatrixGrid:
    """``rho[i, j] = psi[i] conj(psi[j])``."""
    psi = np.asarray(psi, dtype=complex)
    return DensityMatrixGrid(grid, np.outer(psi, psi.conj()), t)


def purity(rho: DensityMatrixGrid) -> float:
    """``Tr(rho^2)`` with grid quadrature."""
    dx = rho.grid.dx
    return float(np.real(np.sum(rho.values * rho.values.T)) * dx * dx)


def grid_potential(grid: SpatialGrid, potential, mass=1.0):
    """``V`` on the grid; ``potential`` is ``"free"`` or ``("harmonic", omega)``."""
    x = grid.x
    kind, omega = _potential_parts(potential)
    if kind == "free":
        return np.zeros_like(x)
    return 0.5 * mass * omega**2 * x * x


def _potential_parts(potential):
    if isinstance(potential, str):
        if potential.lower() == "free":
            return "free", None
        raise ConfigurationError(f"unknown potential {potential!r}")
    kind, omega = potential
    if kind.lower() != "harmonic" or not omega > 0:
        raise ConfigurationError(f"unknown potential {potential!r}")
    return "harmonic", float(omega)


def mean_energy(psi, grid: SpatialGrid, mass=1.0, potential="free", hbar=1.0) -> float:
    """Spectral kinetic energy plus grid potential energy of a normalised ``psi``."""
    psi = np.asarray(psi, dtype=complex)
    phi = np.fft.fft(psi)
    weights = np.abs(phi) ** 2
    k = grid.wavenumbers
    kinetic = float(np.sum(weights * (hbar * k) ** 2 / (2.0 * mass)) / np.sum(weights))
    v = grid_potential(grid, potential, mass)
    pot = float(np.sum(np.abs(psi) ** 2 * v) * grid.dx)
    return kinetic + pot


def density_energy(rho: DensityMatrixGrid, mass=1.0, potential="free", hbar=1.0) -> float:
    """``Tr(H rho)`` with the spectral kinetic operator."""
    grid = rho.grid
    k = grid.wavenumbers
    # (T rho)_{ii} via FFT along the first index
    t_rho = np.fft.ifft((hbar * k)[:, None] ** 2 / (2.0 * mass) * np.fft.fft(rho.values, axis=0), axis=0)
    kinetic = float(np.real(np.trace(t_rho)) * grid.dx)
    v = grid_potential(grid, potential, mass)
    return kinetic + float(np.sum(v * np.real(np.diag(rho.values))) * grid.dx)
