"""Caldeira-Leggett type master equation on a position grid.

    d rho/dt = -(i/hbar)[H, rho] - gamma (x - x')(d_x - d_x') rho
               - (D/hbar^2)(x - x')^2 rho

The last term is the ``-rho/tau_D`` fluctuation term written with its
explicit ``(x - x')^2`` dependence.  One step is a Strang splitting:

1. unitary half step (split-step Fourier kinetic, pointwise potential),
2. friction advection by first-order upwind differences,
3. exact pointwise decoherence factor ``exp(-D (x_i - x_j)^2 dt / hbar^2)``,
4. unitary half step.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, FitError
from .grid import DensityMatrixGrid, _potential_parts, grid_potential

logger = logging.getLogger(__name__)

MODES = ("full", "decoherence_only", "unitary_only")


@dataclass(frozen=True)
class MasterEqParams:
    gamma: float = 0.0
    D: float = 0.0
    mode: str = "full"
    dt: float = 1e-3
    potential: object = "free"
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.gamma >= 0 or not self.D >= 0:
            raise ConfigurationError("gamma and D must be non-negative")
        if not self.dt > 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt!r}")
        if not (self.mass > 0 and self.hbar > 0):
            raise ConfigurationError("mass and hbar must be positive")
        _potential_parts(self.potential)

    @property
    def unitary(self):
        return self.mode in ("full", "unitary_only")

    @property
    def friction(self):
        return self.mode == "full" and self.gamma > 0

    @property
    def decoherence(self):
        return self.mode in ("full", "decoherence_only") and self.D > 0


def _apply_left(op_diag_k, m):
    """Apply a diagonal-in-k operator to every column of ``m``."""
    return np.fft.ifft(op_diag_k[:, None] * np.fft.fft(m, axis=0), axis=0)


class _Stepper:
    def __init__(self, grid, params: MasterEqParams):
        self.grid = grid
        self.params = params
        h = 0.5 * params.dt  # unitary pieces act for half a step each
        x = grid.x
        k = grid.wavenumbers
        v = grid_potential(grid, params.potential, params.mass)
        self.kinetic = np.exp(-1j * params.hbar * k * k / (2.0 * params.mass) * h)
        pot = np.exp(-1j * v * (0.5 * h) / params.hbar)
        self.pot_pair = pot[:, None] * pot.conj()[None, :]
        sep = x[:, None] - x[None, :]
        self.velocity = params.gamma * sep  # advection speed along x; -that along x'
        self.decay = np.exp(-params.D * sep * sep * params.dt / params.hbar**2)
        self.courant = params.gamma * float(np.abs(sep).max()) * params.dt / grid.dx

    def unitary_half(self, rho):
        rho = rho * self.pot_pair
        left = _apply_left(self.kinetic, rho)
        rho = _apply_left(self.kinetic, left.conj().T).conj().T
        return rho * self.pot_pair

    def _sweep(self, rho, axis):
        # upwind d/dx along ``axis`` with speed +v (axis 0) or -v (axis 1)
        c = self.velocity if axis == 0 else -self.velocity
        zero = np.zeros_like(rho[:1]) if axis == 0 else np.zeros_like(rho[:, :1])
        back = rho - np.concatenate([zero, rho[:-1]] if axis == 0 else [zero, rho[:, :-1]], axis=axis)
        fwd = np.concatenate([rho[1:], zero] if axis == 0 else [rho[:, 1:], zero], axis=axis) - rho
        grad = np.where(c > 0, back, fwd) / self.grid.dx
        return rho - self.params.dt * c * grad

    def friction(self, rho):
        # averaging both sweep orders keeps the update exactly Hermitian
        a = self._sweep(self._sweep(rho, 0), 1)
        b = self._sweep(self._sweep(rho, 1), 0)
        return 0.5 * (a + b)

    def step(self, rho):
        p = self.params
        if p.unitary:
            rho = self.unitary_half(rho)
        if p.friction:
            rho = self.friction(rho)
        if p.decoherence:
            rho = rho * self.decay
        if p.unitary:
            rho = self.unitary_half(rho)
        return rho


def _check_resolution(grid, params, courant):
    if params.friction and courant > 1.0:
        raise ConfigurationError(
            f"friction CFL violated: gamma*max|x-x'|*dt/dx = {courant:.4g} > 1; reduce dt or gamma"
        )
    scales = []
    if params.unitary:
        k_max = math.pi / grid.dx
        v = grid_potential(grid, params.potential, params.mass)
        e_max = (params.hbar * k_max) ** 2 / (2.0 * params.mass) + float(np.abs(v).max())
        scales.append(params.hbar / e_max)
    if params.decoherence and params.unitary:
        # the decay factor is exact on its own; only its splitting error matters
        span = grid.x[-1] - grid.x[0]
        scales.append(params.hbar**2 / (params.D * span * span))
    if params.friction:
        scales.append(1.0 / params.gamma)
    if scales and params.dt >= 0.1 * min(scales):
        # split-step and the exact decay factor stay stable; this is accuracy only
        logger.warning("dt=%g does not resolve the fastest scale %g", params.dt, min(scales))


def evolve_master(rho0: DensityMatrixGrid, params: MasterEqParams, steps: int, snapshot_every: int | None = None):
    """Evolve ``rho0`` for ``steps`` steps; returns snapshots including both ends.

    ``snapshot_every`` defaults to ``max(1, steps // 20)``.
    """
    if steps < 0:
        raise ConfigurationError("steps must be non-negative")
    every = snapshot_every if snapshot_every is not None else max(1, steps // 20)
    if every < 1:
        raise ConfigurationError("snapshot_every must be >= 1")
    stepper = _Stepper(rho0.grid, params)
    _check_resolution(rho0.grid, params, stepper.courant)
    rho = np.array(rho0.values, dtype=complex)
    snapshots = [DensityMatrixGrid(rho0.grid, rho.copy(), rho0.t)]
    for k in range(1, steps + 1):
        rho = stepper.step(rho)
        if k % every == 0 or k == steps:
            snapshots.append(DensityMatrixGrid(rho0.grid, rho.copy(), rho0.t + k * params.dt))
    return snapshots


def coherence_decay_rate(snapshots, x_a: float, x_b: float) -> float:
    """Least-squares decay rate of ``|rho(x_a, x_b, t)|`` (positive for decay)."""
    if len(snapshots) < 5:
        raise FitError(f"need at least 5 snapshots, got {len(snapshots)}")
    grid = snapshots[0].grid
    i, j = grid.index_of(x_a), grid.index_of(x_b)
    mags = np.array([abs(s.values[i, j]) for s in snapshots])
    times = np.array([s.t for s in snapshots])
    if mags[0] <= 1e-6:
        raise FitError(f"initial coherence |rho(x_a, x_b)| = {mags[0]:.3g} is below 1e-6")
    if np.any(mags <= 1e-14 * mags[0]):
        raise FitError("coherence fell below the noise floor during the run")
    slope, _ = np.polyfit(times, np.log(mags), 1)
    return float(-slope)


def predicted_decay_rate(D: float, x_a: float, x_b: float, hbar: float = 1.0) -> float:
    """``1/tau_D = D (x_a - x_b)^2 / hbar^2``."""
    return D * (x_a - x_b) ** 2 / hbar**2
