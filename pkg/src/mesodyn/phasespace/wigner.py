"""Wigner transform of grid density matrices and phase-space functionals.

    W(x, p) = 1/(2 pi hbar) int exp(i p y / hbar) rho(x - y/2, x + y/2) dy

The integrand is sampled at ``y_k = k dx``; odd ``k`` land on half-grid
points and need interpolation along the diagonal direction.  Two schemes:

``"spectral"`` (default)
    band-limited half-cell shift of ``rho`` by FFT; exact for states
    resolved by the grid.
``"linear"``
    average of the two diagonal neighbours; ``O(dx^2)`` error.

The momentum axis is conjugate to ``y``: ``p_l = l * 2 pi hbar / (n dx)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, DegenerateInputError
from .grid import DensityMatrixGrid, SpatialGrid

INTERPOLATIONS = ("spectral", "linear")
DERIVATIVES = ("spectral", "central")


@dataclass
class WignerGrid:
    grid: SpatialGrid
    p: np.ndarray
    values: np.ndarray
    hbar: float = 1.0
    # d^2 W / dp^2 computed with the transform (exact for the sampled integrand)
    d2p: np.ndarray | None = None

    @property
    def x(self):
        return self.grid.x

    @property
    def dp(self):
        return float(self.p[1] - self.p[0])

    def normalization(self):
        return float(self.values.sum() * self.grid.dx * self.dp)

    def value_at(self, x, p):
        i = self.grid.index_of(x)
        l = int(round((p - self.p[0]) / self.dp))
        return float(self.values[i, l])

    def position_marginal(self):
        return self.values.sum(axis=1) * self.dp

    def momentum_marginal(self):
        return self.values.sum(axis=0) * self.grid.dx


def momentum_axis(grid: SpatialGrid, hbar=1.0):
    n = grid.n_points
    return (np.arange(n) - n // 2) * (2.0 * math.pi * hbar / (n * grid.dx))


def _half_shift(values, dx):
    """``rho(x_i + dx/2, x_j + dx/2)`` by band-limited interpolation."""
    n = values.shape[0]
    k = 2.0 * math.pi * np.fft.fftfreq(n, dx)
    shift = np.exp(1j * k * dx / 2.0)
    if n % 2 == 0:
        # the Nyquist mode has no unambiguous half shift; dropping it keeps
        # the shifted matrix Hermitian
        shift[n // 2] = 0.0
    out = np.fft.ifft(shift[:, None] * np.fft.fft(values, axis=0), axis=0)
    return np.fft.ifft(shift[None, :] * np.fft.fft(out, axis=1), axis=1)


def _take(values, a, b):
    n = values.shape[0]
    ok = (a >= 0) & (a < n) & (b >= 0) & (b < n)
    out = np.zeros(a.shape, dtype=complex)
    out[ok] = values[a[ok], b[ok]]
    return out


def antidiagonal_samples(rho: DensityMatrixGrid, interpolation="spectral"):
    """``A[i, k] = rho(x_i - y_k/2, x_i + y_k/2)`` for ``y_k = (k - n/2) dx``.

    The unpaired column ``k = 0`` (``y = -n dx/2``) is left zero so that the
    transform of a Hermitian ``rho`` is exactly real.
    """
    if interpolation not in INTERPOLATIONS:
        raise ConfigurationError(f"interpolation must be one of {INTERPOLATIONS}")
    values = rho.values
    n = values.shape[0]
    half = n // 2
    i = np.arange(n)
    shifted = _half_shift(values, rho.grid.dx) if interpolation == "spectral" else None
    samples = np.zeros((n, n), dtype=complex)
    for col, k in enumerate(range(-half, n - half)):
        if col == 0 and n % 2 == 0:
            continue
        if k % 2 == 0:
            m = k // 2
            samples[:, col] = _take(values, i - m, i + m)
        else:
            m = (k - 1) // 2
            if shifted is not None:
                samples[:, col] = _take(shifted, i - m - 1, i + m)
            else:
                samples[:, col] = 0.5 * (_take(values, i - m - 1, i + m) + _take(values, i - m, i + m + 1))
    return samples


def wigner_transform(rho: DensityMatrixGrid, hbar=1.0, interpolation="spectral", imag_tol=1e-8) -> WignerGrid:
    """Wigner function of a Hermitian grid density matrix."""
    grid = rho.grid
    n = grid.n_points
    samples = antidiagonal_samples(rho, interpolation)
    y = (np.arange(n) - n // 2) * grid.dx
    p = momentum_axis(grid, hbar)
    kernel = np.exp(1j * np.outer(y, p) / hbar) * (grid.dx / (2.0 * math.pi * hbar))
    w = samples @ kernel
    residue = float(np.abs(w.imag).max())
    scale = max(1.0, float(np.abs(w.real).max()))
    if residue > imag_tol * scale:
        raise ConfigurationError(f"Wigner transform has imaginary residue {residue:.3g}; is rho Hermitian?")
    d2p = (samples * (-(y / hbar) ** 2)[None, :]) @ kernel
    return WignerGrid(grid, p, w.real.copy(), hbar, d2p.real.copy())


def _second_difference(values, step, axis):
    forward = np.roll(values, -1, axis=axis)
    backward = np.roll(values, 1, axis=axis)
    out = (forward + backward - 2.0 * values) / (step * step)
    edge = [slice(None)] * values.ndim
    for j in (0, -1):
        edge[axis] = j
        out[tuple(edge)] = np.nan
    return out


def _spectral_second_x(values, dx):
    k = 2.0 * math.pi * np.fft.fftfreq(values.shape[0], dx)
    return np.fft.ifft(-(k * k)[:, None] * np.fft.fft(values, axis=0), axis=0).real


@dataclass
class EnergyField:
    field: np.ndarray  # NaN where masked
    mask: np.ndarray
    mean: float
    std: float

    @property
    def relative_std(self):
        return self.std / abs(self.mean)


def wigner_energy_field(W: WignerGrid, m=1.0, omega=1.0, hbar=None, derivative="spectral", mask_level=1e-3) -> EnergyField:
    """Oscillator energy functional evaluated pointwise on ``W``.

        E = p^2/2m + m w^2 x^2/2 - hbar^2/(8 m W) W_xx - m w^2 hbar^2/(8 W) W_pp

    Entries with ``|W| < mask_level * max|W|`` are masked; the mean is
    weighted by ``|W|`` over the unmasked entries.
    """
    if derivative not in DERIVATIVES:
        raise ConfigurationError(f"derivative must be one of {DERIVATIVES}")
    hbar = W.hbar if hbar is None else hbar
    values = W.values
    if derivative == "spectral":
        d2x = _spectral_second_x(values, W.grid.dx)
        d2p = W.d2p if W.d2p is not None else _second_difference(values, W.dp, axis=1)
    else:
        d2x = _second_difference(values, W.grid.dx, axis=0)
        d2p = _second_difference(values, W.dp, axis=1)
    x = W.x[:, None]
    p = W.p[None, :]
    mask = np.abs(values) >= mask_level * np.abs(values).max()
    mask &= np.isfinite(d2x) & np.isfinite(d2p)
    if not mask.any():
        raise DegenerateInputError("every entry of the energy field is masked")
    safe = np.where(mask, values, 1.0)
    energy = (
        p * p / (2.0 * m)
        + 0.5 * m * omega**2 * x * x
        - hbar**2 / (8.0 * m) * d2x / safe
        - m * omega**2 * hbar**2 / 8.0 * d2p / safe
    )
    energy = np.where(mask, energy, np.nan)
    weights = np.abs(values[mask])
    kept = energy[mask]
    mean = float(np.sum(weights * kept) / np.sum(weights))
    return EnergyField(energy, mask, mean, float(kept.std()))


def momentum_moments(W: WignerGrid):
    """``(<p>, <p^2>)`` from the phase-space sums."""
    dxdp = W.grid.dx * W.dp
    p = W.p[None, :]
    return float(np.sum(p * W.values) * dxdp), float(np.sum(p * p * W.values) * dxdp)


def momentum_variance(W: WignerGrid) -> float:
    """``<p^2> - <p>^2``."""
    mean, second = momentum_moments(W)
    return second - mean * mean
