"""Trajectory ensembles for ``m x'' = -d/dx [V + (1 - lambda(t)) Q]``.

``Q`` is always the scenario's closed-form lambda = 0 quantum potential
(frozen-Q approximation), so the force interpolates between the
de Broglie-Bohm force at lambda = 0 and the classical one at lambda = 1.

Integration is fixed-step classic RK4 applied to a whole ensemble at once.
Members never interact, so a vectorised step is the same computation as one
integration per member.  For ``t < 0`` the coupling is clamped to
``lambda(0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .coupling import CouplingLaw, lambda_at
from .errors import ConfigurationError, IntegrationError, UsageError
from .scenarios import Scenario, density_quantile, guidance_velocity


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integrator settings; ``dt=None`` picks the scenario default."""

    t0: float = 0.0
    t1: float = 1.0
    dt: float | None = None
    output_stride: int = 1
    method: str = "RK4"

    def __post_init__(self):
        if self.dt is not None and not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigurationError(f"dt must be positive, got {self.dt!r}")
        if not self.t1 > self.t0:
            raise ConfigurationError(f"t1 must exceed t0 (t0={self.t0!r}, t1={self.t1!r})")
        if int(self.output_stride) != self.output_stride or self.output_stride < 1:
            raise ConfigurationError(f"output_stride must be a positive integer, got {self.output_stride!r}")
        if self.method != "RK4":
            raise ConfigurationError(f"unsupported method {self.method!r}; only RK4")

    def step_plan(self, scn: Scenario):
        """Number of steps and the step size that lands exactly on ``t1``."""
        dt = self.dt if self.dt is not None else scn.default_dt()
        span = self.t1 - self.t0
        n_steps = max(1, math.ceil(span / dt - 1e-9))
        return n_steps, span / n_steps


@dataclass
class TrajectoryRecord:
    """Sampled time series of one ensemble member."""

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    lambdas: np.ndarray
    energies: np.ndarray

    def __post_init__(self):
        n = len(self.times)
        for name in ("positions", "velocities", "lambdas", "energies"):
            if len(getattr(self, name)) != n:
                raise UsageError(f"{name} has length {len(getattr(self, name))}, expected {n}")
        if n > 1 and np.any(np.diff(self.times) <= 0):
            raise UsageError("times must be strictly increasing")

    def __len__(self):
        return len(self.times)


@dataclass(frozen=True)
class EnsembleSpec:
    """Ensemble definition.

    ``sampling`` is ``"quantile"`` (members at ``q_i = (i + 0.5)/n``) or a
    sequence of explicit initial positions.
    """

    n_members: int
    coupling: CouplingLaw
    integrator: IntegratorConfig
    sampling: str | Sequence[float] = "quantile"

    def __post_init__(self):
        if int(self.n_members) != self.n_members or self.n_members < 1:
            raise ConfigurationError(f"n_members must be a positive integer, got {self.n_members!r}")
        if isinstance(self.sampling, str):
            if self.sampling != "quantile":
                raise ConfigurationError(f"unknown sampling mode {self.sampling!r}")
        elif len(self.sampling) != self.n_members:
            raise ConfigurationError(
                f"{len(self.sampling)} explicit positions given for {self.n_members} members"
            )

    def initial_positions(self, scn: Scenario) -> np.ndarray:
        if isinstance(self.sampling, str):
            t0 = self.integrator.t0
            return np.array(
                [density_quantile(scn, (i + 0.5) / self.n_members, t0) for i in range(self.n_members)]
            )
        return np.asarray(self.sampling, dtype=float)


def coupling_strength(law: CouplingLaw, t):
    """``lambda(t)`` with the clock clamped at 0 for negative times."""
    if np.ndim(t) == 0:
        # scalar fast path: called three times per RK4 step
        return float(law.value(max(float(t), 0.0)))
    return lambda_at(law, np.maximum(np.asarray(t, dtype=float), 0.0))


def total_force(scn: Scenario, law: CouplingLaw, x, t):
    """``F_cl(x) + (1 - lambda(t)) F_Q(x, t)`` with frozen (lambda = 0) ``Q``."""
    lam = coupling_strength(law, t)
    return scn.classical_force(x) + (1.0 - lam) * scn.quantum_force(x, t)


def bohm_energy(scn: Scenario, law: CouplingLaw, x, v, t):
    """``m v^2/2 + V(x) + (1 - lambda(t)) Q(x, t)``."""
    lam = coupling_strength(law, t)
    v = np.asarray(v, dtype=float)
    e = 0.5 * scn.params.mass * v * v + scn.potential(x) + (1.0 - lam) * scn.quantum_potential(x, t)
    return e if np.ndim(e) else float(e)


# Below this many members the per-member float loop beats numpy's per-call
# overhead on tiny arrays.
_SCALAR_LOOP_MAX = 32


def _stage_couplings(law, t0, h, n_steps):
    """``1 - lambda`` at every RK4 stage time ``t0 + k h/2``."""
    nodes = t0 + 0.5 * h * np.arange(2 * n_steps + 1)
    return (1.0 - np.asarray(coupling_strength(law, nodes), dtype=float) * np.ones_like(nodes)).tolist()


def _rk4_second_order(accel, x, v, times, c, stride, xs_out, vs_out):
    """Advance one state (float or ndarray) through ``times``.

    Samples every ``stride`` steps into ``xs_out``/``vs_out``.  Returns the
    last good time if the state turns non-finite, else ``None``.
    """
    scalar = isinstance(x, float)
    n_steps = len(times) - 1
    h = times[1] - times[0] if n_steps else 0.0
    half, sixth = 0.5 * h, h / 6.0
    xs_out[0] = x
    vs_out[0] = v
    for j in range(1, n_steps // stride + 1):
        for k in range((j - 1) * stride, j * stride):
            t = times[k]
            tm = t + half
            cm = c[2 * k + 1]
            a1 = accel(x, t, c[2 * k])
            x2 = x + half * v
            v2 = v + half * a1
            a2 = accel(x2, tm, cm)
            x3 = x + half * v2
            v3 = v + half * a2
            a3 = accel(x3, tm, cm)
            x4 = x + h * v3
            v4 = v + h * a3
            a4 = accel(x4, times[k + 1], c[2 * k + 2])
            x = x + sixth * (v + 2.0 * v2 + 2.0 * v3 + v4)
            v = v + sixth * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
            # x - x is 0 only for finite x
            if scalar:
                if x - x != 0.0 or v - v != 0.0:
                    return t
            elif not (np.isfinite(x).all() and np.isfinite(v).all()):
                return t
        xs_out[j] = x
        vs_out[j] = v
    # trailing steps past the last sample still have to be checked
    for k in range((n_steps // stride) * stride, n_steps):
        t = times[k]
        a1 = accel(x, t, c[2 * k])
        x2, v2 = x + half * v, v + half * a1
        a2 = accel(x2, t + half, c[2 * k + 1])
        x3, v3 = x + half * v2, v + half * a2
        a3 = accel(x3, t + half, c[2 * k + 1])
        x4, v4 = x + h * v3, v + h * a3
        a4 = accel(x4, times[k + 1], c[2 * k + 2])
        x = x + sixth * (v + 2.0 * v2 + 2.0 * v3 + v4)
        v = v + sixth * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        if not (np.isfinite(x).all() and np.isfinite(v).all()):
            return t
    return None


def _rk4_first_order(velocity, x, times, stride, xs_out):
    n_steps = len(times) - 1
    h = times[1] - times[0] if n_steps else 0.0
    half = 0.5 * h
    for k in range(n_steps + 1):
        if k % stride == 0:
            xs_out[k // stride] = x
        if k == n_steps:
            break
        t = times[k]
        k1 = velocity(x, t)
        k2 = velocity(x + half * k1, t + half)
        k3 = velocity(x + half * k2, t + half)
        k4 = velocity(x + h * k3, times[k + 1])
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(x).all():
            return t
    return None


def _time_grid(scn, cfg):
    n_steps, h = cfg.step_plan(scn)
    times = (cfg.t0 + h * np.arange(n_steps + 1)).tolist()
    return times, n_steps, h


def _integrate_second_order(scn, law, x0, v0, cfg: IntegratorConfig, members):
    times, n_steps, h = _time_grid(scn, cfg)
    stride = int(cfg.output_stride)
    n_out = n_steps // stride + 1
    c = _stage_couplings(law, cfg.t0, h, n_steps)
    accel = scn.accel_kernel()
    x0 = np.asarray(x0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    xs = np.empty((n_out, x0.size))
    vs = np.empty((n_out, x0.size))

    if x0.size <= _SCALAR_LOOP_MAX:
        for i in range(x0.size):
            col_x, col_v = [0.0] * n_out, [0.0] * n_out
            failed = _rk4_second_order(accel, float(x0[i]), float(v0[i]), times, c, stride, col_x, col_v)
            if failed is not None:
                raise IntegrationError("non-finite state", last_time=failed, member=members[i])
            xs[:, i] = col_x
            vs[:, i] = col_v
    else:
        with np.errstate(over="ignore", invalid="ignore"):
            failed = _rk4_second_order(accel, x0.copy(), v0.copy(), times, c, stride, xs, vs)
        if failed is not None:
            last, i = _earliest_failure(accel, x0, v0, times, c)
            raise IntegrationError("non-finite state", last_time=last, member=members[i])
    return np.asarray(times[::stride][:n_out]), xs, vs


def _earliest_failure(accel, x0, v0, times, c):
    # rerun members one at a time to name the one that blew up first
    n_steps = len(times) - 1
    failures = []
    for i in range(x0.size):
        sink_x, sink_v = [0.0] * (n_steps + 1), [0.0] * (n_steps + 1)
        t = _rk4_second_order(accel, float(x0[i]), float(v0[i]), times, c, 1, sink_x, sink_v)
        if t is not None:
            failures.append((t, i))
    return min(failures)


def _integrate_first_order(scn, x0, cfg: IntegratorConfig, members):
    times, n_steps, h = _time_grid(scn, cfg)
    stride = int(cfg.output_stride)
    n_out = n_steps // stride + 1
    velocity = scn.velocity_kernel()
    x0 = np.asarray(x0, dtype=float)
    xs = np.empty((n_out, x0.size))
    for i in range(x0.size):
        col = [0.0] * n_out
        failed = _rk4_first_order(velocity, float(x0[i]), times, stride, col)
        if failed is not None:
            raise IntegrationError("non-finite state", last_time=failed, member=members[i])
        xs[:, i] = col
    return np.asarray(times[::stride][:n_out]), xs


def _records(scn, law, ts, xs, vs):
    lams = np.asarray(coupling_strength(law, ts), dtype=float) * np.ones_like(ts)
    out = []
    for i in range(xs.shape[1]):
        x, v = xs[:, i].copy(), vs[:, i].copy()
        energies = np.asarray(bohm_energy(scn, law, x, v, ts), dtype=float)
        out.append(TrajectoryRecord(ts.copy(), x, v, lams.copy(), energies))
    return out


def integrate_trajectory(scn: Scenario, law: CouplingLaw, x0: float, v0: float, cfg: IntegratorConfig) -> TrajectoryRecord:
    """RK4 on ``x' = v, v' = total_force/m`` for one particle."""
    ts, xs, vs = _integrate_second_order(scn, law, [x0], [v0], cfg, members=[None])
    return _records(scn, law, ts, xs, vs)[0]


def integrate_guidance(scn: Scenario, x0: float, cfg: IntegratorConfig) -> TrajectoryRecord:
    """RK4 on the first-order guidance law ``x' = (1/m) dS/dx``.

    Independent reference for the lambda = 0 limit of
    :func:`integrate_trajectory`; energies are evaluated at lambda = 0.
    """
    from .coupling import PureQuantum

    ts, xs = _integrate_first_order(scn, [x0], cfg, members=[None])
    vs = np.asarray(guidance_velocity(scn, xs, ts[:, None]), dtype=float).reshape(xs.shape)
    return _records(scn, PureQuantum(), ts, xs, vs)[0]


def run_ensemble(scn: Scenario, spec: EnsembleSpec) -> list[TrajectoryRecord]:
    """Integrate every member; initial velocities follow the guidance law at ``t0``."""
    x0 = spec.initial_positions(scn)
    v0 = np.asarray(guidance_velocity(scn, x0, spec.integrator.t0), dtype=float) * np.ones_like(x0)
    ts, xs, vs = _integrate_second_order(
        scn, spec.coupling, x0, v0, spec.integrator, members=list(range(spec.n_members))
    )
    return _records(scn, spec.coupling, ts, xs, vs)


def _stack(records: Sequence[TrajectoryRecord]):
    if not records:
        raise UsageError("no records given")
    times = records[0].times
    for r in records[1:]:
        if len(r.times) != len(times) or not np.array_equal(r.times, times):
            raise UsageError("records do not share a common time grid")
    return times, np.stack([r.positions for r in records]), np.stack([r.velocities for r in records])


@dataclass(frozen=True)
class Crossing:
    i: int
    j: int
    t_before: float
    t_after: float


def detect_crossings(records: Sequence[TrajectoryRecord]) -> list[Crossing]:
    """Every member pair whose ordering flips between samples.

    Exact ties are skipped over, so a pair that touches and separates on the
    same side is not reported.
    """
    times, xs, _ = _stack(records)
    found = []
    for i in range(len(records)):
        for j in range(i + 1, len(records)):
            sign = np.sign(xs[i] - xs[j])
            idx = np.flatnonzero(sign)
            if idx.size < 2:
                continue
            s = sign[idx]
            flips = np.flatnonzero(s[1:] != s[:-1])
            for f in flips:
                found.append(Crossing(i, j, float(times[idx[f]]), float(times[idx[f + 1]])))
    found.sort(key=lambda c: (c.t_before, c.i, c.j))
    return found


@dataclass
class SpreadingMetrics:
    """Ensemble spread per sample and the max ``|dv/dt|`` per sampling interval."""

    times: np.ndarray
    spread: np.ndarray
    accel_times: np.ndarray
    accel_proxy: np.ndarray = field(repr=False)


def spreading_metrics(records: Sequence[TrajectoryRecord]) -> SpreadingMetrics:
    times, xs, vs = _stack(records)
    ddof = 1 if xs.shape[0] > 1 else 0
    spread = xs.std(axis=0, ddof=ddof)
    if len(times) < 2:
        return SpreadingMetrics(times, spread, np.empty(0), np.empty(0))
    dt = np.diff(times)
    accel = np.abs(np.diff(vs, axis=1) / dt).max(axis=0)
    return SpreadingMetrics(times, spread, 0.5 * (times[1:] + times[:-1]), accel)
