"""Acceptance criteria, one test each.

Every test records a single ``[ACn] PASS|FAIL`` line with the measured value
and the pinned tolerance; the lines are collected into an "acceptance
criteria" section at the end of the pytest run.  Run on their own with
``pytest -m acceptance`` or ``python3 tests/test_acceptance.py``.
"""

import math
import os
import sys
import time

import numpy as np
import pytest

from mesodyn import (
    BathParams,
    ExponentialRelaxation,
    FreeGaussian,
    HOCoherent,
    HOStationary,
    PhysParams,
    PureClassical,
    PureQuantum,
    decoherence_time,
)
from mesodyn.cli.main import main as cli_main
from mesodyn.cli.presets import PRESETS
from mesodyn.phasespace import (
    GaussianPair,
    MasterEqParams,
    SpatialGrid,
    coherence_decay_rate,
    default_grid,
    density_from_pure,
    discretize_state,
    evolve_master,
    mean_energy,
    momentum_variance,
    predicted_decay_rate,
    wigner_energy_field,
    wigner_transform,
)
from mesodyn.trajectories import (
    EnsembleSpec,
    IntegratorConfig,
    detect_crossings,
    integrate_guidance,
    integrate_trajectory,
    run_ensemble,
    spreading_metrics,
)

pytestmark = pytest.mark.acceptance

PERIOD = 2 * math.pi

# pinned tolerances
AC1_REST, AC1_SECONDS = 1e-9, 1.0
AC2_DEV, AC2_DRIFT = 1e-6, 1e-8
AC3_POINTWISE = 1e-5
AC4_SCALING, AC4_ACCEL, AC4_SPREAD = 1e-5, 1e-4, 0.005
AC6_FREE, AC6_MEAN, AC6_STD, AC6_SECONDS = 1e-6, 1e-3, 0.01, 30.0
AC7_RATE, AC7_TRACE, AC7_P2 = 0.02, 1e-8, 0.03
AC8_LO, AC8_HI = 1e-25, 1e-22
AC9_LO, AC9_HI = 12.0, 20.0


def test_ac1_stationary_rest(acceptance):
    cfg = IntegratorConfig(t1=10 * PERIOD)
    worst, slowest = 0.0, 0.0
    for n in (0, 1, 2):
        start = time.perf_counter()
        records = run_ensemble(HOStationary(n), EnsembleSpec(7, PureQuantum(), cfg))
        slowest = max(slowest, time.perf_counter() - start)
        for r in records:
            worst = max(worst, float(np.max(np.abs(r.positions - r.positions[0]))))
    ok = worst < AC1_REST and slowest < AC1_SECONDS
    acceptance(1, ok, f"max|x-x0|={worst:.3e} (<{AC1_REST:g}); slowest ensemble {slowest:.3f}s (<{AC1_SECONDS:g}s)")


def _classical(a, steps_per_period=None):
    cfg = IntegratorConfig(t1=10 * PERIOD, dt=None if steps_per_period is None else PERIOD / steps_per_period)
    scn = HOCoherent(PhysParams(amplitude_a=a))
    return scn, integrate_trajectory(scn, PureClassical(), a, 0.0, cfg)


def test_ac2_classical_limit(acceptance):
    a = 1.0
    scn, rec = _classical(a)
    dev = float(np.max(np.abs(rec.positions - a * np.cos(rec.times))))
    energy = 0.5 * rec.velocities**2 + scn.potential(rec.positions)
    drift = float(np.max(np.abs(energy / energy[0] - 1)))
    acceptance(2, dev < AC2_DEV and drift < AC2_DRIFT, f"max|x-a cos t|={dev:.3e} (<{AC2_DEV:g}); energy drift={drift:.3e} (<{AC2_DRIFT:g})")


def test_ac3_guidance_equivalence(acceptance):
    cases = [
        (HOStationary(1), 10 * PERIOD),
        (HOCoherent(PhysParams(amplitude_a=4.0)), 10 * PERIOD),
        (FreeGaussian(PhysParams(sigma0=4.0)), 64.0),
    ]
    worst = 0.0
    for scn, t1 in cases:
        cfg = IntegratorConfig(t1=t1)
        spec = EnsembleSpec(7, PureQuantum(), cfg)
        records = run_ensemble(scn, spec)
        for x0, rec in zip(spec.initial_positions(scn), records):
            ref = integrate_guidance(scn, x0, cfg)
            worst = max(worst, float(np.max(np.abs(rec.positions - ref.positions))))
    acceptance(3, worst < AC3_POINTWISE, f"max|x_2nd - x_guidance|={worst:.3e} over 3 scenarios (<{AC3_POINTWISE:g})")


def test_ac4_free_spreading_and_arrest(acceptance):
    sigma0 = 4.0
    fg = FreeGaussian(PhysParams(sigma0=sigma0))
    rec = integrate_trajectory(fg, PureQuantum(), sigma0, 0.0, IntegratorConfig(t1=4 * sigma0**2))
    scaling = float(np.max(np.abs(rec.positions - sigma0 * fg.sigma(rec.times) / sigma0)))

    preset = PRESETS["fig3"]["integrator"]
    cfg = IntegratorConfig(t1=preset["t1"], output_stride=preset["output_stride"])
    records = run_ensemble(fg, EnsembleSpec(7, ExponentialRelaxation(5.0), cfg))
    m = spreading_metrics(records)
    quarter = m.spread[3 * len(m.spread) // 4 :]
    spread_change = float((quarter.max() - quarter.min()) / quarter.mean())
    late = m.accel_proxy[3 * len(m.accel_proxy) // 4 :]
    accel_ratio = float(late.max() / m.accel_proxy[0])
    ok = scaling < AC4_SCALING and accel_ratio < AC4_ACCEL and spread_change < AC4_SPREAD
    acceptance(
        4,
        ok,
        f"|x-x0 s/s0|={scaling:.3e} (<{AC4_SCALING:g}); late accel ratio={accel_ratio:.3e} (<{AC4_ACCEL:g}); "
        f"final-quarter spread change={spread_change:.4%} (<{AC4_SPREAD:.1%})",
    )


def test_ac5_crossing_dichotomy(acceptance):
    preset = PRESETS["fig2"]
    scn = HOCoherent(PhysParams(amplitude_a=preset["scenario"]["amplitude_a"]))
    cfg = IntegratorConfig(t1=preset["integrator"]["t1"], output_stride=preset["integrator"]["output_stride"])
    counts = {}
    for b in (0.0, 5.0):
        counts[b] = len(detect_crossings(run_ensemble(scn, EnsembleSpec(7, ExponentialRelaxation(b), cfg))))
    acceptance(5, counts[0.0] == 0 and counts[5.0] > 0, f"crossings b=0: {counts[0.0]} (==0); b=5: {counts[5.0]} (>0)")


def test_ac6_energy_residue(acceptance):
    start = time.perf_counter()
    free_err = 0.0
    for sigma0, u, mass in ((1.0, 0.0, 1.0), (0.7, 1.5, 2.0), (2.0, -0.8, 0.5)):
        packet = FreeGaussian(PhysParams(sigma0=sigma0, drift_u=u, mass=mass))
        grid = default_grid(packet, n_points=512, widths=14.0)
        value = mean_energy(discretize_state(packet, grid), grid, mass=mass)
        free_err = max(free_err, abs(value - (1 / (8 * mass * sigma0**2) + 0.5 * mass * u * u)))
    means, stds = {}, {}
    for n in (1, 2):
        scn = HOStationary(n)
        grid = default_grid(scn, n_points=256)
        w = wigner_transform(density_from_pure(discretize_state(scn, grid), grid))
        field = wigner_energy_field(w)
        means[n], stds[n] = field.mean, field.relative_std
    elapsed = time.perf_counter() - start
    mean_err = max(abs(means[1] - 1.5), abs(means[2] - 2.5))
    ok = free_err < AC6_FREE and mean_err < AC6_MEAN and max(stds.values()) < AC6_STD and elapsed < AC6_SECONDS
    acceptance(
        6,
        ok,
        f"free <E> err={free_err:.2e} (<{AC6_FREE:g}); E(n=1)={means[1]:.6f} E(n=2)={means[2]:.6f} (+-{AC6_MEAN:g}); "
        f"rel std={max(stds.values()):.2e} (<{AC6_STD:g}); {elapsed:.2f}s (<{AC6_SECONDS:g}s)",
    )


def test_ac7_decoherence_rate(acceptance):
    x1, x2, D = -4.0, 4.0, 0.01
    grid = SpatialGrid.centered(16.0, 256)
    psi = discretize_state(GaussianPair(x1, x2), grid)
    rho0 = density_from_pure(psi, grid)
    snaps = evolve_master(rho0, MasterEqParams(D=D, mode="decoherence_only", dt=0.01), 200, 10)
    rate = coherence_decay_rate(snaps, x1, x2)
    predicted = predicted_decay_rate(D, x1, x2)
    rate_err = abs(rate / predicted - 1)
    diag_intact = all(np.array_equal(s.diagonal(), rho0.diagonal()) for s in snaps)
    trace_drift = max(abs(s.trace() - 1.0) for s in snaps)
    t = np.array([s.t for s in snaps])
    var = np.array([momentum_variance(wigner_transform(s)) for s in snaps])
    p2_err = abs(np.polyfit(t, var, 1)[0] / (2 * D) - 1)
    ok = rate_err < AC7_RATE and diag_intact and trace_drift < AC7_TRACE and p2_err < AC7_P2
    acceptance(
        7,
        ok,
        f"rate={rate:.6f} vs {predicted:.6f} ({rate_err:.2e} < {AC7_RATE:g}); diagonal unchanged={diag_intact}; "
        f"trace drift={trace_drift:.1e} (<{AC7_TRACE:g}); d<p^2>/dt vs 2D err={p2_err:.2e} (<{AC7_P2:g})",
    )


def test_ac8_decoherence_time(acceptance):
    tau = decoherence_time(BathParams.from_relaxation_time(1e17, 300.0, 1e-3, 1e-2))
    acceptance(8, AC8_LO <= tau <= AC8_HI, f"tau_D={tau:.3e} s in [{AC8_LO:g}, {AC8_HI:g}]")


def test_ac9_integrator_order(acceptance):
    errors = []
    for steps in (64, 128):
        _, rec = _classical(1.0, steps)
        errors.append(float(np.max(np.abs(rec.positions - np.cos(rec.times)))))
    ratio = errors[0] / errors[1]
    acceptance(9, AC9_LO <= ratio <= AC9_HI, f"error ratio under dt halving={ratio:.3f} in [{AC9_LO:g}, {AC9_HI:g}]")


def _tree_bytes(root):
    out = {}
    for name in sorted(os.listdir(root)):
        with open(os.path.join(root, name), "rb") as fh:
            out[name] = fh.read()
    return out


def test_ac10_cli_determinism(tmp_path, acceptance):
    mismatched = []
    files = 0
    for preset in sorted(PRESETS):
        trees = []
        for run in ("first", "second"):
            out = tmp_path / run / preset
            assert cli_main(["simulate", "--preset", preset, "--out", str(out), "--plot-data"]) == 0
            trees.append(_tree_bytes(out))
        files += len(trees[0])
        if trees[0] != trees[1]:
            mismatched.append(preset)
    acceptance(10, not mismatched, f"{len(PRESETS)} presets x 2 runs, {files} files compared; mismatched presets: {mismatched or 'none'}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
