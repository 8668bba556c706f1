"""Command-line front end: ``mesodyn simulate | wigner | master | tau``.

Every command is driven by a JSON config (``--config``), a built-in preset
(``--preset``, simulate only) or the command's default config, with
``--set key.path=value`` overrides applied last.  Outputs are CSV files with
``#`` metadata lines carrying the tool version and a SHA-256 of the resolved
config; identical configs give byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import logging
import math
import sys

import numpy as np

from .. import __version__
from ..coupling import BathParams, decoherence_time, diffusion_coefficient, relaxation_time, thermal_wavelength
from ..errors import ConfigurationError, DegenerateInputError, DomainError, FitError, IntegrationError
from ..phasespace import (
    coherence_decay_rate,
    density_from_pure,
    discretize_state,
    evolve_master,
    momentum_variance,
    predicted_decay_rate,
    wigner_energy_field,
    wigner_transform,
)
from ..scenarios import HOStationary
from ..trajectories import IntegratorConfig, detect_crossings, run_ensemble, spreading_metrics
from . import config as cfgmod
from .config import ConfigError
from .output import CsvWriter
from .presets import DEFAULTS, PRESETS, get_preset

logger = logging.getLogger("mesodyn")

EXIT_CONFIG = 2
EXIT_NUMERIC = 3

UNITS_NOTE = {
    "natural": "natural (hbar = m = omega = 1 unless set in the config)",
    "paper": "paper (hbar = c = 1, m = 1 MeV, omega = 1; t in 1e21 s, b in 1e-21 s^-1)",
}


def create_parser():
    parser = argparse.ArgumentParser(
        prog="mesodyn",
        description="Quantum-to-classical trajectory ensembles and decoherence diagnostics.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
examples:
  mesodyn simulate --preset fig2 --out out/fig2 --plot-data
  mesodyn simulate --config run.json --set integrator.t1=20
  mesodyn wigner --set state.n=2 --out out/wigner
  mesodyn master --out out/master
  mesodyn tau --mass 1e-3 --temperature 300 --relaxation-time 1e17 --separation 1e-2
""",
    )
    parser.add_argument("--version", action="version", version=f"mesodyn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config value (repeatable)")
        p.add_argument("--out", help="output directory (default: config output.directory or ./out)")
        p.add_argument("--units", choices=("natural", "paper"), default="natural")
        p.add_argument("-v", "--verbose", action="store_true")

    sim = sub.add_parser("simulate", help="trajectory ensembles (presets fig1-fig4)")
    common(sim)
    sim.add_argument("--preset", choices=sorted(PRESETS))
    sim.add_argument("--plot-data", action="store_true", help="also write wide per-panel x(t) and v(t) series")

    wig = sub.add_parser("wigner", help="Wigner function and oscillator energy field")
    common(wig)

    mas = sub.add_parser("master", help="master-equation decoherence run")
    common(mas)

    tau = sub.add_parser("tau", help="thermal decoherence time scales (SI)")
    common(tau)
    tau.add_argument("--mass", type=float, help="kg")
    tau.add_argument("--temperature", type=float, help="K")
    tau.add_argument("--relaxation-time", type=float, help="s")
    tau.add_argument("--separation", help="m, or 'thermal' for the thermal wavelength")
    return parser


def resolve_config(args):
    """Return ``(config, source_text, source_name)`` after presets and overrides."""
    text, source = None, None
    preset = getattr(args, "preset", None)
    if args.config and preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc.strerror}") from None
        source = args.config
        cfg = cfgmod.load_text(text, source)
    elif preset:
        cfg, source = get_preset(preset), f"preset {preset}"
    elif args.command in DEFAULTS:
        cfg, source = copy.deepcopy(DEFAULTS[args.command]), f"default {args.command} config"
    else:
        raise ConfigError("simulate needs --config or --preset")
    for assignment in args.set:
        cfgmod.apply_override(cfg, assignment)
    if args.command == "tau":
        bath = cfg.setdefault("bath", {})
        for flag, key in (("mass", "mass"), ("temperature", "temperature"), ("relaxation_time", "relaxation_time"), ("separation", "separation")):
            value = getattr(args, flag)
            if value is not None:
                bath[key] = value
    if args.command == "simulate" and args.plot_data:
        cfg.setdefault("output", {})["plot_data"] = True
    cfg = cfgmod.apply_units(cfg, args.units)
    cfg["units"] = args.units
    return cfg, text, source


def output_dir(args, cfg):
    if args.out:
        return args.out
    directory = cfg.get("output", {}).get("directory")
    return directory if isinstance(directory, str) else "out"


# -- simulate -----------------------------------------------------------------


def _summary_row(label, scn, law, records):
    crossings = detect_crossings(records)
    metrics = spreading_metrics(records)
    xs = np.stack([r.positions for r in records])
    energies = np.stack([r.energies for r in records])
    n_samples = len(records[0])
    quarter = metrics.spread[3 * n_samples // 4 :]
    accel = metrics.accel_proxy
    accel_late = float(accel[3 * len(accel) // 4 :].max()) if len(accel) else 0.0
    return [
        label,
        type(scn).__name__,
        getattr(scn, "n", ""),
        type(law).__name__,
        getattr(law, "b", getattr(law, "lambda0", "")),
        len(records),
        n_samples,
        float(records[0].times[0]),
        float(records[0].times[-1]),
        len(crossings),
        float(metrics.spread[0]),
        float(metrics.spread[-1]),
        float((quarter.max() - quarter.min()) / quarter.mean()) if quarter.mean() else 0.0,
        float(accel[0]) if len(accel) else 0.0,
        accel_late,
        float(np.abs(xs - xs[:, :1]).max()),
        float(np.abs(xs).max()),
        float(energies[:, 0].mean()),
        float(energies[:, -1].mean()),
    ]


SUMMARY_COLUMNS = [
    "panel", "scenario", "n", "law", "law_param", "n_members", "n_samples", "t_start", "t_end",
    "crossings", "spread_initial", "spread_final", "spread_rel_change_final_quarter",
    "accel_proxy_initial", "accel_proxy_max_final_quarter", "max_abs_displacement",
    "max_abs_position", "energy_mean_initial", "energy_mean_final",
]


def cmd_simulate(cfg, writer):
    panels = cfgmod.simulate_panels(cfg)
    integrator = cfgmod.build_integrator(cfg["integrator"])
    mirror = bool(cfg.get("mirror", False))
    plot_data = bool(cfg.get("output", {}).get("plot_data", False))
    summary = []
    runs = []
    for label, scn, law in panels:
        runs.append((label, scn, law, integrator))
        if mirror:
            span = integrator.t1 - integrator.t0
            mirrored = IntegratorConfig(
                t0=integrator.t0 - span, t1=integrator.t1, dt=integrator.dt, output_stride=integrator.output_stride
            )
            runs.append((f"{label}_mirror", scn, law, mirrored))
    for label, scn, law, integ in runs:
        spec = cfgmod.build_ensemble(cfg["ensemble"], law, integ)
        try:
            records = run_ensemble(scn, spec)
        except IntegrationError as exc:
            raise IntegrationError(f"panel {label}: {exc.args[0]}", exc.last_time, exc.member) from None
        meta = [f"panel: {label}", f"scenario: {scn!r}", f"coupling: {law!r}"]
        rows = (
            (i, r.times[k], r.positions[k], r.velocities[k], r.lambdas[k], r.energies[k])
            for i, r in enumerate(records)
            for k in range(len(r))
        )
        writer.write(f"{label}.csv", ["member", "t", "x", "v", "lambda", "energy"], rows, meta)
        if plot_data:
            for name, attr in (("x", "positions"), ("v", "velocities")):
                cols = ["t"] + [f"{name}{i}" for i in range(len(records))]
                series = np.stack([getattr(r, attr) for r in records], axis=1)
                rows = ([t, *vals] for t, vals in zip(records[0].times, series.tolist()))
                writer.write(f"{label}_{name}.csv", cols, rows, meta)
        summary.append(_summary_row(label, scn, law, records))
    writer.write("summary.csv", SUMMARY_COLUMNS, summary)
    for row in summary:
        print(f"{row[0]}: crossings={row[9]} spread {row[10]:.6g} -> {row[11]:.6g}")
    return summary


# -- wigner -------------------------------------------------------------------


def cmd_wigner(cfg, writer):
    state = cfgmod.build_state(cfg["state"])
    grid = cfgmod.build_grid(cfg.get("grid", {}), state)
    opts = cfg.get("wigner", {})
    cfgmod._reject_unknown(opts, ("interpolation", "derivative", "mask_level"), "wigner")
    hbar = state.params.hbar
    try:
        psi = discretize_state(state, grid)
    except DomainError as exc:
        raise ConfigError(str(exc), "grid") from None
    rho = density_from_pure(psi, grid)
    try:
        W = wigner_transform(rho, hbar=hbar, interpolation=opts.get("interpolation", "spectral"))
    except ConfigurationError as exc:
        raise ConfigError(str(exc), "wigner.interpolation") from None
    report = [
        ("normalization", W.normalization()),
        ("W_at_origin", W.value_at(0.0, 0.0)),
        ("momentum_variance", momentum_variance(W)),
    ]
    if isinstance(state, HOStationary):
        p = state.params
        try:
            field = wigner_energy_field(
                W, p.mass, p.omega, hbar,
                derivative=opts.get("derivative", "spectral"),
                mask_level=float(opts.get("mask_level", 1e-3)),
            )
        except ConfigurationError as exc:
            raise ConfigError(str(exc), "wigner.derivative") from None
        report += [
            ("energy_mean", field.mean),
            ("energy_field_rel_std", field.relative_std),
            ("energy_expected", state.energy),
            ("unmasked_fraction", float(field.mask.mean())),
        ]
    x, pax = grid.x, W.p
    rows = ((x[i], pax[j], W.values[i, j]) for i in range(len(x)) for j in range(len(pax)))
    writer.write("wigner.csv", ["x", "p", "W"], rows, [f"state: {state!r}"])
    writer.write("report.csv", ["quantity", "value"], report, [f"state: {state!r}"])
    for key, value in report:
        print(f"{key} = {value:.12g}")
    return dict(report)


# -- master -------------------------------------------------------------------


def cmd_master(cfg, writer):
    state = cfgmod.build_state(cfg["state"])
    grid = cfgmod.build_grid(cfg["grid"], state)
    params, steps, every = cfgmod.build_master(cfg["master"], cfg["state"])
    probe = cfg["probe"]
    x_a = cfgmod._number(probe, "x_a", "probe")
    x_b = cfgmod._number(probe, "x_b", "probe")
    try:
        psi = discretize_state(state, grid)
        i_a, i_b = grid.index_of(x_a), grid.index_of(x_b)
    except DomainError as exc:
        raise ConfigError(str(exc), "grid") from None
    rho0 = density_from_pure(psi, grid)
    try:
        snaps = evolve_master(rho0, params, steps, every)
    except ConfigurationError as exc:
        raise ConfigError(str(exc), "master") from None
    diag0 = snaps[0].diagonal()
    rows = []
    variances = []
    for s in snaps:
        variances.append(momentum_variance(wigner_transform(s, hbar=params.hbar)))
        rows.append((
            int(round((s.t - rho0.t) / params.dt)), s.t, s.trace(), abs(s.values[i_a, i_b]),
            float(np.abs(s.diagonal() - diag0).max()), s.hermiticity_error(), variances[-1],
        ))
    writer.write(
        "trace.csv",
        ["step", "t", "trace", "coherence_abs", "diag_max_change", "hermiticity_error", "momentum_variance"],
        rows,
        [f"state: {state!r}", f"master: {params!r}"],
    )
    which = cfg.get("output", {}).get("snapshots", "ends")
    if which not in ("ends", "all", "none"):
        raise ConfigError("output.snapshots must be 'ends', 'all' or 'none'", "output.snapshots")
    chosen = {"ends": [snaps[0], snaps[-1]], "all": snaps, "none": []}[which]
    n = grid.n_points
    for s in chosen:
        step = int(round((s.t - rho0.t) / params.dt))
        vals = s.values
        body = ((i, j, vals[i, j].real, vals[i, j].imag) for i in range(n) for j in range(n))
        writer.write(f"snapshot_{step:06d}.csv", ["i", "j", "re", "im"], body, [f"t: {s.t!r}", f"x_min: {grid.x_min!r}", f"dx: {grid.dx!r}"])
    fitted = coherence_decay_rate(snaps, x_a, x_b)
    predicted = predicted_decay_rate(params.D, grid.x[i_a], grid.x[i_b], params.hbar) if params.decoherence else 0.0
    times = np.array([s.t for s in snaps])
    p2_rate = float(np.polyfit(times, variances, 1)[0])
    report = [
        ("fitted_decay_rate", fitted),
        ("predicted_decay_rate", predicted),
        ("rate_ratio", fitted / predicted if predicted else float("nan")),
        ("trace_max_drift", max(abs(r[2] - 1.0) for r in rows)),
        ("diag_max_change", max(r[4] for r in rows)),
        ("momentum_variance_rate", p2_rate),
        ("two_D", 2.0 * params.D),
    ]
    writer.write("report.csv", ["quantity", "value"], report, [f"state: {state!r}", f"master: {params!r}"])
    for key, value in report:
        print(f"{key} = {value:.12g}")
    return dict(report)


# -- tau ----------------------------------------------------------------------


def _positive(bath, key):
    value = bath.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
        raise ConfigError(f"must be a positive number, got {value!r}", f"bath.{key}")
    return float(value)


def cmd_tau(cfg, writer):
    bath_cfg = cfg["bath"]
    cfgmod._reject_unknown(bath_cfg, ("mass", "temperature", "relaxation_time", "separation"), "bath")
    mass = _positive(bath_cfg, "mass")
    temperature = _positive(bath_cfg, "temperature")
    tau_r = _positive(bath_cfg, "relaxation_time")
    sep = bath_cfg.get("separation")
    if sep == "thermal":
        sep = thermal_wavelength(BathParams(1.0 / tau_r, temperature, mass, 1.0))
    else:
        if isinstance(sep, str):
            try:
                sep = float(sep)
            except ValueError:
                raise ConfigError(f"separation must be a number or 'thermal', got {sep!r}", "bath.separation") from None
        sep = _positive({"separation": sep}, "separation")
    bath = BathParams.from_relaxation_time(tau_r, temperature, mass, sep)
    lam = thermal_wavelength(bath)
    tau_rel = relaxation_time(bath)
    tau_d = decoherence_time(bath)
    diff = diffusion_coefficient(bath)
    lines = [
        ("lambda_T", lam, "m", "hbar / sqrt(2 m k_B T)"),
        ("tau_R", tau_rel, "s", "1 / gamma"),
        ("tau_D", tau_d, "s", "tau_R (lambda_T / dx)^2"),
        ("D", diff, "kg^2 m^2 s^-3", "2 m gamma k_B T"),
        ("separation", sep, "m", "dx"),
    ]
    for name, value, unit, formula in lines:
        print(f"{name} = {value:.6e} {unit}    [{formula}]")
    if writer.directory is not None:
        writer.write("tau.csv", ["quantity", "value", "unit", "formula"], lines)
    return {name: value for name, value, _, _ in lines}


COMMAND_FUNCS = {"simulate": cmd_simulate, "wigner": cmd_wigner, "master": cmd_master, "tau": cmd_tau}


def run(argv=None):
    """Parse ``argv``, run the command and return ``(exit_code, result)``."""
    parser = create_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    text = source = None
    try:
        cfg, text, source = resolve_config(args)
        cfgmod.check_blocks(cfg, args.command)
        directory = output_dir(args, cfg)
        if args.command == "tau" and not args.out and "output" not in cfg:
            directory = None
        writer = CsvWriter(directory, args.command, cfgmod.config_hash(cfg), UNITS_NOTE[args.units])
        result = COMMAND_FUNCS[args.command](cfg, writer)
    except ConfigError as exc:
        exc.source = exc.source or source
        if exc.line is None and text is not None and exc.path:
            exc.line = cfgmod.locate(text, exc.path)
        print(f"mesodyn: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG, None
    except (ConfigurationError, DomainError) as exc:
        print(f"mesodyn: config error: {source or 'config'}: {exc}", file=sys.stderr)
        return EXIT_CONFIG, None
    except (IntegrationError, FitError, DegenerateInputError, ArithmeticError) as exc:
        print(f"mesodyn: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC, None
    return 0, result


def main(argv=None):
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
