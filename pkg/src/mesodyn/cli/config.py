"""JSON run configuration: loading, overrides and translation to library objects.

A config is a JSON object whose blocks depend on the command::

    simulate  scenario, coupling | panels, integrator, ensemble, [mirror]
    wigner    state, grid, [wigner]
    master    state, grid, master, probe
    tau       bath

plus an optional ``output`` block.  Errors raise :class:`ConfigError`
carrying the dotted key path and, when the config came from a file, the
line of that key.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
import re

from ..coupling import ExponentialRelaxation, Fixed, PureClassical, PureQuantum
from ..errors import DomainError
from ..phasespace import GaussianPair, MasterEqParams, OscillatorPair, SpatialGrid, default_grid
from ..scenarios import FreeGaussian, HOCoherent, HOStationary, PhysParams
from ..trajectories import EnsembleSpec, IntegratorConfig

COMMANDS = ("simulate", "wigner", "master", "tau")
REQUIRED = {
    "simulate": ("scenario", "integrator", "ensemble"),
    "wigner": ("state",),
    "master": ("state", "grid", "master", "probe"),
    "tau": ("bath",),
}
SCENARIO_KINDS = ("ho_stationary", "ho_coherent", "free_gaussian")
STATE_KINDS = SCENARIO_KINDS + ("oscillator_pair", "gaussian_pair")
PARAM_KEYS = ("hbar", "mass", "omega", "amplitude_a", "sigma0", "drift_u")
PAPER_UNITS = {"hbar": 1.0, "mass": 1.0, "omega": 1.0}


class ConfigError(ValueError):
    def __init__(self, message, path=""):
        super().__init__(message)
        self.path = path
        self.source = None
        self.line = None

    def __str__(self):
        where = self.source or "config"
        if self.line is not None:
            where = f"{where}:{self.line}"
        key = f" {self.path}:" if self.path else ""
        return f"{where}:{key} {self.args[0]}"


def locate(text, path):
    """1-based line of the last key in dotted ``path`` inside JSON ``text``."""
    pos, line = 0, None
    for part in path.split("."):
        if not part or part.isdigit():
            continue
        match = re.compile(r'"%s"\s*:' % re.escape(part)).search(text, pos)
        if match is None:
            break
        pos = match.end()
        line = text.count("\n", 0, match.start()) + 1
    return line


def load_text(text, source="<config>"):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        err = ConfigError(f"invalid JSON: {exc.msg}")
        err.source, err.line = source, exc.lineno
        raise err from None
    if not isinstance(data, dict):
        err = ConfigError("top level must be a JSON object")
        err.source, err.line = source, 1
        raise err
    return data


def apply_override(cfg, assignment):
    """Apply one ``dotted.key=value`` override; values are parsed as JSON when possible."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not of the form key=value", "--set")
    key, raw = assignment.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = cfg
    parts = key.strip().split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot set {key!r}: {part!r} is not an object", key)
    node[parts[-1]] = value
    return cfg


def config_hash(cfg):
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def apply_units(cfg, units):
    cfg = copy.deepcopy(cfg)
    if units == "paper":
        for block in ("scenario", "state"):
            if isinstance(cfg.get(block), dict):
                cfg[block].update(PAPER_UNITS)
        for panel in cfg.get("panels", []) or []:
            if isinstance(panel.get("scenario"), dict):
                panel["scenario"].update(PAPER_UNITS)
    return cfg


def check_blocks(cfg, command):
    declared = cfg.get("command")
    if declared is not None and declared != command:
        raise ConfigError(f"config is for command {declared!r}, not {command!r}", "command")
    for block in REQUIRED[command]:
        if block not in cfg:
            raise ConfigError(f"missing required block {block!r}", block)
        if not isinstance(cfg[block], dict):
            raise ConfigError(f"block {block!r} must be an object", block)
    if command == "simulate" and "coupling" not in cfg and "panels" not in cfg:
        raise ConfigError("simulate needs a 'coupling' block or a 'panels' list", "coupling")


def _number(block, key, path, default=None, positive=False, integer=False):
    value = block.get(key, default)
    if value is None:
        if default is None and key not in block:
            raise ConfigError(f"missing required key {key!r}", f"{path}.{key}")
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"expected a finite number, got {value!r}", f"{path}.{key}")
    if integer and int(value) != value:
        raise ConfigError(f"expected an integer, got {value!r}", f"{path}.{key}")
    if positive and value <= 0:
        raise ConfigError(f"must be positive, got {value!r}", f"{path}.{key}")
    return int(value) if integer else float(value)


def _reject_unknown(block, allowed, path):
    for key in block:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r}", f"{path}.{key}")


def phys_params(block, path):
    values = {k: _number(block, k, path, default=PhysParams.__dataclass_fields__[k].default) for k in PARAM_KEYS}
    try:
        return PhysParams(**values)
    except DomainError as exc:
        raise ConfigError(str(exc), path) from None


def build_scenario(block, path="scenario"):
    kind = block.get("kind")
    if kind not in SCENARIO_KINDS:
        raise ConfigError(f"kind must be one of {SCENARIO_KINDS}, got {kind!r}", f"{path}.kind")
    _reject_unknown(block, ("kind", "n") + PARAM_KEYS, path)
    params = phys_params(block, path)
    if kind == "ho_stationary":
        n = _number(block, "n", path, default=0, integer=True)
        if n < 0:
            raise ConfigError("n must be >= 0", f"{path}.n")
        return HOStationary(n, params)
    if kind == "ho_coherent":
        return HOCoherent(params)
    return FreeGaussian(params)


def build_state(block, path="state"):
    kind = block.get("kind")
    if kind not in STATE_KINDS:
        raise ConfigError(f"kind must be one of {STATE_KINDS}, got {kind!r}", f"{path}.kind")
    if kind in SCENARIO_KINDS:
        return build_scenario(block, path)
    _reject_unknown(block, ("kind", "x1", "x2") + PARAM_KEYS, path)
    x1 = _number(block, "x1", path)
    x2 = _number(block, "x2", path)
    params = phys_params(block, path)
    return OscillatorPair(x1, x2, params) if kind == "oscillator_pair" else GaussianPair(x1, x2, params)


def build_coupling(block, path="coupling"):
    law = block.get("law")
    _reject_unknown(block, ("law", "b", "lambda0"), path)
    try:
        if law == "quantum":
            return PureQuantum()
        if law == "classical":
            return PureClassical()
        if law == "fixed":
            return Fixed(_number(block, "lambda0", path))
        if law == "exponential":
            return ExponentialRelaxation(_number(block, "b", path))
    except DomainError as exc:
        raise ConfigError(str(exc), path) from None
    raise ConfigError(
        f"law must be one of ('quantum', 'classical', 'fixed', 'exponential'), got {law!r}", f"{path}.law"
    )


def build_integrator(block, path="integrator"):
    _reject_unknown(block, ("t0", "t1", "dt", "output_stride", "method"), path)
    t0 = _number(block, "t0", path, default=0.0)
    t1 = _number(block, "t1", path)
    dt = block.get("dt")
    if dt is not None:
        dt = _number(block, "dt", path, positive=True)
    stride = _number(block, "output_stride", path, default=1, integer=True)
    method = block.get("method", "RK4")
    if method != "RK4":
        raise ConfigError(f"unsupported method {method!r}; only RK4", f"{path}.method")
    if not t1 > t0:
        raise ConfigError(f"t1 ({t1}) must exceed t0 ({t0})", f"{path}.t1")
    if stride < 1:
        raise ConfigError("output_stride must be >= 1", f"{path}.output_stride")
    return IntegratorConfig(t0=t0, t1=t1, dt=dt, output_stride=stride)


def build_ensemble(block, coupling, integrator, path="ensemble"):
    _reject_unknown(block, ("n_members", "sampling", "positions"), path)
    positions = block.get("positions")
    if positions is not None:
        if not isinstance(positions, list) or not all(
            isinstance(p, (int, float)) and not isinstance(p, bool) for p in positions
        ) or not positions:
            raise ConfigError("positions must be a non-empty list of numbers", f"{path}.positions")
        return EnsembleSpec(len(positions), coupling, integrator, [float(p) for p in positions])
    sampling = block.get("sampling", "quantile")
    if sampling != "quantile":
        raise ConfigError(f"sampling must be 'quantile' (or give 'positions'), got {sampling!r}", f"{path}.sampling")
    n = _number(block, "n_members", path, integer=True)
    if n < 1:
        raise ConfigError("n_members must be >= 1", f"{path}.n_members")
    return EnsembleSpec(n, coupling, integrator)


def _label(panel, index):
    label = panel.get("label", f"panel{index}")
    if not isinstance(label, str) or not re.fullmatch(r"[A-Za-z0-9_.+-]+", label):
        raise ConfigError(f"label must match [A-Za-z0-9_.+-]+, got {label!r}", f"panels.{index}.label")
    return label


def simulate_panels(cfg):
    """List of ``(label, scenario, coupling)`` for a simulate config."""
    panels = cfg.get("panels")
    if panels is None:
        return [("main", build_scenario(cfg["scenario"]), build_coupling(cfg["coupling"]))]
    if not isinstance(panels, list) or not panels:
        raise ConfigError("panels must be a non-empty list", "panels")
    out, seen = [], set()
    for i, panel in enumerate(panels):
        path = f"panels.{i}"
        if not isinstance(panel, dict):
            raise ConfigError("each panel must be an object", path)
        _reject_unknown(panel, ("label", "scenario", "coupling"), path)
        label = _label(panel, i)
        if label in seen:
            raise ConfigError(f"duplicate panel label {label!r}", f"{path}.label")
        seen.add(label)
        scenario_block = dict(cfg["scenario"])
        scenario_block.update(panel.get("scenario", {}))
        coupling_block = panel.get("coupling", cfg.get("coupling"))
        if coupling_block is None:
            raise ConfigError("panel has no coupling and no top-level default", f"{path}.coupling")
        out.append((label, build_scenario(scenario_block, f"{path}.scenario"), build_coupling(coupling_block, f"{path}.coupling")))
    return out


def build_grid(block, state, path="grid"):
    _reject_unknown(block, ("n_points", "half_width", "widths"), path)
    n = _number(block, "n_points", path, default=256, integer=True)
    if n < 16:
        raise ConfigError("n_points must be >= 16", f"{path}.n_points")
    half = block.get("half_width")
    if half is None:
        widths = _number(block, "widths", path, default=12.0, positive=True)
        return default_grid(state, n_points=n, widths=widths)
    return SpatialGrid.centered(_number(block, "half_width", path, positive=True), n)


def build_master(block, state_block, path="master"):
    _reject_unknown(block, ("mode", "gamma", "D", "dt", "steps", "potential", "omega", "snapshot_every"), path)
    potential = block.get("potential", "free")
    if potential == "harmonic":
        potential = ("harmonic", _number(block, "omega", path, default=state_block.get("omega", 1.0), positive=True))
    elif potential != "free":
        raise ConfigError(f"potential must be 'free' or 'harmonic', got {potential!r}", f"{path}.potential")
    mode = block.get("mode", "full")
    try:
        params = MasterEqParams(
            gamma=_number(block, "gamma", path, default=0.0),
            D=_number(block, "D", path, default=0.0),
            mode=mode,
            dt=_number(block, "dt", path, positive=True),
            potential=potential,
            mass=float(state_block.get("mass", 1.0)),
            hbar=float(state_block.get("hbar", 1.0)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc), path) from None
    steps = _number(block, "steps", path, integer=True)
    if steps < 1:
        raise ConfigError("steps must be >= 1", f"{path}.steps")
    every = _number(block, "snapshot_every", path, default=max(1, steps // 20), integer=True)
    if every < 1:
        raise ConfigError("snapshot_every must be >= 1", f"{path}.snapshot_every")
    return params, steps, every
