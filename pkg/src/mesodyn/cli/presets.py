"""Built-in simulate configurations ``fig1`` .. ``fig4``.

Each preset runs one panel per relaxation rate ``b``.  Windows and packet
parameters:

fig1  oscillator eigenstates n = 0, 1, 2; ten periods.
fig2  coherent packet with amplitude a = 4 (about six packet widths); ten periods.
fig3  free packet, sigma0 = 4, over t in [0, 4 m sigma0^2 / hbar] plus a
      mirrored run starting at -t1 (contraction, then expansion).
fig4  the fig3 runs without the mirror; read the velocity series.

Free-packet arrest is governed by b * m sigma0^2 / hbar; sigma0 = 4 puts the
b = 5 panel far into the decohered regime (about 80).
"""

from __future__ import annotations

import copy
import math

PERIOD = 2.0 * math.pi

_FIG1_B = (0.0, 0.0001, 0.01, 0.7)
_FIG2_B = (0.0, 0.1, 1.0, 5.0)
_FIG34_B = (0.0, 0.5, 1.0, 5.0)


def _exp(b):
    return {"law": "exponential", "b": b}


def _b_label(b):
    return f"b{b:g}"


FIG1 = {
    "command": "simulate",
    "scenario": {"kind": "ho_stationary", "n": 0, "hbar": 1.0, "mass": 1.0, "omega": 1.0},
    "integrator": {"t0": 0.0, "t1": 10 * PERIOD, "output_stride": 10},
    "ensemble": {"n_members": 7, "sampling": "quantile"},
    "panels": [
        {"label": f"n{n}_{_b_label(b)}", "scenario": {"n": n}, "coupling": _exp(b)}
        for n in (0, 1, 2)
        for b in _FIG1_B
    ],
}

FIG2 = {
    "command": "simulate",
    "scenario": {"kind": "ho_coherent", "hbar": 1.0, "mass": 1.0, "omega": 1.0, "amplitude_a": 4.0},
    "integrator": {"t0": 0.0, "t1": 10 * PERIOD, "output_stride": 10},
    "ensemble": {"n_members": 7, "sampling": "quantile"},
    "panels": [{"label": _b_label(b), "coupling": _exp(b)} for b in _FIG2_B],
}

FIG3 = {
    "command": "simulate",
    "scenario": {"kind": "free_gaussian", "hbar": 1.0, "mass": 1.0, "sigma0": 4.0, "drift_u": 0.0},
    "integrator": {"t0": 0.0, "t1": 64.0, "output_stride": 10},
    "ensemble": {"n_members": 7, "sampling": "quantile"},
    "mirror": True,
    "panels": [{"label": _b_label(b), "coupling": _exp(b)} for b in _FIG34_B],
}

FIG4 = copy.deepcopy(FIG3)
FIG4["mirror"] = False

PRESETS = {"fig1": FIG1, "fig2": FIG2, "fig3": FIG3, "fig4": FIG4}

PANEL_B_VALUES = {"fig1": _FIG1_B, "fig2": _FIG2_B, "fig3": _FIG34_B, "fig4": _FIG34_B}

# Defaults for the commands without presets.
WIGNER_DEFAULT = {
    "command": "wigner",
    "state": {"kind": "ho_stationary", "n": 1, "hbar": 1.0, "mass": 1.0, "omega": 1.0},
    "grid": {"n_points": 256, "widths": 12.0},
    "wigner": {"interpolation": "spectral", "derivative": "spectral", "mask_level": 1e-3},
}

MASTER_DEFAULT = {
    "command": "master",
    "state": {"kind": "gaussian_pair", "x1": -4.0, "x2": 4.0, "hbar": 1.0, "mass": 1.0, "sigma0": 1.0, "drift_u": 0.0},
    "grid": {"n_points": 256, "half_width": 16.0},
    "master": {"mode": "decoherence_only", "gamma": 0.0, "D": 0.01, "dt": 0.01, "steps": 200, "snapshot_every": 10},
    "probe": {"x_a": -4.0, "x_b": 4.0},
    "output": {"snapshots": "ends"},
}

TAU_DEFAULT = {
    "command": "tau",
    "bath": {"mass": 1e-3, "temperature": 300.0, "relaxation_time": 1e17, "separation": 1e-2},
}

DEFAULTS = {"wigner": WIGNER_DEFAULT, "master": MASTER_DEFAULT, "tau": TAU_DEFAULT}


def get_preset(name):
    return copy.deepcopy(PRESETS[name])
