"""Grid density matrices, the master equation and Wigner functions."""

from .grid import (
    DensityMatrixGrid,
    GaussianPair,
    OscillatorPair,
    SpatialGrid,
    default_grid,
    density_energy,
    density_from_pure,
    discretize_state,
    grid_potential,
    mean_energy,
    purity,
)
from .master import (
    MasterEqParams,
    coherence_decay_rate,
    evolve_master,
    predicted_decay_rate,
)
from .wigner import (
    EnergyField,
    WignerGrid,
    momentum_axis,
    momentum_moments,
    momentum_variance,
    wigner_energy_field,
    wigner_transform,
)

__all__ = [
    "DensityMatrixGrid",
    "EnergyField",
    "GaussianPair",
    "MasterEqParams",
    "OscillatorPair",
    "SpatialGrid",
    "WignerGrid",
    "coherence_decay_rate",
    "default_grid",
    "density_energy",
    "density_from_pure",
    "discretize_state",
    "evolve_master",
    "grid_potential",
    "mean_energy",
    "momentum_axis",
    "momentum_moments",
    "momentum_variance",
    "predicted_decay_rate",
    "purity",
    "wigner_energy_field",
    "wigner_transform",
]
