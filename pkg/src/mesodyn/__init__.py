"""Quantum-to-classical trajectory ensembles with an environment coupling λ(t).

The trajectory engine integrates ``m x'' = -d/dx [V + (1 - λ(t)) Q]`` with a
closed-form quantum potential ``Q``; :mod:`mesodyn.phasespace` carries the
conventional density-matrix / Wigner-function decoherence diagnostics.
"""

__version__ = "0.1.0"

from .coupling import (
    BathParams,
    ExponentialRelaxation,
    Fixed,
    PureClassical,
    PureQuantum,
    decoherence_time,
    lambda_at,
    thermal_wavelength,
)
from .errors import (
    ConfigurationError,
    DegenerateInputError,
    DomainError,
    FitError,
    IntegrationError,
    UsageError,
)
from .scenarios import FreeGaussian, HOCoherent, HOStationary, PhysParams

__all__ = [
    "BathParams",
    "ConfigurationError",
    "DegenerateInputError",
    "DomainError",
    "ExponentialRelaxation",
    "FitError",
    "Fixed",
    "FreeGaussian",
    "HOCoherent",
    "HOStationary",
    "IntegrationError",
    "PhysParams",
    "PureClassical",
    "PureQuantum",
    "UsageError",
    "__version__",
    "decoherence_time",
    "lambda_at",
    "thermal_wavelength",
]
