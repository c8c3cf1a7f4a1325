"""Exact and approximate hydrodynamic invariant manifolds of linear kinetic models."""

from . import (
    chapman_enskog,
    errors,
    estimators,
    invariance,
    models,
    projector,
    spectra,
    verification,
    viscosity,
)
from .estimators import HydrodynamicManifold, ThermodynamicProjector
from .models import MODEL_NAMES, build_model, full_generator

__version__ = "0.1.0"

__all__ = [
    "chapman_enskog",
    "errors",
    "estimators",
    "invariance",
    "models",
    "projector",
    "spectra",
    "verification",
    "viscosity",
    "HydrodynamicManifold",
    "ThermodynamicProjector",
    "MODEL_NAMES",
    "build_model",
    "full_generator",
]
