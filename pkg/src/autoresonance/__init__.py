"""Threshold autoresonance in a dissipative pair of coupled oscillators."""

from .model import (
    DissipationDecomposition,
    EnvelopeState,
    FastState,
    ModelParams,
    PhysicalParams,
    rhs_fast,
    rhs_main,
    rhs_scaled,
)
from .integrator import IntegrationConfig, Trajectory, integrate

__version__ = "0.1.0"
