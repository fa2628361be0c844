"""Three-mode Bragg-scattering dynamics in a Bose condensate."""

from .condensate import (
    CondensateParams,
    DerivedScales,
    ModeCoefficients,
    dispersion,
    effective_coupling,
    healing_length,
    mode_coefficients,
)
from .observables import ObservableRecord, ProbeState, evolve_series
from .triad import Regime, build_model, propagator, spectrum, threshold, threshold_curve

__all__ = [
    "CondensateParams",
    "DerivedScales",
    "ModeCoefficients",
    "ObservableRecord",
    "ProbeState",
    "Regime",
    "build_model",
    "dispersion",
    "effective_coupling",
    "evolve_series",
    "healing_length",
    "mode_coefficients",
    "propagator",
    "spectrum",
    "threshold",
    "threshold_curve",
]
