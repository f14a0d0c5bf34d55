"""Minimal speeds, stationary states and fronts of the periodic Fisher-KPP equation,
and their homogenized limits as the period shrinks."""
from .coefficients import (MeanSet, PeriodicCoefficient, ReactionModel, arithmetic_mean, compute_means,
                           find_p0, harmonic_mean, logistic, quadratic, validate_hypotheses)
from .discretization import OperatorMatrix, PeriodicGrid
from .presets import BUILTIN, Preset, load_preset
from .spectral import EigenPair, k_of_lambda, principal_eigenpair, rho1
from .speed import SpeedResult, homogenized_speed, lower_bound, minimal_speed, speed_sweep
from .steady import FrontProfile, StationaryState, homogenized_front, stationary_state

__version__ = "0.1.0"

__all__ = [
    "MeanSet", "PeriodicCoefficient", "ReactionModel", "arithmetic_mean", "compute_means", "find_p0",
    "harmonic_mean", "logistic", "quadratic", "validate_hypotheses", "OperatorMatrix", "PeriodicGrid",
    "BUILTIN", "Preset", "load_preset", "EigenPair", "k_of_lambda", "principal_eigenpair", "rho1",
    "SpeedResult", "homogenized_speed", "lower_bound", "minimal_speed", "speed_sweep", "FrontProfile",
    "StationaryState", "homogenized_front", "stationary_state",
]
