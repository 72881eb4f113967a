"""Bayes-risk compressed-sensing multi-user detection for sparse, finite-alphabet sources."""

from .model import BPSK, AugmentedAlphabet, DetectionParams, cost_weight, penalty_lambda, penalty_theta
from .linsys import AugmentedSystem, LinearSystem, PenaltyMode, augment, l0_norm, objective, per_symbol_penalty
from .detector import DetectionResult, TriangularizedSystem, detect, exhaustive_detect, factorize, sphere_detect

__version__ = "0.1.0"

__all__ = [
    "BPSK",
    "AugmentedAlphabet",
    "DetectionParams",
    "cost_weight",
    "penalty_lambda",
    "penalty_theta",
    "AugmentedSystem",
    "LinearSystem",
    "PenaltyMode",
    "augment",
    "l0_norm",
    "objective",
    "per_symbol_penalty",
    "DetectionResult",
    "TriangularizedSystem",
    "detect",
    "exhaustive_detect",
    "factorize",
    "sphere_detect",
]
