"""Linear model ``y = T x + w``, the penalized objective and its augmentation."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .model import AugmentedAlphabet, DetectionParams, penalty_theta

__all__ = [
    "LinearSystem",
    "AugmentedSystem",
    "PenaltyMode",
    "l0_norm",
    "objective",
    "augment",
    "per_symbol_penalty",
]


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """Observation ``y`` (length M) and system matrix ``T`` (M x K)."""

    matrix: np.ndarray
    observation: np.ndarray

    def __post_init__(self):
        t = np.array(self.matrix, dtype=float)
        y = np.array(self.observation, dtype=float).reshape(-1)
        if t.ndim != 2:
            raise ValueError(f"matrix must be 2-D, got shape {t.shape}")
        m, k = t.shape
        if m < 1 or k < 1:
            raise ValueError(f"matrix must be at least 1x1, got shape {t.shape}")
        if y.shape[0] != m:
            raise ValueError(f"observation has length {y.shape[0]}, matrix has {m} rows")
        t.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "matrix", t)
        object.__setattr__(self, "observation", y)

    @property
    def dims(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def is_underdetermined(self) -> bool:
        m, k = self.dims
        return m < k


class PenaltyMode(enum.Enum):
    PENALIZE_NONZERO = "penalize_nonzero"
    PENALIZE_ZERO = "penalize_zero"


@dataclass(frozen=True, eq=False)
class AugmentedSystem:
    """``T' = [T; I_K]`` and ``y' = [y; 0_K]`` with the residual penalty ``theta``.

    For ``theta >= 0`` each active symbol costs ``theta``. For ``theta < 0``
    the search instead charges ``|theta|`` per zero symbol, which differs
    from the original objective only by the constant ``|theta| * K``.
    """

    matrix_aug: np.ndarray
    observation_aug: np.ndarray
    theta: float
    penalty_mode: PenaltyMode

    @property
    def num_unknowns(self) -> int:
        return self.matrix_aug.shape[1]


def _as_candidate(x, k: int | None = None, alphabet: AugmentedAlphabet | None = None) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if k is not None and x.shape[0] != k:
        raise ValueError(f"candidate has length {x.shape[0]}, expected {k}")
    if alphabet is not None:
        bad = ~np.isin(x, alphabet.symbols)
        if bad.any():
            raise ValueError(f"entries {x[bad]} are outside the augmented alphabet {alphabet.symbols}")
    return x


def l0_norm(x) -> int:
    """Number of nonzero entries."""
    return int(np.count_nonzero(np.asarray(x)))


def objective(system: LinearSystem, x, lam: float, alphabet: AugmentedAlphabet | None = None) -> float:
    """``||y - T x||_2^2 + lam * ||x||_0``.

    ``alphabet`` is optional; when given, entries of ``x`` are validated
    against it.
    """
    x = _as_candidate(x, system.dims[1], alphabet)
    r = system.observation - system.matrix @ x
    return float(r @ r) + lam * l0_norm(x)


def augment(system: LinearSystem, params: DetectionParams) -> AugmentedSystem:
    if not params.alphabet.is_unit_modulus:
        raise ValueError(
            f"augmentation needs a unit-modulus alphabet, got modulus {params.alphabet.modulus}"
        )
    m, k = system.dims
    t_aug = np.vstack([system.matrix, np.eye(k)])
    y_aug = np.concatenate([system.observation, np.zeros(k)])
    t_aug.setflags(write=False)
    y_aug.setflags(write=False)
    theta = penalty_theta(params)
    mode = PenaltyMode.PENALIZE_NONZERO if theta >= 0 else PenaltyMode.PENALIZE_ZERO
    return AugmentedSystem(t_aug, y_aug, theta, mode)


def per_symbol_penalty(aug: AugmentedSystem, x_k: float) -> float:
    """Nonnegative per-level cost used by the tree search."""
    if aug.penalty_mode is PenaltyMode.PENALIZE_NONZERO:
        return aug.theta if x_k != 0 else 0.0
    return abs(aug.theta) if x_k == 0 else 0.0
