"""Basis pursuit de-noising baseline with hard quantization onto ``A0``.

Solves ``min_x 0.5 ||y - T x||^2 + gamma ||x||_1`` by accelerated proximal
gradient (FISTA) with restart-on-increase, then maps each coefficient to
zero or to the nearest data symbol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linsys import LinearSystem
from .model import AugmentedAlphabet

__all__ = [
    "BpdnConfig",
    "soft_threshold",
    "bpdn_objective",
    "lipschitz_bound",
    "bpdn_solve",
    "quantize",
    "universal_threshold",
]


@dataclass(frozen=True)
class BpdnConfig:
    reg_weight: float
    max_iters: int = 500
    rel_tol: float = 1e-6
    quant_threshold: float = 0.5

    def __post_init__(self):
        if not self.reg_weight > 0:
            raise ValueError(f"reg_weight must be positive, got {self.reg_weight}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if not 0.0 < self.quant_threshold < 1.0:
            raise ValueError(f"quant_threshold must lie in (0, 1), got {self.quant_threshold}")


def universal_threshold(noise_var: float, k: int) -> float:
    """``sigma * sqrt(2 ln K)``, the default l1 weight."""
    return math.sqrt(noise_var) * math.sqrt(2.0 * math.log(k)) if k > 1 else math.sqrt(noise_var)


def soft_threshold(v, t):
    """Proximal operator of ``t * |.|``; works on scalars and arrays."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("threshold must be nonnegative")
    out = np.sign(v) * np.maximum(np.abs(v) - t, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def bpdn_objective(system: LinearSystem, x, reg_weight: float) -> float:
    r = system.observation - system.matrix @ x
    return 0.5 * float(r @ r) + reg_weight * float(np.abs(x).sum())


def lipschitz_bound(t: np.ndarray, iters: int = 30, safety: float = 1.01) -> float:
    """Upper bound on the largest eigenvalue of ``T^T T`` via power iteration."""
    gram = t.T @ t
    v = np.ones(gram.shape[0]) / math.sqrt(gram.shape[0])
    est = 0.0
    for _ in range(iters):
        w = gram @ v
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 1.0
        v = w / nrm
        est = float(v @ gram @ v)
    return est * safety


def bpdn_solve(system: LinearSystem, config: BpdnConfig, history: list | None = None) -> np.ndarray:
    """Approximate l1-regularized least squares solution.

    When ``history`` is a list the objective after every iteration is
    appended; the sequence is nonincreasing because a momentum step that
    raises the objective is discarded and replaced by a plain proximal
    step from the current iterate.
    """
    t, y = system.matrix, system.observation
    gamma = config.reg_weight
    step = 1.0 / lipschitz_bound(t)
    thr = step * gamma
    aty = t.T @ y
    gram = t.T @ t

    def f(v):
        r = y - t @ v
        return 0.5 * float(r @ r) + gamma * float(np.abs(v).sum())

    x = np.zeros(t.shape[1])
    z = x
    f_x = f(x)
    mom = 1.0
    for _ in range(config.max_iters):
        x_new = soft_threshold(z - step * (gram @ z - aty), thr)
        f_new = f(x_new)
        if f_new > f_x:
            # restart: momentum made things worse
            mom = 1.0
            x_new = soft_threshold(x - step * (gram @ x - aty), thr)
            f_new = f(x_new)
            mom_new = 1.0
            z = x_new
        else:
            mom_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * mom * mom))
            z = x_new + ((mom - 1.0) / mom_new) * (x_new - x)
        change = np.linalg.norm(x_new - x)
        scale = max(np.linalg.norm(x_new), 1e-300)
        x, f_x, mom = x_new, f_new, mom_new
        if history is not None:
            history.append(f_x)
        if change <= config.rel_tol * scale:
            break
    return x


def quantize(x_cont, alphabet: AugmentedAlphabet, threshold: float = 0.5) -> np.ndarray:
    """Zero when ``|x_k| <= threshold``, else the nearest data symbol.

    Distance ties go to the smaller symbol.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    x_cont = np.asarray(x_cont, dtype=float).reshape(-1)
    data = np.array(alphabet.data_symbols)
    # data is sorted ascending, argmin returns the first (smallest) on ties
    nearest = data[np.argmin(np.abs(x_cont[:, None] - data[None, :]), axis=1)]
    return np.where(np.abs(x_cont) <= threshold, 0.0, nearest)
