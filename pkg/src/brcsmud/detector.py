"""Bayes-risk sparse multi-user detector.

``detect`` stacks an identity block under ``T`` so that under-determined
systems become over-determined, triangularizes the stacked matrix with a
skinny Householder QR and runs a depth-first sphere search over ``A0^K``.
``exhaustive_detect`` enumerates every candidate and serves as the test
oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _search
from .linsys import (
    AugmentedSystem,
    LinearSystem,
    PenaltyMode,
    augment,
    objective,
    per_symbol_penalty,
)
from .model import AugmentedAlphabet, DetectionParams, penalty_lambda

__all__ = [
    "TriangularizedSystem",
    "DetectionResult",
    "householder_qr",
    "factorize",
    "sphere_detect",
    "exhaustive_detect",
    "detect",
    "MAX_ENUMERATION",
]

# Largest candidate count exhaustive_detect will enumerate (3**16).
MAX_ENUMERATION = 3**16

_TIE_RTOL = 1e-10
_CHUNK = 1 << 15


def _tie_tol(value: float) -> float:
    return _TIE_RTOL * (1.0 + abs(value))


@dataclass(frozen=True, eq=False)
class TriangularizedSystem:
    r: np.ndarray
    y_tilde: np.ndarray
    residual_const: float
    theta: float
    penalty_mode: PenaltyMode


@dataclass(frozen=True, eq=False)
class DetectionResult:
    x_hat: np.ndarray
    objective_value: float
    nodes_visited: int = 0

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.x_hat))


def householder_qr(a) -> tuple[np.ndarray, np.ndarray]:
    """Skinny QR of a tall matrix by Householder reflections.

    Returns ``q`` (m x n, orthonormal columns) and upper triangular ``r``
    (n x n) with a nonnegative diagonal, so the factorization is unique
    for full column rank input.
    """
    a = np.array(a, dtype=float)
    m, n = a.shape
    if m < n:
        raise ValueError(f"need m >= n for a skinny QR, got {a.shape}")
    r = a.copy()
    q = np.eye(m)
    for j in range(n):
        v = r[j:, j].copy()
        norm_x = np.linalg.norm(v)
        if norm_x == 0.0:
            continue
        v[0] += math.copysign(norm_x, v[0])
        v /= np.linalg.norm(v)
        r[j:, j:] -= 2.0 * np.outer(v, v @ r[j:, j:])
        q[:, j:] -= 2.0 * np.outer(q[:, j:] @ v, v)
    q = q[:, :n]
    r = np.triu(r[:n, :])
    signs = np.where(np.diag(r) < 0, -1.0, 1.0)
    return q * signs, r * signs[:, None]


def factorize(aug: AugmentedSystem) -> TriangularizedSystem:
    q, r = householder_qr(aug.matrix_aug)
    diag = np.abs(np.diag(r))
    # The identity block bounds every singular value of T' below by 1.
    assert diag.min() > 1e-8, "augmented matrix lost column rank"
    y_tilde = q.T @ aug.observation_aug
    y_aug = aug.observation_aug
    residual = max(float(y_aug @ y_aug - y_tilde @ y_tilde), 0.0)
    return TriangularizedSystem(r, y_tilde, residual, aug.theta, aug.penalty_mode)


def sphere_detect(
    tri: TriangularizedSystem,
    alphabet: AugmentedAlphabet,
    lam: float,
    system: LinearSystem,
    trace: list | None = None,
) -> DetectionResult:
    """Exact minimizer of the penalized objective by depth-first search.

    Levels are visited from the last unknown to the first. Children are
    expanded in ascending order of their metric increment (Schnorr-Euchner)
    and the radius starts at infinity, so the first leaf sets it. Among
    equal-metric leaves the candidate that is lexicographically smallest
    in enumeration order ``[0, *sorted(A)]`` wins.

    If ``trace`` is a list, the metric of every accepted leaf is appended
    in acceptance order.
    """
    symbols = np.array(alphabet.symbols)
    penalties = np.array([per_symbol_penalty(tri, s) for s in alphabet.symbols])
    if penalties.min() < 0:
        raise ValueError("per-symbol penalties must be nonnegative")
    ranks, _, nodes, accepted = _search.search(
        np.ascontiguousarray(tri.r), np.ascontiguousarray(tri.y_tilde), float(tri.residual_const), symbols, penalties
    )
    if trace is not None:
        trace.extend(accepted.tolist())
    x_hat = symbols[ranks]
    return DetectionResult(x_hat, objective(system, x_hat, lam), int(nodes))


def _candidates(symbols: np.ndarray, k: int, start: int, stop: int) -> np.ndarray:
    """Rows ``start..stop`` of the lexicographic enumeration of ``symbols^k``."""
    base = len(symbols)
    idx = np.arange(start, stop)
    powers = base ** np.arange(k - 1, -1, -1)
    digits = (idx[:, None] // powers[None, :]) % base
    return symbols[digits]


def exhaustive_detect(system: LinearSystem, params: DetectionParams) -> DetectionResult:
    """Brute-force argmin over every candidate in ``A0^K``.

    Candidates are scanned in lexicographic enumeration order and the first
    one within tie tolerance of the global minimum is returned.
    """
    m, k = system.dims
    symbols = np.array(params.alphabet.symbols)
    total = len(symbols) ** k
    if total > MAX_ENUMERATION:
        raise ValueError(f"{total} candidates exceed the enumeration limit {MAX_ENUMERATION}")
    lam = penalty_lambda(params)
    t, y = system.matrix, system.observation

    def chunk_objectives(start: int, stop: int) -> np.ndarray:
        cand = _candidates(symbols, k, start, stop)
        res = y[None, :] - cand @ t.T
        return np.einsum("ij,ij->i", res, res) + lam * np.count_nonzero(cand, axis=1)

    best = math.inf
    for start in range(0, total, _CHUNK):
        best = min(best, float(chunk_objectives(start, min(start + _CHUNK, total)).min()))
    limit = best + _tie_tol(best)
    for start in range(0, total, _CHUNK):
        stop = min(start + _CHUNK, total)
        hits = np.flatnonzero(chunk_objectives(start, stop) <= limit)
        if hits.size:
            x_hat = _candidates(symbols, k, start + hits[0], start + hits[0] + 1)[0]
            return DetectionResult(x_hat, objective(system, x_hat, lam), total)
    raise AssertionError("enumeration found no minimizer")  # pragma: no cover


def detect(system: LinearSystem, params: DetectionParams) -> DetectionResult:
    aug = augment(system, params)
    tri = factorize(aug)
    return sphere_detect(tri, params.alphabet, penalty_lambda(params), system)
