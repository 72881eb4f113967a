"""Activity confusion counts, gross symbol errors and pooled rates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

__all__ = ["ConfusionCounts", "RatePoint", "score_confusion", "gse", "aggregate"]


@dataclass(frozen=True)
class ConfusionCounts:
    true_active: int = 0
    false_active: int = 0
    false_inactive: int = 0
    true_inactive: int = 0

    @property
    def total(self) -> int:
        return self.true_active + self.false_active + self.false_inactive + self.true_inactive

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.true_active + other.true_active,
            self.false_active + other.false_active,
            self.false_inactive + other.false_inactive,
            self.true_inactive + other.true_inactive,
        )

    @property
    def tar(self) -> Optional[float]:
        """True-active rate, ``None`` when no symbol was truly active."""
        denom = self.true_active + self.false_inactive
        return self.true_active / denom if denom else None

    @property
    def far(self) -> Optional[float]:
        """False-active rate, ``None`` when no symbol was truly inactive."""
        denom = self.false_active + self.true_inactive
        return self.false_active / denom if denom else None


@dataclass(frozen=True)
class RatePoint:
    snr_db: float
    omega: float
    tar: Optional[float]
    far: Optional[float]
    gse: float
    trials: int
    counts: ConfusionCounts
    symbol_errors: int = 0
    mean_nodes_visited: Optional[float] = None


def _pair(x_true, x_hat) -> tuple[np.ndarray, np.ndarray]:
    x_true = np.asarray(x_true, dtype=float).reshape(-1)
    x_hat = np.asarray(x_hat, dtype=float).reshape(-1)
    if x_true.shape != x_hat.shape:
        raise ValueError(f"length mismatch: {x_true.shape[0]} vs {x_hat.shape[0]}")
    return x_true, x_hat


def score_confusion(x_true, x_hat) -> ConfusionCounts:
    """Per-element activity outcome; data errors on active symbols still count as TA."""
    x_true, x_hat = _pair(x_true, x_hat)
    act, est = x_true != 0, x_hat != 0
    return ConfusionCounts(
        int(np.sum(act & est)),
        int(np.sum(~act & est)),
        int(np.sum(act & ~est)),
        int(np.sum(~act & ~est)),
    )


def gse(x_true, x_hat) -> float:
    """Fraction of positions where the detected symbol differs over ``A0``."""
    x_true, x_hat = _pair(x_true, x_hat)
    return float(np.mean(x_true != x_hat))


def aggregate(
    trials: Iterable[tuple[ConfusionCounts, float]],
    snr_db: float,
    omega: float,
    nodes_visited: Iterable[int] | None = None,
) -> RatePoint:
    """Pool per-trial ``(counts, gse)`` pairs into one rate point.

    Counts are summed before dividing, and the GSE is weighted by the
    number of symbols in each trial.
    """
    pooled = ConfusionCounts()
    errors = 0.0
    n = 0
    for counts, g in trials:
        pooled = pooled + counts
        errors += g * counts.total
        n += 1
    if n == 0:
        raise ValueError("aggregate needs at least one trial")
    mean_nodes = None
    if nodes_visited is not None:
        nodes = list(nodes_visited)
        mean_nodes = float(np.mean(nodes)) if nodes else None
    sym_errors = int(round(errors))
    return RatePoint(
        snr_db=snr_db,
        omega=omega,
        tar=pooled.tar,
        far=pooled.far,
        gse=sym_errors / pooled.total,
        trials=n,
        counts=pooled,
        symbol_errors=sym_errors,
        mean_nodes_visited=mean_nodes,
    )
