"""Augmented alphabet, detection parameters and the penalty calculus.

The detector minimizes ``||y - T x||^2 + lambda * ||x||_0`` over the
augmented alphabet ``A0 = A u {0}``. The penalty ``lambda`` folds the
activity prior, the noise variance and the ratio of false-active to
false-inactive costs (the Bayes factor ``omega``) into one scalar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

__all__ = [
    "AugmentedAlphabet",
    "DetectionParams",
    "BPSK",
    "cost_weight",
    "penalty_lambda",
    "penalty_theta",
]

_MODULUS_TOL = 1e-12


@dataclass(frozen=True)
class AugmentedAlphabet:
    """Data symbols ``A`` plus the zero symbol that models inactivity.

    Candidates are always enumerated as ``[0, *sorted(A)]``; this order is
    the tie-break order used by every detector in the package.
    """

    data_symbols: tuple[float, ...]

    def __init__(self, data_symbols: Sequence[float]):
        symbols = tuple(sorted(float(a) for a in data_symbols))
        if not symbols:
            raise ValueError("alphabet needs at least one data symbol")
        if any(a == 0.0 for a in symbols):
            raise ValueError("0 is reserved for inactivity and cannot be a data symbol")
        if len(set(symbols)) != len(symbols):
            raise ValueError(f"data symbols must be distinct, got {symbols}")
        modulus = abs(symbols[0])
        if any(abs(abs(a) - modulus) > _MODULUS_TOL for a in symbols):
            raise ValueError(f"data symbols must have constant modulus, got {symbols}")
        object.__setattr__(self, "data_symbols", symbols)

    @property
    def size(self) -> int:
        """Number of data symbols, ``|A|``."""
        return len(self.data_symbols)

    @property
    def modulus(self) -> float:
        return abs(self.data_symbols[0])

    @property
    def is_unit_modulus(self) -> bool:
        return abs(self.modulus - 1.0) <= _MODULUS_TOL

    @property
    def symbols(self) -> tuple[float, ...]:
        """``A0`` in enumeration order: zero first, then ``A`` ascending."""
        return (0.0,) + self.data_symbols

    def __contains__(self, value: object) -> bool:
        return value in self.symbols

    def is_active(self, value: float) -> bool:
        return value in self.data_symbols

    def check(self, value: float) -> None:
        if value not in self.symbols:
            raise ValueError(f"{value!r} is not in the augmented alphabet {self.symbols}")

    @classmethod
    def parse(cls, text: str) -> "AugmentedAlphabet":
        """Build from a comma separated list such as ``"-1,1"``."""
        return cls([float(tok) for tok in text.split(",") if tok.strip()])


BPSK = AugmentedAlphabet((-1.0, 1.0))


@dataclass(frozen=True)
class DetectionParams:
    """Prior, noise level and Bayes factor for one detection problem.

    Parameters
    ----------
    activity_prob : float
        Probability ``p_a`` that a user is active, strictly in (0, 1).
    noise_var : float
        Noise variance ``sigma_n^2`` (> 0).
    bayes_factor : float
        ``omega = C_Fa / C_Fi``. Values above 1 give a conservative
        detector, values below 1 a liberal one.
    alphabet : AugmentedAlphabet
    """

    activity_prob: float
    noise_var: float
    bayes_factor: float = 1.0
    alphabet: AugmentedAlphabet = BPSK

    def __post_init__(self):
        if not 0.0 < self.activity_prob < 1.0:
            raise ValueError(f"activity_prob must lie in (0, 1), got {self.activity_prob}")
        if not self.noise_var > 0.0:
            raise ValueError(f"noise_var must be positive, got {self.noise_var}")
        if not self.bayes_factor > 0.0:
            raise ValueError(f"bayes_factor must be positive, got {self.bayes_factor}")

    @property
    def penalty(self) -> float:
        return penalty_lambda(self)

    @property
    def theta(self) -> float:
        return penalty_theta(self)


def cost_weight(x_k: float, c_fa: float, c_fi: float, alphabet: AugmentedAlphabet = BPSK) -> float:
    """Cost attached to hypothesis ``x_k``: ``C_Fi`` if active, ``C_Fa`` if zero."""
    alphabet.check(x_k)
    if c_fa <= 0 or c_fi <= 0:
        raise ValueError("costs must be positive")
    active = 1 if alphabet.is_active(x_k) else 0
    return c_fi**active * c_fa ** (1 - active)


def penalty_lambda(params: DetectionParams) -> float:
    """``2 sigma^2 ln(omega (1 - p_a) |A| / p_a)``; negative for small omega."""
    p_a = params.activity_prob
    ratio = params.bayes_factor * (1.0 - p_a) * params.alphabet.size / p_a
    return 2.0 * params.noise_var * math.log(ratio)


def penalty_theta(params: DetectionParams) -> float:
    """Penalty left over once the identity block absorbs ``||x||_2^2``."""
    return penalty_lambda(params) - 1.0
