"""Overloaded CDMA scenario generator.

K sporadically active nodes spread BPSK symbols with random +-1/sqrt(N)
sequences and transmit over independent real Rayleigh channels with L_h
taps. The receiver sees ``y = T x + w`` with ``T`` of shape
``(N + L_h - 1) x K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linsys import LinearSystem
from .model import BPSK, AugmentedAlphabet

__all__ = [
    "CdmaConfig",
    "Frame",
    "draw_spreading",
    "draw_channel",
    "build_t",
    "draw_sources",
    "noise_var_from_snr",
    "draw_frame",
]


@dataclass(frozen=True)
class CdmaConfig:
    num_nodes: int = 20
    spreading_gain: int = 5
    channel_taps: int = 4
    activity_prob: float = 0.2
    snr_db: float = 10.0
    alphabet: AugmentedAlphabet = field(default=BPSK)

    def __post_init__(self):
        for name in ("num_nodes", "spreading_gain", "channel_taps"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not 0.0 < self.activity_prob < 1.0:
            raise ValueError(f"activity_prob must lie in (0, 1), got {self.activity_prob}")
        if math.isnan(self.snr_db):
            raise ValueError("snr_db is NaN")

    @property
    def obs_dim(self) -> int:
        return self.spreading_gain + self.channel_taps - 1


@dataclass(frozen=True, eq=False)
class Frame:
    system: LinearSystem
    x_true: np.ndarray
    noise_var: float


def draw_spreading(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """Random +-1/sqrt(n) chips; every column has unit norm."""
    signs = rng.integers(0, 2, size=(n, k)) * 2 - 1
    return signs / math.sqrt(n)


def draw_channel(rng: np.random.Generator, taps: int, k: int) -> np.ndarray:
    """Gaussian taps of variance 1/taps, i.e. unit expected energy per node."""
    return rng.standard_normal((taps, k)) / math.sqrt(taps)


def build_t(spreading: np.ndarray, channel: np.ndarray) -> np.ndarray:
    """Column-wise full linear convolution of spreading codes with channels."""
    spreading = np.asarray(spreading, dtype=float)
    channel = np.asarray(channel, dtype=float)
    n, k = spreading.shape
    taps, k2 = channel.shape
    if k != k2:
        raise ValueError(f"spreading has {k} columns, channel has {k2}")
    t = np.zeros((n + taps - 1, k))
    for l in range(taps):
        t[l : l + n] += channel[l] * spreading
    return t


def draw_sources(rng: np.random.Generator, k: int, activity_prob: float, alphabet: AugmentedAlphabet = BPSK) -> np.ndarray:
    active = rng.random(k) < activity_prob
    data = np.array(alphabet.data_symbols)[rng.integers(0, alphabet.size, size=k)]
    return np.where(active, data, 0.0)


def noise_var_from_snr(snr_db: float) -> float:
    """``10^(-snr/10)``; ``+inf`` dB disables the noise."""
    if snr_db == math.inf:
        return 0.0
    return 10.0 ** (-snr_db / 10.0)


def draw_frame(rng: np.random.Generator, config: CdmaConfig) -> Frame:
    k = config.num_nodes
    t = build_t(
        draw_spreading(rng, config.spreading_gain, k),
        draw_channel(rng, config.channel_taps, k),
    )
    x = draw_sources(rng, k, config.activity_prob, config.alphabet)
    noise_var = noise_var_from_snr(config.snr_db)
    y = t @ x
    if noise_var > 0:
        y = y + math.sqrt(noise_var) * rng.standard_normal(t.shape[0])
    return Frame(LinearSystem(t, y), x, noise_var)
