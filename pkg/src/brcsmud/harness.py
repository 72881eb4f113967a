"""Monte Carlo sweeps comparing the sphere detector against BPDN.

Every trial draws its frame from a generator seeded by a stable hash of
``(base_seed, snr_db, n, trial)``. Omega and the detector are left out of
the hash on purpose: all detectors and all Bayes factors at a given
``(snr_db, n)`` cell score exactly the same frames.
"""

from __future__ import annotations

import csv
import hashlib
import logging
import math
import struct
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .baseline import BpdnConfig, bpdn_solve, quantize, universal_threshold
from .cdma import CdmaConfig, Frame, draw_frame
from .detector import detect, exhaustive_detect
from .linsys import LinearSystem
from .metrics import RatePoint, aggregate, gse, score_confusion
from .model import BPSK, AugmentedAlphabet, DetectionParams

log = logging.getLogger(__name__)

__all__ = [
    "DETECTORS",
    "SWEEP_HEADER",
    "ROC_HEADER",
    "ConfigError",
    "TrialError",
    "ExperimentConfig",
    "load_config",
    "trial_rng",
    "frame_digest",
    "run_point",
    "run_sweep",
    "emit_roc",
    "oracle_equivalence",
]

DETECTORS = ("brcsmud", "bpdn")

SWEEP_HEADER = (
    "detector,n,omega,snr_db,trials,gse,tar,far,true_active,false_active,"
    "false_inactive,true_inactive,mean_nodes_visited"
).split(",")
ROC_HEADER = ["omega", "snr_db", "far", "tar"]

# Detector-side noise variance when frames are generated noise free.
NOISE_FLOOR = 1e-12


class ConfigError(ValueError):
    pass


class TrialError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    num_nodes: int = 20
    channel_taps: int = 4
    activity_prob: float = 0.2
    alphabet: AugmentedAlphabet = field(default=BPSK)
    omega_list: tuple[float, ...] = (1.0,)
    snr_db_list: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)
    spreading_gain_list: tuple[int, ...] = (5,)
    trials_per_point: int = 10_000
    base_seed: int = 0
    detectors: tuple[str, ...] = DETECTORS
    reg_weight: float | None = None
    max_iters: int = 500
    rel_tol: float = 1e-6
    quant_threshold: float = 0.5
    output_path: str = "sweep.csv"

    def __post_init__(self):
        for name in ("omega_list", "snr_db_list", "spreading_gain_list", "detectors"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must not be empty")
        if self.trials_per_point < 1:
            raise ConfigError(f"trials_per_point must be >= 1, got {self.trials_per_point}")
        if not 0 <= self.base_seed < 2**64:
            raise ConfigError(f"base_seed must be an unsigned 64-bit integer, got {self.base_seed}")
        unknown = set(self.detectors) - set(DETECTORS)
        if unknown:
            raise ConfigError(f"unknown detectors {sorted(unknown)}; choose from {DETECTORS}")
        if any(not w > 0 for w in self.omega_list):
            raise ConfigError("omega values must be positive")
        try:
            self.cdma(self.spreading_gain_list[0], self.snr_db_list[0])
            self.bpdn_config(1.0)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def cdma(self, n: int, snr_db: float) -> CdmaConfig:
        return CdmaConfig(
            num_nodes=self.num_nodes,
            spreading_gain=n,
            channel_taps=self.channel_taps,
            activity_prob=self.activity_prob,
            snr_db=snr_db,
            alphabet=self.alphabet,
        )

    def bpdn_config(self, noise_var: float) -> BpdnConfig:
        gamma = self.reg_weight
        if gamma is None:
            gamma = universal_threshold(max(noise_var, NOISE_FLOOR), self.num_nodes)
        return BpdnConfig(gamma, self.max_iters, self.rel_tol, self.quant_threshold)


def _split(text: str) -> list[str]:
    return [tok.strip() for tok in text.split(",") if tok.strip()]


_PARSERS = {
    "num_nodes": int,
    "channel_taps": int,
    "activity_prob": float,
    "alphabet": AugmentedAlphabet.parse,
    "omega_list": lambda s: tuple(float(v) for v in _split(s)),
    "snr_db_list": lambda s: tuple(float(v) for v in _split(s)),
    "spreading_gain_list": lambda s: tuple(int(v) for v in _split(s)),
    "trials_per_point": int,
    "base_seed": int,
    "detectors": lambda s: tuple(_split(s)),
    "reg_weight": lambda s: None if s.strip().lower() in ("", "auto") else float(s),
    "max_iters": int,
    "rel_tol": float,
    "quant_threshold": float,
    "output_path": str,
}
assert set(_PARSERS) == {f.name for f in fields(ExperimentConfig)}


def parse_settings(pairs: dict[str, str], base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Apply ``key -> raw string`` settings on top of ``base``."""
    values = {}
    for key, raw in pairs.items():
        if key not in _PARSERS:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            values[key] = _PARSERS[key](raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from exc
    try:
        return replace(base or ExperimentConfig(), **values)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    """Read a flat ``key = value`` file; ``#`` starts a comment."""
    pairs: dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            pairs[key] = value
    pairs.update(overrides or {})
    return parse_settings(pairs)


def _float_key(value: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", float(value)))[0]


def trial_rng(base_seed: int, snr_db: float, n: int, trial: int) -> np.random.Generator:
    """Independent generator per trial, stable across runs and execution order."""
    seq = np.random.SeedSequence(base_seed, spawn_key=(_float_key(snr_db), int(n), int(trial)))
    return np.random.default_rng(seq)


def frame_digest(frame: Frame) -> str:
    h = hashlib.sha256()
    for arr in (frame.system.matrix, frame.system.observation, frame.x_true):
        h.update(np.ascontiguousarray(arr).tobytes())
    return h.hexdigest()[:16]


def _run_detector(detector: str, frame: Frame, config: ExperimentConfig, omega: float) -> tuple[np.ndarray, int | None]:
    noise_var = max(frame.noise_var, NOISE_FLOOR)
    if detector == "brcsmud":
        params = DetectionParams(config.activity_prob, noise_var, omega, config.alphabet)
        res = detect(frame.system, params)
        return res.x_hat, res.nodes_visited
    bcfg = config.bpdn_config(frame.noise_var)
    x_cont = bpdn_solve(frame.system, bcfg)
    return quantize(x_cont, config.alphabet, bcfg.quant_threshold), None


def run_point(
    config: ExperimentConfig,
    snr_db: float,
    omega: float,
    n: int,
    detector: str,
    digests: list | None = None,
) -> RatePoint:
    """Run ``trials_per_point`` frames for one sweep cell and pool the scores."""
    if detector not in DETECTORS:
        raise ConfigError(f"unknown detector {detector!r}")
    cdma_cfg = config.cdma(n, snr_db)
    scored = []
    nodes = []
    for trial in range(config.trials_per_point):
        frame = draw_frame(trial_rng(config.base_seed, snr_db, n, trial), cdma_cfg)
        if digests is not None:
            digests.append(frame_digest(frame))
        try:
            x_hat, visited = _run_detector(detector, frame, config, omega)
        except Exception as exc:
            raise TrialError(
                f"{detector} failed at base_seed={config.base_seed} snr_db={snr_db} "
                f"n={n} trial={trial}: {exc}"
            ) from exc
        scored.append((score_confusion(frame.x_true, x_hat), gse(frame.x_true, x_hat)))
        if visited is not None:
            nodes.append(visited)
    return aggregate(scored, snr_db, omega, nodes if nodes else None)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".10g")


def sweep_row(detector: str, n: int, point: RatePoint) -> list[str]:
    c = point.counts
    return [
        detector,
        _fmt(n),
        _fmt(point.omega),
        _fmt(point.snr_db),
        _fmt(point.trials),
        _fmt(point.gse),
        _fmt(point.tar),
        _fmt(point.far),
        _fmt(c.true_active),
        _fmt(c.false_active),
        _fmt(c.false_inactive),
        _fmt(c.true_inactive),
        _fmt(point.mean_nodes_visited),
    ]


def run_sweep(config: ExperimentConfig, output_path: str | Path | None = None) -> Path:
    """Write one CSV row per (detector, n, omega, snr_db), in that sort order."""
    path = Path(output_path or config.output_path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        fh.flush()
        for detector in sorted(set(config.detectors)):
            for n in sorted(set(config.spreading_gain_list)):
                for omega in sorted(set(config.omega_list)):
                    for snr_db in sorted(set(config.snr_db_list)):
                        point = run_point(config, snr_db, omega, n, detector)
                        writer.writerow(sweep_row(detector, n, point))
                        fh.flush()
                        log.info("%s n=%d omega=%g snr=%g gse=%.4g", detector, n, omega, snr_db, point.gse)
    return path


def emit_roc(csv_in: str | Path, csv_out: str | Path, detector: str = "brcsmud") -> int:
    """Regroup sweep rows into per-omega ROC traces ordered by SNR.

    Rows with a missing rate are dropped; the number dropped is returned
    and logged.
    """
    rows = []
    dropped = 0
    with open(csv_in, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not set(ROC_HEADER) <= set(reader.fieldnames):
            raise ConfigError(f"{csv_in} is not a sweep CSV")
        for row in reader:
            if row.get("detector", detector) != detector:
                continue
            if row["far"] == "" or row["tar"] == "":
                dropped += 1
                continue
            rows.append(row)
    rows.sort(key=lambda r: (float(r["omega"]), float(r["snr_db"])))
    if dropped:
        log.warning("dropped %d rows with missing rates", dropped)
    with open(csv_out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ROC_HEADER)
        for r in rows:
            writer.writerow([r[c] for c in ROC_HEADER])
    return dropped


def oracle_equivalence(instances: int = 1000, seed: int = 0, tol: float = 1e-9) -> list[str]:
    """Compare ``detect`` against ``exhaustive_detect`` on random small systems.

    Returns a description of every disagreement (empty list when all agree).
    """
    rng = np.random.default_rng(seed)
    failures = []
    for i in range(instances):
        k = int(rng.integers(2, 7))
        m = max(1, k + int(rng.integers(-2, 3)))
        omega = float(rng.choice([0.01, 0.1, 1.0, 10.0, 100.0]))
        snr_db = float(rng.integers(0, 41))
        t = rng.standard_normal((m, k)) / math.sqrt(m)
        x = np.where(rng.random(k) < 0.2, rng.choice([-1.0, 1.0], size=k), 0.0)
        noise_var = 10 ** (-snr_db / 10)
        y = t @ x + math.sqrt(noise_var) * rng.standard_normal(m)
        system = LinearSystem(t, y)
        params = DetectionParams(0.2, noise_var, omega)
        fast = detect(system, params)
        slow = exhaustive_detect(system, params)
        if abs(fast.objective_value - slow.objective_value) > tol or not np.array_equal(fast.x_hat, slow.x_hat):
            failures.append(
                f"instance {i}: M={m} K={k} omega={omega} snr={snr_db} "
                f"sphere={fast.x_hat.tolist()} ({fast.objective_value:.12g}) "
                f"oracle={slow.x_hat.tolist()} ({slow.objective_value:.12g})"
            )
    return failures
