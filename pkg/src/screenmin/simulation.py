"""Seeded Monte Carlo estimation of FWER and power.

Each replication draws from its own Philox (counter-based) stream keyed by
``(seed, rep_index)``, so results do not depend on how replications are
distributed over workers.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .probmodel import AltModel, normal_cdf, normal_quantile
from .screening import HypothesisMix, PairType
from .testing import PValueMatrix, bonferroni_max, screenmin
from .thresholds import ThresholdSpec, default_threshold, oracle_threshold

PROCEDURES = ("oracle", "adafilter", "default", "fixed", "bonferroni")
DEFAULT_PROCEDURES = ("oracle", "adafilter", "default", "bonferroni")

_TWO53 = float(2 ** 53)


@dataclass(frozen=True)
class SimConfig:
    m: int
    mix: HypothesisMix
    snr1: float
    snr2: Optional[float] = None
    rho: float = 0.0
    n_reps: int = 1000
    alpha: float = 0.05
    seed: int = 0
    procedures: tuple = DEFAULT_PROCEDURES
    oracle_method: str = "constraint"
    fixed_c: Optional[float] = None
    random_side: bool = False

    def __post_init__(self):
        if self.m < 1 or self.n_reps < 1:
            raise ValueError("m and n_reps must be positive")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "procedures", tuple(self.procedures))
        for p in self.procedures:
            if p not in PROCEDURES:
                raise ValueError(f"unknown procedure {p!r}")
        if "fixed" in self.procedures and not (self.fixed_c and 0.0 < self.fixed_c <= 1.0):
            raise ValueError("procedure 'fixed' needs fixed_c in (0, 1]")
        AltModel(self.snr1, self.snr2)

    @property
    def model(self) -> AltModel:
        return AltModel(self.snr1, self.snr2)

    @property
    def counts(self) -> tuple[int, int, int]:
        return self.mix.counts(self.m)


@dataclass(frozen=True)
class ProcedureEstimate:
    fwer: float
    fwer_se: float
    power: float
    power_se: float


@dataclass(frozen=True)
class SimResult:
    config: SimConfig
    estimates: dict
    n_reps: int
    oracle_c: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def rows(self) -> list[dict]:
        """One flat record per procedure."""
        cfg = asdict(self.config)
        mix = cfg.pop("mix")
        cfg.pop("procedures")
        base = {**cfg, "pi0": mix["pi0"], "pi1": mix["pi1"], "pi2": mix["pi2"]}
        return [{**base, "procedure": name, **asdict(est)} for name, est in self.estimates.items()]


class SimulationError(RuntimeError):
    def __init__(self, rep_index: int, cause: Exception):
        super().__init__(f"replication {rep_index} failed: {cause!r}")
        self.rep_index = rep_index


def _uniforms(seed: int, rep_index: int, stream: int, n: int) -> np.ndarray:
    ss = np.random.SeedSequence(seed, spawn_key=(rep_index, stream))
    raw = np.random.Philox(ss).random_raw(n)
    # 53 high bits, centred in their cell: strictly inside (0, 1)
    return ((raw >> np.uint64(11)).astype(float) + 0.5) / _TWO53


def generate_pmatrix(config: SimConfig, rep_index: int) -> PValueMatrix:
    """One simulated m x 2 p-value matrix with truth labels.

    Rows are ordered BOTH_NULL, ONE_NONNULL, BOTH_NONNULL. Within a column the
    statistics share a common factor: Z = sqrt(rho) W + sqrt(1 - rho) e + shift.
    Uniform draws are consumed in the fixed order (W1, W2, then row-major e).
    """
    m = config.m
    m0, m1, m2 = config.counts
    u = _uniforms(config.seed, rep_index, 0, 2 + 2 * m)
    z = normal_quantile(u)
    common, eps = z[:2], z[2:].reshape(m, 2)

    s2 = config.snr1 if config.snr2 is None else config.snr2
    shift = np.zeros((m, 2))
    shift[m0:m0 + m1, 0] = config.snr1
    shift[m0 + m1:, 0] = config.snr1
    shift[m0 + m1:, 1] = s2
    if config.random_side and m1:
        flip = _uniforms(config.seed, rep_index, 1, m1) < 0.5
        rows = np.arange(m0, m0 + m1)[flip]
        shift[rows, 0] = 0.0
        shift[rows, 1] = s2

    stat = math.sqrt(config.rho) * common + math.sqrt(1.0 - config.rho) * eps + shift
    labels = np.repeat(np.array(list(PairType), dtype=np.int8), [m0, m1, m2])
    return PValueMatrix(normal_cdf(-stat), labels)


def _specs(config: SimConfig, oracle_c: Optional[float]) -> dict:
    specs = {}
    for name in config.procedures:
        if name == "oracle":
            specs[name] = ThresholdSpec.fixed(oracle_c)
        elif name == "adafilter":
            specs[name] = ThresholdSpec.adaptive()
        elif name == "default":
            specs[name] = ThresholdSpec.default()
        elif name == "fixed":
            specs[name] = ThresholdSpec.fixed(config.fixed_c)
        else:
            specs[name] = None
    return specs


def oracle_for(config: SimConfig) -> float:
    """Oracle threshold given the true mix; with unequal SNRs the model assumes snr1 for all."""
    res = oracle_threshold(config.alpha, config.mix, AltModel(config.snr1), config.m,
                           config.oracle_method)
    return res.c


def _run_block(config: SimConfig, oracle_c, start: int, stop: int):
    specs = _specs(config, oracle_c)
    n, k = stop - start, len(specs)
    fwer = np.zeros((n, k), dtype=bool)
    power = np.zeros((n, k))
    m2 = config.counts[2]
    for r in range(start, stop):
        try:
            mat = generate_pmatrix(config, r)
            false_union = mat.labels == PairType.BOTH_NONNULL
            for j, spec in enumerate(specs.values()):
                if spec is None:
                    res = bonferroni_max(mat, config.alpha)
                else:
                    res = screenmin(mat, spec, config.alpha)
                hit = false_union[res.rejected]
                fwer[r - start, j] = not hit.all()
                power[r - start, j] = hit.sum() / m2 if m2 else 0.0
        except Exception as exc:  # noqa: BLE001
            raise SimulationError(r, exc) from exc
    return fwer, power


def default_workers() -> int:
    return max(1, int(os.environ.get("SCREENMIN_THREADS", "1")))


def run_simulation(config: SimConfig, workers: Optional[int] = None) -> SimResult:
    """Estimate FWER and power of each configured procedure.

    FWER is the fraction of replications with at least one rejected true union
    null; power is the fraction of BOTH_NONNULL rows rejected, averaged over
    replications. Output is identical for any ``workers``.
    """
    workers = default_workers() if workers is None else workers
    oracle_c = oracle_for(config) if "oracle" in config.procedures else None
    n = config.n_reps
    if workers <= 1 or n < 2 * workers:
        fwer, power = _run_block(config, oracle_c, 0, n)
    else:
        edges = np.linspace(0, n, workers + 1).astype(int)
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_run_block, [config] * workers, [oracle_c] * workers,
                                  edges[:-1].tolist(), edges[1:].tolist()))
        fwer = np.concatenate([p[0] for p in parts])
        power = np.concatenate([p[1] for p in parts])

    estimates = {}
    m2 = config.counts[2]
    for j, name in enumerate(config.procedures):
        f = float(fwer[:, j].mean())
        if m2:
            pw = float(power[:, j].mean())
            pw_se = float(power[:, j].std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        else:
            pw, pw_se = 0.0, 0.0
        estimates[name] = ProcedureEstimate(f, math.sqrt(f * (1.0 - f) / n), pw, pw_se)
    extra = {"default_c": default_threshold(config.alpha, config.m)}
    return SimResult(config, estimates, n, oracle_c, extra)
