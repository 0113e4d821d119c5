"""Distributions induced by screening pairs on their minimum p-value."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .probmodel import AltModel

#: Largest m for which the exact distribution of |S| is computed.
MAX_EXACT_M = 10_000


class PairType(enum.IntEnum):
    """Truth state of a hypothesis pair.

    (0,1) and (1,0) are merged into ``ONE_NONNULL``; the false component of such
    a pair is taken to be in column 1.
    """

    BOTH_NULL = 0
    ONE_NONNULL = 1
    BOTH_NONNULL = 2

    @property
    def union_null_true(self) -> bool:
        return self is not PairType.BOTH_NONNULL


class SizeCapError(ValueError):
    """Raised when an exact |S| distribution is requested for m > MAX_EXACT_M."""


@dataclass(frozen=True)
class HypothesisMix:
    """Proportions of BOTH_NULL, ONE_NONNULL and BOTH_NONNULL pairs."""

    pi0: float
    pi1: float
    pi2: float

    def __post_init__(self):
        for p in (self.pi0, self.pi1, self.pi2):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"mix proportions must lie in [0, 1], got {p}")
        if abs(self.pi0 + self.pi1 + self.pi2 - 1.0) > 1e-12:
            raise ValueError("mix proportions must sum to 1")

    @classmethod
    def from_counts(cls, m0: int, m1: int, m2: int) -> "HypothesisMix":
        m = m0 + m1 + m2
        return cls(m0 / m, m1 / m, 1.0 - m0 / m - m1 / m)

    def counts(self, m: int) -> tuple[int, int, int]:
        """Integer type counts: m0 and m2 rounded, m1 takes the remainder."""
        m0 = int(round(m * self.pi0))
        m2 = int(round(m * self.pi2))
        m1 = m - m0 - m2
        if m1 < 0:
            # both roundings went up; give the excess back to the larger class
            if m0 >= m2:
                m0 += m1
            else:
                m2 += m1
            m1 = 0
        return m0, m1, m2


@dataclass(frozen=True)
class SelectedSizeDistribution:
    pmf: np.ndarray

    @property
    def m(self) -> int:
        return len(self.pmf) - 1

    @property
    def support(self) -> np.ndarray:
        return np.arange(len(self.pmf))

    @property
    def mean(self) -> float:
        return float(self.support @ self.pmf)

    @property
    def var(self) -> float:
        k = self.support
        return float((k * k) @ self.pmf - self.mean ** 2)


def _check_prob(x, name, lo_open=False):
    x = np.asarray(x, dtype=float)
    ok = (x > 0.0) if lo_open else (x >= 0.0)
    if np.any(~(ok & (x <= 1.0))):
        interval = "(0, 1]" if lo_open else "[0, 1]"
        raise ValueError(f"{name} must lie in {interval}")
    return x


def component_cdfs(pair_type: PairType, model: AltModel):
    """CDFs of (p1, p2) for a pair of the given type."""
    ident = lambda u: np.asarray(u, dtype=float)  # noqa: E731
    if pair_type is PairType.BOTH_NULL:
        return ident, ident
    if pair_type is PairType.ONE_NONNULL:
        return model.cdf, ident
    return model.cdf, model.cdf2


def selection_prob(c, pair_type: PairType, model: AltModel):
    """Pr(min(p1, p2) <= c) for a pair of ``pair_type``."""
    c = _check_prob(c, "c")
    g1, g2 = component_cdfs(PairType(pair_type), model)
    a, b = np.asarray(g1(c)), np.asarray(g2(c))
    out = b + a * (1.0 - b)
    return float(out) if out.ndim == 0 else out


def joint_cdf(u, c, pair_type: PairType, model: AltModel):
    """Pr(max <= u, min <= c) for a pair of ``pair_type``."""
    u = _check_prob(u, "u")
    c = _check_prob(c, "c")
    g1, g2 = component_cdfs(PairType(pair_type), model)
    u, c = np.broadcast_arrays(u, c)
    g1u, g2u = np.asarray(g1(u)), np.asarray(g2(u))
    g1c, g2c = np.asarray(g1(c)), np.asarray(g2(c))
    below = g1u * g2u
    above = g1c * g2u + g2c * g1u - g1c * g2c
    out = np.where(u <= c, below, above)
    return float(out) if out.ndim == 0 else out


def cond_max_cdf(u, c, pair_type: PairType, model: AltModel):
    """Pr(max(p1, p2) <= u | min(p1, p2) <= c).

    For ONE_NONNULL this is the conditional null distribution ``P0(u, c)`` of
    the maximum after selection. The BOTH_NONNULL case uses the same joint
    distribution identities with both components non-null.
    """
    _check_prob(u, "u", lo_open=True)
    _check_prob(c, "c", lo_open=True)
    num = np.asarray(joint_cdf(u, c, pair_type, model))
    den = np.asarray(selection_prob(c, pair_type, model))
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), 1.0)
    out = np.minimum(out, 1.0)
    return float(out) if out.ndim == 0 else out


def p0(u, c, model: AltModel):
    """Shorthand for the ONE_NONNULL conditional CDF ``P0(u, c)``."""
    return cond_max_cdf(u, c, PairType.ONE_NONNULL, model)


def _check_m(m) -> int:
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    return int(m)


def expected_selected(c, mix: HypothesisMix, model: AltModel, m: int):
    """E|S(c)| = m * sum_k pi_k * Pr(type k selected)."""
    m = _check_m(m)
    s0 = selection_prob(c, PairType.BOTH_NULL, model)
    s1 = selection_prob(c, PairType.ONE_NONNULL, model)
    s2 = selection_prob(c, PairType.BOTH_NONNULL, model)
    return m * (mix.pi0 * s0 + mix.pi1 * s1 + mix.pi2 * s2)


def selected_size_pmf(c: float, mix: HypothesisMix, model: AltModel, m: int) -> SelectedSizeDistribution:
    """Exact distribution of |S(c)|: a convolution of three binomials.

    Type counts come from :meth:`HypothesisMix.counts`.
    """
    m = _check_m(m)
    return size_pmf_from_counts(c, mix.counts(m), model)


def size_pmf_from_counts(c: float, counts: tuple[int, int, int], model: AltModel) -> SelectedSizeDistribution:
    """Distribution of the number selected among ``counts`` pairs of each type."""
    if sum(counts) > MAX_EXACT_M:
        raise SizeCapError(f"exact |S| distribution capped at m={MAX_EXACT_M}, got m={sum(counts)}")
    c = float(_check_prob(c, "c"))
    pmf = np.ones(1)
    for count, t in zip(counts, PairType):
        if count == 0:
            continue
        q = selection_prob(c, t, model)
        pmf = np.convolve(pmf, binom.pmf(np.arange(count + 1), count, q))
    pmf = np.clip(pmf, 0.0, None)
    pmf /= pmf.sum()
    return SelectedSizeDistribution(pmf)
