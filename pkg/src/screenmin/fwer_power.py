"""Finite-sample FWER and power of ScreenMin with a fixed selection threshold."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .probmodel import AltModel
from .screening import (
    MAX_EXACT_M,
    HypothesisMix,
    expected_selected,
    p0,
    selected_size_pmf,
    size_pmf_from_counts,
)


@dataclass(frozen=True)
class ErrorPowerReport:
    c: float
    alpha: float
    fwer_bound: float
    fwer_approx: float
    power: float
    expected_selected: float
    fwer_exact: bool
    """True when the bound is the exact FWER (all pairs ONE_NONNULL, or no true union null)."""
    power_approximate: bool
    """True when m exceeded the exact-pmf cap and power used the E|S| plug-in."""

    @property
    def fwer_label(self) -> str:
        return "exact" if self.fwer_exact else "bound"


def _check_alpha(alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return float(alpha)


def _check_c(c: float) -> float:
    if not 0.0 < c <= 1.0:
        raise ValueError(f"c must lie in (0, 1], got {c}")
    return float(c)


def _union_fwer(p: np.ndarray, k) -> np.ndarray:
    """1 - (1 - p)^k without cancellation for small p."""
    p = np.minimum(p, 1.0)
    with np.errstate(divide="ignore"):
        return np.where(p >= 1.0, 1.0, -np.expm1(k * np.log1p(-np.where(p >= 1.0, 0.0, p))))


def fwer_upper_bound(c: float, alpha: float, mix: HypothesisMix, model: AltModel, m: int) -> float:
    """E[{1 - (1 - P0(alpha/|S|, c))^|S|} 1{|S| > 0}] over the exact |S| distribution.

    Equals the FWER of fixed-threshold ScreenMin when every pair is ONE_NONNULL.
    Returns 0 when the mix has no true union nulls.
    """
    c, alpha = _check_c(c), _check_alpha(alpha)
    m0, m1, _ = mix.counts(m)
    if m0 + m1 == 0:
        return 0.0
    pmf = selected_size_pmf(c, mix, model, m).pmf
    s = np.arange(1, len(pmf))
    per_size = _union_fwer(np.asarray(p0(alpha / s, c, model)), s)
    return float(np.clip(pmf[1:] @ per_size, 0.0, 1.0))


def fwer_approx(c: float, alpha: float, mix: HypothesisMix, model: AltModel, m: int) -> float:
    """Plug-in FWER 1 - {1 - P0(alpha/E|S|, c)}^E|S| with real-valued E|S(c)|.

    When E|S(c)| < alpha the testing threshold exceeds 1 and is clipped there,
    giving an approximate FWER of 1.
    """
    c, alpha = _check_c(c), _check_alpha(alpha)
    es = float(expected_selected(c, mix, model, m))
    if es <= 0.0:
        raise ValueError("fwer_approx is undefined when E|S(c)| = 0")
    u = min(alpha / es, 1.0)
    return float(_union_fwer(np.asarray(p0(u, c, model)), es))


def rejection_prob_conditional(s, c: float, alpha: float, model: AltModel):
    """Pr(max <= alpha/s, min <= c) for a BOTH_NONNULL pair given |S| = s.

    ``s`` may be an array and need not be integer (the E|S| plug-in uses real
    values). Zero for s = 0.
    """
    c, alpha = _check_c(c), _check_alpha(alpha)
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("selected-set size must be nonnegative")
    pos = s > 0
    x = np.minimum(alpha / np.where(pos, s, 1.0), 1.0)
    f1c, f2c = model.cdf(c), model.cdf2(c)
    f1x, f2x = np.asarray(model.cdf(x)), np.asarray(model.cdf2(x))
    wide = f1c * f2x + f2c * f1x - f1c * f2c
    narrow = f1x * f2x
    out = np.where(pos, np.where(c * s <= alpha, wide, narrow), 0.0)
    return float(out) if out.ndim == 0 else out


def power_unconditional(c: float, alpha: float, mix: HypothesisMix, model: AltModel, m: int,
                        exact: bool | None = None) -> float:
    """Probability that a given BOTH_NONNULL pair is rejected.

    With the pair selected, |S| = 1 + (number selected among the other m - 1
    pairs), and the latter is independent of the pair itself; the conditional
    rejection probability is averaged over that count. ``exact=None`` takes
    this exact path when m is within the pmf cap and otherwise the plug-in
    ``rejection_prob_conditional(E|S(c)|, ...)``. Zero when there are no
    BOTH_NONNULL pairs.
    """
    c, alpha = _check_c(c), _check_alpha(alpha)
    m0, m1, m2 = mix.counts(m)
    if m2 == 0:
        return 0.0
    if exact is None:
        exact = m <= MAX_EXACT_M
    if not exact:
        return power_plugin(c, alpha, mix, model, m)
    others = size_pmf_from_counts(c, (m0, m1, m2 - 1), model).pmf
    s = np.arange(1, len(others) + 1)
    return float(np.clip(others @ rejection_prob_conditional(s, c, alpha, model), 0.0, 1.0))


def power_plugin(c: float, alpha: float, mix: HypothesisMix, model: AltModel, m: int) -> float:
    """Power objective with E|S(c)| substituted for |S|."""
    es = float(expected_selected(_check_c(c), mix, model, m))
    return rejection_prob_conditional(es, c, alpha, model)


def bonferroni_power(alpha: float, model: AltModel, m: int) -> float:
    """Power of Bonferroni on the maxima for a BOTH_NONNULL pair: F1(a/m) F2(a/m)."""
    x = _check_alpha(alpha) / m
    return float(model.cdf(x) * model.cdf2(x))


def error_power_report(c: float, alpha: float, mix: HypothesisMix, model: AltModel, m: int) -> ErrorPowerReport:
    m0, m1, m2 = mix.counts(m)
    exact_pmf = m <= MAX_EXACT_M
    es = float(expected_selected(c, mix, model, m))
    bound = fwer_upper_bound(c, alpha, mix, model, m) if exact_pmf else math.nan
    return ErrorPowerReport(
        c=float(c),
        alpha=float(alpha),
        fwer_bound=bound,
        fwer_approx=fwer_approx(c, alpha, mix, model, m) if es > 0 else math.nan,
        power=power_unconditional(c, alpha, mix, model, m),
        expected_selected=es,
        fwer_exact=(m0 == 0 and m2 == 0) or (m0 + m1 == 0),
        power_approximate=not exact_pmf,
    )


__all__ = [
    "ErrorPowerReport",
    "bonferroni_power",
    "error_power_report",
    "fwer_approx",
    "fwer_upper_bound",
    "power_plugin",
    "power_unconditional",
    "rejection_prob_conditional",
]
