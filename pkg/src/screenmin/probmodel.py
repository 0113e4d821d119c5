"""Standard normal CDF/quantile and the non-null p-value distribution.

All functions accept scalars or array-likes. Scalars in give Python floats out.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import erfc

# Rational approximation of the normal quantile (P. J. Acklam), relative error
# below 1.15e-9 before refinement.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425
_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


def _scalar_or_array(x: np.ndarray):
    return float(x) if x.ndim == 0 else x


def normal_cdf(z):
    """Standard normal CDF, ``0.5 * erfc(-z / sqrt(2))``.

    The complementary error function keeps full relative precision in the
    lower tail, so ``normal_cdf(-z)`` is the preferred way to form an upper
    tail probability ``1 - Phi(z)``. Absolute error is below 1e-15 everywhere.
    """
    z = np.asarray(z, dtype=float)
    return _scalar_or_array(0.5 * erfc(-z / _SQRT2))


def _poly(coef, x):
    out = np.zeros_like(x)
    for k in coef:
        out = out * x + k
    return out


def _acklam(p: np.ndarray) -> np.ndarray:
    x = np.empty_like(p)
    lo = p < _P_LOW
    hi = p > 1.0 - _P_LOW
    mid = ~(lo | hi)

    q = p[mid] - 0.5
    r = q * q
    x[mid] = q * _poly(_A, r) / (_poly(_B, r) * r + 1.0)

    q = np.sqrt(-2.0 * np.log(p[lo]))
    x[lo] = _poly(_C, q) / (_poly(_D, q) * q + 1.0)

    q = np.sqrt(-2.0 * np.log1p(-p[hi]))
    x[hi] = -_poly(_C, q) / (_poly(_D, q) * q + 1.0)
    return x


def normal_quantile(p):
    """Inverse of :func:`normal_cdf` on the open interval (0, 1).

    Acklam's rational approximation followed by one Newton step on
    ``Phi(x) - p``.

    Raises
    ------
    ValueError
        If any ``p`` lies outside (0, 1).
    """
    p = np.asarray(p, dtype=float)
    if np.any(~((p > 0.0) & (p < 1.0))):
        raise ValueError("normal_quantile requires 0 < p < 1")
    flat = np.atleast_1d(p).ravel()
    x = _acklam(flat)
    # Newton step; the density is evaluated at the current iterate.
    resid = 0.5 * erfc(-x / _SQRT2) - flat
    with np.errstate(over="ignore", invalid="ignore"):
        step = resid * _SQRT2PI * np.exp(0.5 * x * x)
    # density underflows beyond |x| ~ 37.6; the approximation stands there
    x = x - np.where(np.isfinite(step), step, 0.0)
    return _scalar_or_array(x.reshape(p.shape))


@dataclass(frozen=True)
class AltModel:
    """Normal mean-shift model for non-null one-sided p-values.

    A false component hypothesis has test statistic ``Z ~ N(snr, 1)`` and
    p-value ``1 - Phi(Z)``, so its CDF is ``F(u) = Phi(Phi^-1(u) + snr)``.
    ``snr2`` is the shift used for the second column when the two columns
    differ; by default both columns share ``snr``.

    Subclass and override :meth:`cdf` / :meth:`cdf2` to plug in another
    alternative; it must satisfy ``F(u) >= u``.
    """

    snr: float = 0.0
    snr2: Optional[float] = None

    def __post_init__(self):
        for s in (self.snr, self.snr2):
            if s is not None and not (s >= 0.0 and math.isfinite(s)):
                raise ValueError(f"snr must be finite and nonnegative, got {s}")

    @property
    def second_snr(self) -> float:
        return self.snr if self.snr2 is None else self.snr2

    @property
    def equal_snr(self) -> bool:
        return self.snr2 is None or self.snr2 == self.snr

    def cdf(self, u):
        """CDF of a non-null p-value in column 1."""
        return _shift_cdf(u, self.snr)

    def cdf2(self, u):
        """CDF of a non-null p-value in column 2."""
        return _shift_cdf(u, self.second_snr)


def _shift_cdf(u, snr: float):
    u = np.asarray(u, dtype=float)
    if np.any(~((u >= 0.0) & (u <= 1.0))):
        raise ValueError("p-value CDF argument must lie in [0, 1]")
    if snr == 0.0:
        return _scalar_or_array(u.copy())
    out = np.zeros_like(u)
    out[u >= 1.0] = 1.0
    inner = (u > 0.0) & (u < 1.0)
    if np.any(inner):
        out[inner] = normal_cdf(np.atleast_1d(normal_quantile(u[inner])) + snr)
    return _scalar_or_array(out)


def alt_cdf(u, model: AltModel):
    """Non-null p-value CDF ``F(u)`` of ``model`` (column 1)."""
    return model.cdf(u)
