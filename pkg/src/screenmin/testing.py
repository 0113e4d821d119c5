"""ScreenMin and the Bonferroni-on-maxima baseline applied to a p-value matrix."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .screening import PairType
from .thresholds import ThresholdResult, ThresholdSpec, resolve_threshold


@dataclass(frozen=True, eq=False)
class PValueMatrix:
    """m x 2 matrix of component p-values with optional truth labels and ids."""

    p: np.ndarray
    labels: Optional[np.ndarray] = None
    ids: Optional[Sequence[str]] = None

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 2 or p.shape[1] != 2:
            raise ValueError("p-value matrix must have shape (m, 2)")
        if p.shape[0] == 0:
            raise ValueError("p-value matrix is empty")
        if np.any(~((p >= 0.0) & (p <= 1.0))):
            raise ValueError("p-values must lie in [0, 1]")
        object.__setattr__(self, "p", p)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int8)
            if labels.shape != (p.shape[0],) or np.any((labels < 0) | (labels > 2)):
                raise ValueError("labels must be one PairType code per row")
            object.__setattr__(self, "labels", labels)
        if self.ids is not None and len(self.ids) != p.shape[0]:
            raise ValueError("need one id per row")

    @classmethod
    def from_columns(cls, p1, p2, **kw) -> "PValueMatrix":
        return cls(np.column_stack([p1, p2]), **kw)

    @property
    def m(self) -> int:
        return self.p.shape[0]

    @property
    def pmin(self) -> np.ndarray:
        return self.p.min(axis=1)

    @property
    def pmax(self) -> np.ndarray:
        return self.p.max(axis=1)

    def union_null_mask(self) -> np.ndarray:
        """True for rows whose union null hypothesis is true (needs labels)."""
        if self.labels is None:
            raise ValueError("matrix carries no truth labels")
        return self.labels != PairType.BOTH_NONNULL

    def take(self, order) -> "PValueMatrix":
        order = np.asarray(order)
        return PValueMatrix(
            self.p[order],
            None if self.labels is None else self.labels[order],
            None if self.ids is None else [self.ids[i] for i in order],
        )


@dataclass(frozen=True, eq=False)
class TestResult:
    """Outcome of a procedure on one matrix.

    ``adjusted`` holds the ScreenMin adjusted p-values (|S| * max, capped at 1,
    and 1 outside S); ``rejected_adjusted`` is ``{i : adjusted[i] <= alpha}``.
    ``rejected`` is the procedure's rejection set: it equals
    ``rejected_adjusted`` except for the adaptive threshold, where the testing
    threshold is the selection threshold itself.
    """

    __test__ = False  # not a pytest class

    threshold: ThresholdResult
    selected: np.ndarray
    adjusted: np.ndarray
    rejected: np.ndarray
    rejected_adjusted: np.ndarray
    testing_threshold: float
    alpha: float

    @property
    def n_selected(self) -> int:
        return len(self.selected)

    @property
    def n_rejected(self) -> int:
        return len(self.rejected)


def screenmin(matrix: PValueMatrix, spec: ThresholdSpec, alpha: float) -> TestResult:
    """Select rows with min p-value <= c, then Bonferroni-test their maxima."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    pmin, pmax = matrix.pmin, matrix.pmax
    thr = resolve_threshold(spec, pmin, alpha)
    selected = np.flatnonzero(pmin <= thr.c)
    n_sel = len(selected)
    adjusted = np.ones(matrix.m)
    adjusted[selected] = np.minimum(n_sel * pmax[selected], 1.0)
    rejected_adj = np.flatnonzero(adjusted <= alpha)
    if spec.kind == "adaptive":
        testing = thr.c
        rejected = selected[pmax[selected] <= testing]
    else:
        testing = alpha / n_sel if n_sel else float("nan")
        rejected = rejected_adj
    return TestResult(thr, selected, adjusted, rejected, rejected_adj, testing, alpha)


def bonferroni_max(matrix: PValueMatrix, alpha: float) -> TestResult:
    """Bonferroni on the row maxima; every row counts as selected."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    m = matrix.m
    adjusted = np.minimum(m * matrix.pmax, 1.0)
    rejected = np.flatnonzero(adjusted <= alpha)
    thr = ThresholdResult(1.0, "bonferroni")
    return TestResult(thr, np.arange(m), adjusted, rejected, rejected, alpha / m, alpha)
