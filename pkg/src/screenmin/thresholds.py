"""Selection thresholds: default, fixed, oracle solvers and the adaptive rule."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .fwer_power import fwer_approx, power_unconditional
from .probmodel import AltModel
from .screening import HypothesisMix, expected_selected, p0

KINDS = ("default", "fixed", "oracle", "adaptive")
ORACLE_METHODS = ("constraint", "first_order", "product")

XTOL = 1e-10
#: The oracle scans run on a log grid over [SCAN_FLOOR * alpha, alpha].
SCAN_FLOOR = 1e-6
SCAN_POINTS = 240


@dataclass(frozen=True)
class ThresholdSpec:
    kind: str = "default"
    c: Optional[float] = None
    mix: Optional[HypothesisMix] = None
    model: Optional[AltModel] = None
    method: str = "constraint"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown threshold kind {self.kind!r}")
        if self.kind == "fixed" and not (self.c is not None and 0.0 < self.c <= 1.0):
            raise ValueError("fixed threshold needs c in (0, 1]")
        if self.kind == "oracle":
            if self.mix is None or self.model is None:
                raise ValueError("oracle threshold needs a mix and a model")
            if self.method not in ORACLE_METHODS:
                raise ValueError(f"unknown oracle method {self.method!r}")

    @classmethod
    def default(cls):
        return cls("default")

    @classmethod
    def fixed(cls, c: float):
        return cls("fixed", c=c)

    @classmethod
    def oracle(cls, mix: HypothesisMix, model: AltModel, method: str = "constraint"):
        return cls("oracle", mix=mix, model=model, method=method)

    @classmethod
    def adaptive(cls):
        return cls("adaptive")

    @classmethod
    def parse(cls, text: str, mix: Optional[HypothesisMix] = None,
              model: Optional[AltModel] = None) -> "ThresholdSpec":
        """Parse ``default``, ``fixed:C``, ``oracle:METHOD`` or ``adaptive``."""
        kind, _, arg = text.strip().partition(":")
        if kind == "fixed":
            try:
                return cls.fixed(float(arg))
            except ValueError as exc:
                raise ValueError(f"bad fixed threshold {text!r}") from exc
        if kind == "oracle":
            return cls.oracle(mix, model, arg or "constraint")
        if arg:
            raise ValueError(f"threshold {kind!r} takes no argument")
        return cls(kind)

    @property
    def label(self) -> str:
        if self.kind == "fixed":
            return f"fixed:{self.c!r}"
        if self.kind == "oracle":
            return f"oracle:{self.method}"
        return self.kind


@dataclass(frozen=True)
class ThresholdResult:
    c: float
    method: str
    diagnostics: dict = field(default_factory=dict)


def default_threshold(alpha: float, m: int) -> float:
    if m < 1:
        raise ValueError("m must be positive")
    return alpha / m


def bisect(f: Callable[[float], float], lo: float, hi: float, xtol: float = XTOL,
           ftol: float = -1.0, maxiter: int = 500) -> tuple[float, float, int]:
    """Bisection on a bracket with ``f(lo) > 0 >= f(hi)`` (or the reverse).

    Returns ``(x, f(x), iterations)`` where ``x`` is the endpoint on the same
    side as ``hi``.
    """
    flo, fhi = f(lo), f(hi)
    if (flo > 0) == (fhi > 0):
        raise ValueError("bisect: no sign change on bracket")
    lo_pos = flo > 0
    it = 0
    while it < maxiter:
        if hi - lo <= xtol or abs(fhi) <= ftol:
            break
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = f(mid)
        it += 1
        if (fm > 0) == lo_pos:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return hi, fhi, it


def _upper_feasible_edge(violation: Callable[[float], float], alpha: float, n: int,
                         floor: float) -> tuple[Optional[float], dict]:
    """Lower edge of the feasible interval that reaches up to ``alpha``.

    ``violation(c) > 0`` marks an infeasible c. The log grid is scanned
    downward from ``alpha``; the first infeasible grid point brackets the edge
    together with its feasible neighbour above, and bisection refines it.
    """
    grid = np.geomspace(floor * alpha, alpha, n)[::-1]
    if violation(alpha) > 0:
        return alpha, {"flag": "infeasible", "residual": float(violation(alpha)), "iterations": 0}
    for i in range(1, len(grid)):
        if violation(grid[i]) > 0:
            c, res, it = bisect(violation, float(grid[i]), float(grid[i - 1]))
            return c, {"residual": float(res), "iterations": it, "bracket_index": i}
    return None, {"flag": "constraint_inactive"}


def _power_grid_max(alpha, mix, model, m, n, floor):
    grid = np.geomspace(floor * alpha, alpha, n)
    power = np.array([power_unconditional(c, alpha, mix, model, m) for c in grid])
    i = int(np.argmax(power))
    return float(grid[i]), {"flag": "constraint_inactive", "grid_index": i, "power": float(power[i])}


def oracle_threshold(alpha: float, mix: HypothesisMix, model: AltModel, m: int,
                     method: str = "constraint", n_grid: int = SCAN_POINTS,
                     floor: float = SCAN_FLOOR) -> ThresholdResult:
    """Oracle selection threshold on (0, alpha] for a known mix and model.

    ``constraint``
        Lower edge of the interval of c (reaching up to alpha) on which the
        plug-in FWER is at most alpha.
    ``first_order``
        Same edge for ``P0(alpha/E|S|, c) <= alpha/E|S|``.
    ``product``
        Root of ``c * E|S(c)| = alpha``.

    If the plug-in constraint holds on the whole scanned range, the power
    maximizer on the grid is returned and ``diagnostics["flag"]`` says so.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    es = lambda c: float(expected_selected(c, mix, model, m))  # noqa: E731

    if method == "product":
        f = lambda c: c * es(c) - alpha  # noqa: E731
        if f(alpha) < 0:
            return ThresholdResult(alpha, method, {"flag": "no_root", "residual": f(alpha),
                                                   "iterations": 0, "expected_selected": es(alpha)})
        lo = alpha
        while f(lo) >= 0:
            lo *= 1e-3
            if lo < 1e-300:
                raise ArithmeticError("product rule: no bracket found")
        # f increases, so negate to get the bisect orientation (f(lo) > 0).
        c, res, it = bisect(lambda x: -f(x), lo, alpha, xtol=0.0, ftol=1e-10 * alpha)
        return ThresholdResult(c, method, {"residual": -res, "iterations": it,
                                           "expected_selected": es(c)})

    if method == "constraint":
        def violation(c):
            return fwer_approx(c, alpha, mix, model, m) - alpha
    elif method == "first_order":
        def violation(c):
            e = es(c)
            u = alpha / e
            if u >= 1.0:
                return 1.0
            return p0(u, c, model) / u - 1.0
    else:
        raise ValueError(f"unknown oracle method {method!r}")

    c, diag = _upper_feasible_edge(violation, alpha, n_grid, floor)
    if c is None:
        c, diag = _power_grid_max(alpha, mix, model, m, n_grid, floor)
    diag["expected_selected"] = es(c)
    return ThresholdResult(c, method, diag)


def adaptive_threshold(min_pvals, alpha: float) -> ThresholdResult:
    """Largest c with c * |S(c)| <= alpha, on the grid {alpha/k} and continuously.

    ``c`` of the result is the grid value gamma = alpha/k*, with k* the smallest
    k such that at most k minima are <= alpha/k. The continuous supremum is
    ``diagnostics["c_continuous"]``; both select the same set.
    """
    q = np.sort(np.asarray(min_pvals, dtype=float))
    m = len(q)
    if m == 0:
        raise ValueError("adaptive threshold needs at least one p-value")
    if np.any(~((q >= 0.0) & (q <= 1.0))):
        raise ValueError("p-values must lie in [0, 1]")
    ks = np.arange(1, m + 1)
    grid = alpha / ks
    counts = np.searchsorted(q, grid, side="right")
    k_star = int(ks[np.argmax(counts <= ks)])
    gamma = alpha / k_star

    # grid candidates alpha/k are checked as count <= k so that rounding of
    # (alpha/k) * k cannot reject the boundary case
    on_grid = grid[counts <= ks]
    brk = q[(q > 0.0) & (q < 1.0)]
    on_brk = brk[brk * np.searchsorted(q, brk, side="right") <= alpha]
    c_cont = float(max(on_grid.max(), on_brk.max(initial=0.0)))
    n_sel = int(np.searchsorted(q, gamma, side="right"))
    return ThresholdResult(gamma, "adaptive", {"k": k_star, "c_continuous": c_cont,
                                               "n_selected": n_sel})


def resolve_threshold(spec: ThresholdSpec, min_pvals, alpha: float) -> ThresholdResult:
    """Threshold for a realized vector of minima under ``spec``."""
    m = len(min_pvals)
    if spec.kind == "default":
        return ThresholdResult(default_threshold(alpha, m), "default")
    if spec.kind == "fixed":
        return ThresholdResult(float(spec.c), "fixed")
    if spec.kind == "oracle":
        return oracle_threshold(alpha, spec.mix, spec.model, m, spec.method)
    return adaptive_threshold(min_pvals, alpha)

