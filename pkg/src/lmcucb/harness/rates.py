"""Log-log convergence-rate fits of MSE against the budget."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np
from scipy import stats

from ..core.errors import InsufficientSpan, NonPositiveMSE

MIN_POINTS = 4
MIN_SPAN = 10.0
CONFIDENCE = 0.95


@dataclass(frozen=True)
class RateFit:
    """Least-squares line ``log mse = intercept + slope * log n``."""

    slope: float
    intercept: float
    ci_low: float
    ci_high: float
    stderr: float
    points: int

    def contains(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high

    def to_mapping(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "stderr": self.stderr,
            "points": self.points,
        }


def fit_rate(points: Iterable[Tuple[float, float]]) -> RateFit:
    """
    Fit the slope of ``log(mse)`` against ``log(n)``.

    Parameters
    ----------
    points:
        ``(n, mse)`` pairs.

    Returns
    -------
    RateFit
        Slope, intercept and a 95% Student-t interval on the slope built from
        the residual variance.

    Raises
    ------
    InsufficientSpan
        Fewer than 4 distinct budgets, or budgets spanning less than a decade.
    NonPositiveMSE
        Any MSE is zero, negative or not finite.
    """
    pairs = [(float(n), float(m)) for n, m in points]
    if any(not math.isfinite(m) or m <= 0.0 for _, m in pairs):
        raise NonPositiveMSE(f"every MSE must be finite and > 0, got {[m for _, m in pairs]}")
    ns = np.array([n for n, _ in pairs])
    distinct = np.unique(ns)
    if distinct.size < MIN_POINTS:
        raise InsufficientSpan(f"need at least {MIN_POINTS} distinct budgets, got {distinct.size}")
    if distinct[0] <= 0 or distinct[-1] / distinct[0] < MIN_SPAN:
        raise InsufficientSpan(
            f"budgets must span at least a factor {MIN_SPAN:g}, got {distinct[0]:g}..{distinct[-1]:g}"
        )
    x = np.log(ns)
    y = np.log(np.array([m for _, m in pairs]))
    res = stats.linregress(x, y)
    half = float(stats.t.ppf(0.5 + CONFIDENCE / 2.0, ns.size - 2)) * float(res.stderr)
    return RateFit(
        slope=float(res.slope),
        intercept=float(res.intercept),
        ci_low=float(res.slope) - half,
        ci_high=float(res.slope) + half,
        stderr=float(res.stderr),
        points=int(ns.size),
    )


__all__ = ["RateFit", "fit_rate"]
