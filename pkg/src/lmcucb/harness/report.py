"""Benchmark result containers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .rates import RateFit


@dataclass(frozen=True)
class BenchmarkRow:
    """Replicated error statistics of one estimator at one budget."""

    estimator: str
    n: int
    mse: float
    mse_stderr: float
    samples_used_mean: float
    oracle_bound: Optional[float] = None
    uniform_bound: Optional[float] = None
    K: Optional[int] = None


@dataclass(frozen=True)
class SkippedPoint:
    """A (estimator, budget) pair left out of the sweep, with the reason."""

    estimator: str
    n: int
    reason: str


@dataclass
class BenchmarkReport:
    fn: str
    d: int
    exact_integral: float
    reps: int
    seed: int
    rows: List[BenchmarkRow] = field(default_factory=list)
    skipped: List[SkippedPoint] = field(default_factory=list)
    rates: Dict[str, RateFit] = field(default_factory=dict)
    lemma3_pass_rate: Optional[float] = None

    def rows_for(self, estimator: str) -> List[BenchmarkRow]:
        return [row for row in self.rows if row.estimator == estimator]

    def mse(self, estimator: str, n: int) -> float:
        for row in self.rows:
            if row.estimator == estimator and row.n == n:
                return row.mse
        raise KeyError(f"no row for estimator={estimator!r}, n={n}")


__all__ = ["BenchmarkReport", "BenchmarkRow", "SkippedPoint"]
