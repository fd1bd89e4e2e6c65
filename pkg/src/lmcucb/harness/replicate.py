"""Seeded replication of one estimator run across worker threads."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List

from ..core.rng import RngSpec, derive_seed
from ..estimators.report import EstimateReport

# labels mixed into per-replication seeds; fixed so reports stay comparable
ESTIMATOR_CODES: Dict[str, int] = {"crude": 1, "uniform": 2, "lmcucb": 3}
LEMMA3_CODE = 4
XI_EVENT_CODE = 5

Task = Callable[[RngSpec], EstimateReport]


def replication_seed(root: int, code: int, n: int) -> int:
    """Seed shared by every replication of one (estimator, budget) point; replication ``r`` is stream ``r``."""
    return derive_seed(root, code, n)


def run_replications(task: Task, seed: int, reps: int, workers: int = 1) -> List[EstimateReport]:
    """
    Run ``task`` on streams ``0..reps-1`` of ``seed``.

    Results come back in stream order whatever the worker count, so anything
    aggregated from them is independent of scheduling.
    """
    specs = [RngSpec(seed=seed, stream=r) for r in range(reps)]
    if workers <= 1 or reps < 2:
        return [task(spec) for spec in specs]
    chunk = max(1, math.ceil(reps / (workers * 4)))
    chunks = [specs[i : i + chunk] for i in range(0, reps, chunk)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(lambda part: [task(spec) for spec in part], chunks)
        return [report for part in parts for report in part]


__all__ = [
    "ESTIMATOR_CODES",
    "LEMMA3_CODE",
    "XI_EVENT_CODE",
    "Task",
    "replication_seed",
    "run_replications",
]
