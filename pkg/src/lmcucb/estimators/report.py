"""Result container shared by every estimator."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from .allocation import TwoLayerPlan


@dataclass
class EstimateReport:
    """
    Integral estimate plus a ledger of where the budget went.

    ``samples_used == init_count + main_count + leftover_count`` always, and
    never exceeds ``n``. Per-stratum arrays are only filled by LMC-UCB.
    """

    method: str
    estimate: float
    n: int
    samples_used: int
    sbar: int = 0
    init_count: int = 0
    main_count: int = 0
    leftover_count: int = 0
    sigma_hat: Optional[np.ndarray] = None
    plan: Optional[TwoLayerPlan] = None
    points_drawn: Optional[np.ndarray] = None

    @property
    def counts(self) -> Optional[np.ndarray]:
        """Realized ``S_k`` per stratum (LMC-UCB only)."""
        return None if self.plan is None else self.plan.counts

    def to_mapping(self) -> Dict[str, Any]:
        """Plain-Python view for JSON printing."""
        data: Dict[str, Any] = {
            "method": self.method,
            "estimate": float(self.estimate),
            "n": int(self.n),
            "samples_used": int(self.samples_used),
            "sbar": int(self.sbar),
            "init_count": int(self.init_count),
            "main_count": int(self.main_count),
            "leftover_count": int(self.leftover_count),
        }
        if self.sigma_hat is not None:
            data["sigma_hat"] = [float(v) for v in self.sigma_hat]
        if self.plan is not None:
            data["counts"] = [int(v) for v in self.plan.counts]
            data["quotas"] = [float(v) for v in self.plan.quotas]
        if self.points_drawn is not None:
            data["points_drawn"] = [int(v) for v in self.points_drawn]
        return data
