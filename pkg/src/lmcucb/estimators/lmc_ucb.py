"""LMC-UCB: two-phase adaptive stratified sampling with hyper-cubic sub-strata.

Phase one draws one point in each of ``sbar`` sub-strata of every stratum and
estimates the per-stratum standard deviations. Phase two re-splits each
stratum into ``S_k`` sub-strata (see :func:`allocate`) and draws one fresh
point per sub-stratum, except that strata kept at ``S_k == sbar`` reuse their
initialisation points. Under ``uniform_refill`` the budget left over by the
rounding is spent on uniform points of the whole cube.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from ..core.errors import ConfigError, NumericalError
from ..core.geometry import (
    HyperCubePartition,
    SubStratification,
    integer_root,
    lattice_coordinates,
    make_partition,
)
from ..core.integrand import Integrand
from ..core.rng import Phase, RngSpec
from .allocation import allocate, confidence_scale, empirical_std, sbar
from .report import EstimateReport

logger = logging.getLogger(__name__)


class LeftoverPolicy(str, Enum):
    """What to do with ``n - samples_used`` after the main phase."""

    DISCARD = "discard"
    UNIFORM_REFILL = "uniform_refill"

    @classmethod
    def parse(cls, value: "str | LeftoverPolicy") -> "LeftoverPolicy":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        if key in {"refill", "uniform"}:
            key = cls.UNIFORM_REFILL.value
        try:
            return cls(key)
        except ValueError:
            raise ConfigError(
                f"leftover policy must be one of {[p.value for p in cls]}, got {value!r}"
            ) from None


@dataclass(frozen=True)
class LmcUcbConfig:
    """
    Parameters of one LMC-UCB run.

    Exactly one of ``L`` (gradient-norm bound, turned into ``A`` through
    :func:`confidence_scale`) and ``A_override`` must be set.
    """

    K: int
    n: int
    delta: float = 0.05
    L: Optional[float] = None
    A_override: Optional[float] = None
    leftover_policy: LeftoverPolicy = LeftoverPolicy.DISCARD

    def __post_init__(self) -> None:
        object.__setattr__(self, "leftover_policy", LeftoverPolicy.parse(self.leftover_policy))
        if (self.L is None) == (self.A_override is None):
            raise ConfigError("set exactly one of L and A_override")
        if self.L is not None and self.L < 0:
            raise ConfigError(f"L must be >= 0, got {self.L}")
        if self.A_override is not None and self.A_override < 0:
            raise ConfigError(f"A_override must be >= 0, got {self.A_override}")
        if not 0.0 < self.delta < 1.0:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if self.K < 1:
            raise ConfigError(f"K must be >= 1, got {self.K}")
        if self.n < 4 * self.K:
            raise ConfigError(f"LMC-UCB needs n >= 4K, got n={self.n}, K={self.K}")

    def scale(self, d: int) -> float:
        """Confidence scale ``A`` in dimension ``d``."""
        if self.A_override is not None:
            return float(self.A_override)
        return confidence_scale(float(self.L), self.K, self.delta, d)

    def partition(self, d: int) -> HyperCubePartition:
        """Validate the config for dimension ``d`` and return the stratum partition."""
        part = make_partition(d, self.K)
        if sbar(self.n, self.K, d) < 2:
            raise ConfigError(
                f"n={self.n}, K={self.K}, d={d} gives sbar < 2; "
                "the empirical std needs at least two initial points per stratum"
            )
        return part


def lmc_ucb(f: Integrand, cfg: LmcUcbConfig, rng: RngSpec) -> EstimateReport:
    """Run LMC-UCB on ``f`` and return the estimate with its sampling ledger."""
    d = f.d
    part = cfg.partition(d)
    K, l = part.K, part.cells_per_axis
    sb = sbar(cfg.n, K, d)
    mb = integer_root(sb, d)
    coords = lattice_coordinates(l, d)

    # initialisation: one point per cell of the sbar-split of every stratum
    fine = coords[:, None, :] * mb + lattice_coordinates(mb, d)[None, :, :]
    jitter = rng.generator(Phase.INIT).random((K, sb, d))
    init_points = (fine + jitter) / (l * mb)
    init_values = f.fn(init_points.reshape(-1, d)).reshape(K, sb)
    # values are carried relative to the first one so constants stay exact
    ref = float(init_values[0, 0])
    init_values = init_values - ref
    sigma_hat = empirical_std(init_values, axis=1)

    plan = allocate(sigma_hat, cfg, sb, d)
    cell_values = []
    for k in range(K):
        count = int(plan.counts[k])
        if count == sb:
            cell_values.append(init_values[k])
            continue
        m = integer_root(count, d)
        local = coords[k] * m + lattice_coordinates(m, d)
        points = (local + rng.generator(Phase.MAIN, k).random((count, d))) / (l * m)
        cell_values.append(f.fn(points) - ref)

    init_count = K * sb
    main_count = int(plan.fresh_counts().sum())
    used = init_count + main_count
    if used > cfg.n:
        raise NumericalError(f"allocation overspent the budget: {used} > {cfg.n}")

    points_drawn = np.full(K, sb, dtype=np.int64) + plan.fresh_counts()
    leftover = 0
    if cfg.leftover_policy is LeftoverPolicy.UNIFORM_REFILL and used < cfg.n:
        leftover = cfg.n - used
        cell_values, extra_per_stratum = _refill(f, part, plan.counts, cell_values, leftover, rng, ref)
        points_drawn += extra_per_stratum

    # equal stratum weights: the weighted sum is the mean of stratum means
    stratum_means = np.array([np.mean(v) for v in cell_values])
    estimate = ref + float(np.mean(stratum_means))
    logger.debug(
        "[lmcucb] n=%d K=%d sbar=%d used=%d leftover=%d estimate=%.6g",
        cfg.n,
        K,
        sb,
        used,
        leftover,
        estimate,
    )
    return EstimateReport(
        method="lmcucb",
        estimate=estimate,
        n=cfg.n,
        samples_used=used + leftover,
        sbar=sb,
        init_count=init_count,
        main_count=main_count,
        leftover_count=leftover,
        sigma_hat=sigma_hat,
        plan=plan,
        points_drawn=points_drawn,
    )


def _refill(
    f: Integrand,
    part: HyperCubePartition,
    counts: np.ndarray,
    cell_values: list,
    leftover: int,
    rng: RngSpec,
    ref: float = 0.0,
):
    """Spread ``leftover`` uniform points and average them into their sub-strata."""
    sub = SubStratification(parent=part, counts=tuple(int(c) for c in counts))
    points = rng.generator(Phase.LEFTOVER).random((leftover, part.d))
    values = f.fn(points) - ref
    k_idx, i_idx = sub.locate(points)
    offsets = np.concatenate(([0], np.cumsum(counts)[:-1])).astype(np.int64)
    flat = offsets[k_idx] + i_idx
    total_cells = int(np.sum(counts))
    sums = np.bincount(flat, weights=values, minlength=total_cells)
    hits = np.bincount(flat, minlength=total_cells)
    averaged = []
    for k, first in enumerate(cell_values):
        lo, hi = offsets[k], offsets[k] + counts[k]
        averaged.append((first + sums[lo:hi]) / (1 + hits[lo:hi]))
    extra_per_stratum = np.bincount(k_idx, minlength=part.K).astype(np.int64)
    return averaged, extra_per_stratum


__all__ = ["LeftoverPolicy", "LmcUcbConfig", "lmc_ucb"]
