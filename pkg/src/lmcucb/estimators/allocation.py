"""Budget arithmetic for LMC-UCB: initialisation size, confidence scale, allocation.

All quantities assume strata of equal measure ``w_k = 1/K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np
from numpy.typing import ArrayLike

from ..core.errors import ConfigError, ShapeMismatch, TooFewSamples
from ..core.geometry import integer_root

if TYPE_CHECKING:  # pragma: no cover
    from .lmc_ucb import LmcUcbConfig

# relative slack when flooring quota ** (1/d); see floor_power
ROOT_GUARD = 1e-9


@dataclass(frozen=True)
class TwoLayerPlan:
    """
    Sub-strata count per stratum plus the initialisation count.

    ``counts`` are integers for a realized plan; oracle relaxations may carry
    real-valued counts (``sbar == 0`` then). ``quotas`` are the pre-rounding
    targets ``C_k`` kept for diagnostics.
    """

    counts: np.ndarray
    sbar: int
    quotas: np.ndarray
    d: int

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts).reshape(-1)
        quotas = np.asarray(self.quotas, dtype=float).reshape(-1)
        if counts.shape != quotas.shape:
            raise ShapeMismatch(f"counts {counts.shape} and quotas {quotas.shape} differ")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "quotas", quotas)

    @classmethod
    def relaxed(cls, counts: ArrayLike, d: int) -> "TwoLayerPlan":
        """Real-valued plan (no rounding, no initialisation) for oracle comparisons."""
        values = np.asarray(counts, dtype=float).reshape(-1)
        return cls(counts=values, sbar=0, quotas=values.copy(), d=int(d))

    @property
    def K(self) -> int:
        return int(self.counts.size)

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.K, 1.0 / self.K)

    def fresh_counts(self) -> np.ndarray:
        """Points drawn in the main phase: ``S_k`` where ``S_k > sbar``, else 0."""
        return np.where(self.counts > self.sbar, self.counts, 0)

    def samples_needed(self) -> int:
        return int(self.K * self.sbar + self.fresh_counts().sum())


def sbar(n: int, K: int, d: int) -> int:
    """
    Initialisation sub-strata per stratum, ``floor((n/K) ** (1/(d+1))) ** d``.

    The root is found exactly: the largest ``m`` with ``K * m**(d+1) <= n``,
    which is the integer root of ``n // K``.
    """
    n, K, d = int(n), int(K), int(d)
    if K < 1 or n < K:
        raise ConfigError(f"sbar needs n >= K >= 1, got n={n}, K={K}")
    m = integer_root(n // K, d + 1)
    return m**d


def confidence_scale(L: float, K: int, delta: float, d: int) -> float:
    """``A = 2 L sqrt(d) sqrt(log(2K/delta))``."""
    if L < 0:
        raise ConfigError(f"gradient bound L must be >= 0, got {L}")
    if not 0.0 < delta < 1.0:
        raise ConfigError(f"delta must lie in (0, 1), got {delta}")
    return 2.0 * float(L) * math.sqrt(d) * math.sqrt(math.log(2.0 * K / delta))


def xi_half_width(L: float, d: int, w: float, sbar_count: int, K: int, delta: float) -> float:
    """Half width ``2 L sqrt(d) (w/sbar)**(1/d) sqrt(log(2K/delta)/sbar)`` of the std confidence event."""
    return confidence_scale(L, K, delta, d) * (w / sbar_count) ** (1.0 / d) / math.sqrt(sbar_count)


def delta_for_budget(n: int) -> float:
    """The vanishing confidence schedule ``delta_n = 1/n**2``."""
    if n < 2:
        raise ConfigError(f"delta_n = 1/n^2 needs n >= 2, got {n}")
    return 1.0 / float(n) ** 2


def centered_mean(values: ArrayLike) -> float:
    """
    Mean of ``values`` taken about their first entry.

    A constant sample returns that constant bit for bit.
    """
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.size == 0:
        raise TooFewSamples("centered_mean needs at least 1 sample")
    ref = arr[0]
    return float(ref + np.mean(arr - ref))


def empirical_std(samples: Sequence[float] | np.ndarray, axis: int | None = None) -> float | np.ndarray:
    """
    Unbiased-variance standard deviation ``sqrt(sum (x - mean)^2 / (m - 1))``.

    With ``axis`` set, one std per slice along that axis is returned. Samples
    are centred on their first entry, so a constant sample gives exactly 0.
    """
    arr = np.asarray(samples, dtype=float)
    if axis is None:
        arr = arr.reshape(-1)
        axis = 0
    m = arr.shape[axis] if arr.ndim else 0
    if m < 2:
        raise TooFewSamples(f"empirical_std needs at least 2 samples, got {m}")
    shifted = arr - np.take(arr, [0], axis=axis)
    std = np.std(shifted, axis=axis, ddof=1)
    return float(std) if std.ndim == 0 else std


def floor_power(quota: float, d: int) -> int:
    """
    ``floor(quota ** (1/d)) ** d`` with a root-rounding guard.

    The candidate root moves down while ``m**d`` exceeds the quota by more
    than ``ROOT_GUARD`` relative, and up while ``(m+1)**d`` stays within it.
    """
    if quota < 1.0:
        return 0
    limit = quota * (1.0 + ROOT_GUARD)
    m = int(math.floor(quota ** (1.0 / d)))
    while m > 0 and m**d > limit:
        m -= 1
    while (m + 1) ** d <= limit:
        m += 1
    return m**d


def allocate(
    sigma_hat: ArrayLike,
    cfg: "LmcUcbConfig",
    sbar_count: int,
    d: int,
) -> TwoLayerPlan:
    """
    Sub-strata counts from the initialisation standard deviations.

    ``C_k`` splits the remaining budget ``n - K*sbar`` in proportion to
    ``w_k**(d/(d+1)) * (sigma_hat_k + A (w_k/sbar)**(1/d) / sqrt(sbar)) ** (d/(d+1))``
    and ``S_k = max(floor(C_k ** (1/d)) ** d, sbar)``. When every weight is
    zero (``A == 0`` and flat strata) the remaining budget is split evenly.
    """
    sigma = np.asarray(sigma_hat, dtype=float).reshape(-1)
    if sigma.size != cfg.K:
        raise ShapeMismatch(f"expected {cfg.K} standard deviations, got {sigma.size}")
    if np.any(sigma < 0) or not np.all(np.isfinite(sigma)):
        raise ConfigError("standard deviations must be finite and >= 0")
    if sbar_count < 1:
        raise ConfigError(f"sbar must be >= 1, got {sbar_count}")

    K = cfg.K
    w = 1.0 / K
    expo = d / (d + 1.0)
    bonus = cfg.scale(d) * (w / sbar_count) ** (1.0 / d) * math.sqrt(1.0 / sbar_count)
    terms = w**expo * (sigma + bonus) ** expo
    remaining = cfg.n - K * sbar_count
    total = float(terms.sum())
    if total > 0.0:
        quotas = terms / total * remaining
    else:
        quotas = np.full(K, remaining / K)
    counts = np.array([max(floor_power(q, d), sbar_count) for q in quotas], dtype=np.int64)
    return TwoLayerPlan(counts=counts, sbar=int(sbar_count), quotas=quotas, d=int(d))


def lemma3_lower_bound(
    lam: ArrayLike,
    sigma_K: float,
    cfg: "LmcUcbConfig",
    d: int,
) -> np.ndarray:
    """
    High-probability lower bound on every ``S_k``::

        max(lam_k * (n - 7 (L+1) d^{3/2} sqrt(log(K/delta)) (1 + 1/Sigma_K)
                     K^{1/(d+1)} n^{d/(d+1)}), sbar)
    """
    if sigma_K <= 0:
        raise ConfigError(f"Sigma_K must be > 0, got {sigma_K}")
    if cfg.L is None:
        raise ConfigError("the bound needs the gradient bound L, not an A override")
    lam_arr = np.asarray(lam, dtype=float).reshape(-1)
    if lam_arr.size != cfg.K:
        raise ShapeMismatch(f"expected {cfg.K} proportions, got {lam_arr.size}")
    n, K = cfg.n, cfg.K
    penalty = (
        7.0
        * (cfg.L + 1.0)
        * d**1.5
        * math.sqrt(math.log(K / cfg.delta))
        * (1.0 + 1.0 / sigma_K)
        * K ** (1.0 / (d + 1))
        * n ** (d / (d + 1.0))
    )
    return np.maximum(lam_arr * (n - penalty), float(sbar(n, K, d)))


__all__ = [
    "ROOT_GUARD",
    "TwoLayerPlan",
    "allocate",
    "confidence_scale",
    "delta_for_budget",
    "centered_mean",
    "empirical_std",
    "floor_power",
    "lemma3_lower_bound",
    "sbar",
    "xi_half_width",
]
