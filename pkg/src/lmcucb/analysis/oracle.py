"""Oracle quantities: Sigma, optimal proportions, pseudo-risk and pseudo-regret.

Everything here is deterministic. Integrals go through
:class:`~lmcucb.analysis.quadrature.QuadratureGrid`, with the integrand's own
break-points merged into the grid's split points.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike

from ..core.errors import AllZeroVariation, ConfigError, ShapeMismatch
from ..core.geometry import (
    Box,
    HyperCubePartition,
    SubStratification,
    make_partition,
    stratum_box,
    substratum_box,
)
from ..core.integrand import Integrand, PiecewiseLinearSpec
from ..estimators.allocation import TwoLayerPlan
from .quadrature import QuadratureGrid

logger = logging.getLogger(__name__)

MIN_SIGMA_NODES = 32

SubSigmas = Union[np.ndarray, Sequence[np.ndarray]]


def _unit_box(d: int) -> Box:
    return Box(lower=(0.0,) * d, upper=(1.0,) * d)


def grad_norm_integral(
    f: Integrand,
    p: float,
    grid: QuadratureGrid,
    *,
    fd_fallback: bool = False,
) -> float:
    """
    ``int_[0,1]^d ||grad f(x)||_2 ** p dx`` by composite quadrature.

    Raises
    ------
    MissingGradient
        If ``f`` has no analytic gradient and ``fd_fallback`` is False.
    """
    if p <= 0:
        raise ConfigError(f"exponent p must be > 0, got {p}")

    def integrand(x: np.ndarray) -> np.ndarray:
        return np.linalg.norm(f.gradient(x, fd_fallback=fd_fallback), axis=1) ** p

    if not f.has_gradient and not fd_fallback:
        # fail before building any nodes
        f.gradient(np.full((1, f.d), 0.5))
    return grid.integrate(integrand, _unit_box(f.d), f.breakpoints)


def sigma_big(f: Integrand, grid: QuadratureGrid, *, fd_fallback: bool = False) -> float:
    """Oracle constant ``(1/12) (int ||grad f||^(d/(d+1)))^(2(d+1)/d)``."""
    d = f.d
    inner = grad_norm_integral(f, d / (d + 1.0), grid, fd_fallback=fd_fallback)
    return inner ** (2.0 * (d + 1) / d) / 12.0


def uniform_constant(f: Integrand, grid: QuadratureGrid, *, fd_fallback: bool = False) -> float:
    """Asymptotic constant of uniform stratification, ``(1/12) int ||grad f||^2``."""
    return grad_norm_integral(f, 2.0, grid, fd_fallback=fd_fallback) / 12.0


def stratum_sigma(f: Integrand, box: Box, grid: QuadratureGrid) -> float:
    """
    Conditional standard deviation of ``f`` over ``box``.

    Two passes: the conditional mean first, then the mean squared deviation
    from it, both by quadrature on ``box``.
    """
    if grid.m < MIN_SIGMA_NODES:
        raise ConfigError(f"stratum_sigma needs >= {MIN_SIGMA_NODES} nodes per axis, got {grid.m}")
    measure = box.measure
    if measure <= 0:
        raise ConfigError(f"box must have positive measure, got {box}")
    mean = grid.integrate(f.fn, box, f.breakpoints) / measure
    var = grid.integrate(lambda x: (f.fn(x) - mean) ** 2, box, f.breakpoints) / measure
    return math.sqrt(max(var, 0.0))


def stratum_sigmas(f: Integrand, partition: HyperCubePartition, grid: QuadratureGrid) -> np.ndarray:
    """``stratum_sigma`` for every stratum of ``partition``."""
    return np.array([stratum_sigma(f, stratum_box(partition, k), grid) for k in range(partition.K)])


def quadrature_sigmas(f: Integrand, sub: SubStratification, grid: QuadratureGrid) -> List[np.ndarray]:
    """Per-sub-stratum standard deviations, one array of length ``S_k`` per stratum."""
    return [
        np.array([stratum_sigma(f, substratum_box(sub, k, i), grid) for i in range(count)])
        for k, count in enumerate(sub.counts)
    ]


def pl_substratum_sigmas(spec: PiecewiseLinearSpec, counts: ArrayLike) -> np.ndarray:
    """
    Closed-form sub-stratum std of a piecewise-linear spec.

    Every sub-stratum of stratum ``k`` shares
    ``||theta_k|| (w_k/S_k)**(1/d) / (2 sqrt(3))``; ``counts`` may be real-valued.
    """
    S = np.asarray(counts, dtype=float).reshape(-1)
    if S.size != spec.K:
        raise ShapeMismatch(f"expected {spec.K} counts, got {S.size}")
    if np.any(S <= 0):
        raise ConfigError("sub-strata counts must be > 0")
    w = spec.partition.weight
    return spec.slope_norms() * (w / S) ** (1.0 / spec.d) / (2.0 * math.sqrt(3.0))


def optimal_proportions(sigma: ArrayLike, w: ArrayLike, d: int) -> np.ndarray:
    """
    Proportions ``(w_k sigma_k)**(d/(d+1)) / sum_i (w_i sigma_i)**(d/(d+1))``.

    Raises
    ------
    AllZeroVariation
        If every ``sigma_k`` is zero; callers fall back to ``1/K``.
    """
    s = np.asarray(sigma, dtype=float).reshape(-1)
    weights = np.asarray(w, dtype=float).reshape(-1)
    if s.shape != weights.shape:
        raise ShapeMismatch(f"sigma {s.shape} and weights {weights.shape} differ")
    if np.any(s < 0) or np.any(weights <= 0):
        raise ConfigError("sigma must be >= 0 and weights > 0")
    terms = (weights * s) ** (d / (d + 1.0))
    total = math.fsum(terms)
    if total == 0.0:
        raise AllZeroVariation("every stratum has zero standard deviation")
    return terms / total


def sigma_K(sigma: ArrayLike, w: ArrayLike, d: int) -> float:
    """``Sigma_K = sum_k (w_k sigma_k)**(d/(d+1))``."""
    s = np.asarray(sigma, dtype=float).reshape(-1)
    weights = np.asarray(w, dtype=float).reshape(-1)
    return math.fsum((weights * s) ** (d / (d + 1.0)))


def pseudo_risk(sigma_sub: SubSigmas, plan: TwoLayerPlan) -> float:
    """
    ``sum_k sum_i (w_k/S_k)**2 sigma_{k,i}**2`` for ``plan``.

    ``sigma_sub`` is either one array of ``S_k`` values per stratum, or a
    single ``(K,)`` array when every sub-stratum of a stratum shares its std
    (the only form accepted for real-valued plans).
    """
    counts = np.asarray(plan.counts, dtype=float)
    w = plan.weights
    if isinstance(sigma_sub, np.ndarray) and sigma_sub.ndim == 1 and sigma_sub.dtype != object:
        if sigma_sub.size != plan.K:
            raise ShapeMismatch(f"expected {plan.K} per-stratum values, got {sigma_sub.size}")
        if np.any(counts <= 0):
            raise ShapeMismatch("every stratum needs a positive sub-strata count")
        return math.fsum((w / counts) ** 2 * counts * sigma_sub.astype(float) ** 2)
    if len(sigma_sub) != plan.K:
        raise ShapeMismatch(f"expected {plan.K} strata, got {len(sigma_sub)}")
    parts = []
    for k, values in enumerate(sigma_sub):
        arr = np.asarray(values, dtype=float).reshape(-1)
        if arr.size != counts[k]:
            raise ShapeMismatch(f"stratum {k}: plan has {counts[k]:g} sub-strata, got {arr.size} stds")
        parts.append((w[k] / counts[k]) ** 2 * math.fsum(arr**2))
    return math.fsum(parts)


def oracle_risk(sigma: ArrayLike, w: ArrayLike, n: float, d: int) -> Tuple[float, np.ndarray]:
    """
    Pseudo-risk of the oracle allocation and its real-valued counts.

    Returns
    -------
    risk : float
        ``Sigma_K ** (2(d+1)/d) / n ** (1 + 2/d)``.
    counts : np.ndarray
        ``S_k* = lambda_k * n`` (no rounding). Uniform ``n/K`` when every
        ``sigma_k`` is zero.
    """
    if n < 1:
        raise ConfigError(f"budget n must be >= 1, got {n}")
    weights = np.asarray(w, dtype=float).reshape(-1)
    risk = sigma_K(sigma, weights, d) ** (2.0 * (d + 1) / d) / float(n) ** (1.0 + 2.0 / d)
    try:
        lam = optimal_proportions(sigma, weights, d)
    except AllZeroVariation:
        lam = np.full(weights.size, 1.0 / weights.size)
    return risk, lam * float(n)


def pseudo_regret(risk: float, sigma: float, n: float, d: int) -> float:
    """``risk - Sigma / n**(1 + 2/d)``."""
    return float(risk) - float(sigma) / float(n) ** (1.0 + 2.0 / d)


def asymptotic_allocation(f: Integrand, x: ArrayLike, grid: QuadratureGrid) -> np.ndarray:
    """
    Density ``s*(x) = ||grad f(x)||**(d/(d+1)) / int ||grad f||**(d/(d+1))``.

    A plotting aid only; no estimator uses it.
    """
    d = f.d
    expo = d / (d + 1.0)
    total = grad_norm_integral(f, expo, grid)
    if total == 0.0:
        raise AllZeroVariation(f"integrand '{f.name}' has a vanishing gradient")
    pts = np.asarray(x, dtype=float).reshape(-1, d)
    return np.linalg.norm(f.gradient(pts), axis=1) ** expo / total


@dataclass
class OracleSummary:
    """Oracle constants of one integrand at one (K, n)."""

    name: str
    d: int
    K: int
    n: int
    sigma: float
    sigma_K: float
    lam: np.ndarray
    uniform_constant: float
    oracle_risk: float
    oracle_counts: np.ndarray
    stratum_sigmas: np.ndarray
    substratum_sigmas: Optional[List[np.ndarray]] = field(default=None, repr=False)

    @property
    def oracle_bound(self) -> float:
        """``Sigma / n**(1 + 2/d)``."""
        return self.sigma / float(self.n) ** (1.0 + 2.0 / self.d)

    @property
    def uniform_bound(self) -> float:
        return self.uniform_constant / float(self.n) ** (1.0 + 2.0 / self.d)

    def to_mapping(self) -> dict:
        data = {
            "fn": self.name,
            "d": self.d,
            "K": self.K,
            "n": self.n,
            "sigma": self.sigma,
            "sigma_K": self.sigma_K,
            "lambda": [float(v) for v in self.lam],
            "uniform_constant": self.uniform_constant,
            "oracle_risk": self.oracle_risk,
            "oracle_bound": self.oracle_bound,
            "uniform_bound": self.uniform_bound,
            "oracle_counts": [float(v) for v in self.oracle_counts],
            "stratum_sigmas": [float(v) for v in self.stratum_sigmas],
        }
        if self.substratum_sigmas is not None:
            data["substratum_sigmas"] = [[float(v) for v in arr] for arr in self.substratum_sigmas]
        return data


def oracle_summary(
    f: Integrand,
    K: int,
    n: int,
    grid: QuadratureGrid,
    per_substratum: Optional[SubStratification] = None,
) -> OracleSummary:
    """
    Collect Sigma, Sigma_K, lambda, the uniform constant and the oracle risk.

    ``lambda`` falls back to ``1/K`` when every stratum is flat.
    """
    part = make_partition(f.d, K)
    sigmas = stratum_sigmas(f, part, grid)
    w = part.weights()
    try:
        lam = optimal_proportions(sigmas, w, f.d)
    except AllZeroVariation:
        logger.info("[oracle] %s: all strata flat, lambda falls back to 1/K", f.name)
        lam = np.full(part.K, 1.0 / part.K)
    risk, counts = oracle_risk(sigmas, w, n, f.d)
    sub = None
    if per_substratum is not None:
        if per_substratum.parent != part:
            raise ShapeMismatch("per_substratum must refine the K-stratum partition")
        sub = quadrature_sigmas(f, per_substratum, grid)
    return OracleSummary(
        name=f.name,
        d=f.d,
        K=part.K,
        n=int(n),
        sigma=sigma_big(f, grid),
        sigma_K=sigma_K(sigmas, w, f.d),
        lam=lam,
        uniform_constant=uniform_constant(f, grid),
        oracle_risk=risk,
        oracle_counts=counts,
        stratum_sigmas=sigmas,
        substratum_sigmas=sub,
    )


__all__ = [
    "MIN_SIGMA_NODES",
    "OracleSummary",
    "asymptotic_allocation",
    "grad_norm_integral",
    "optimal_proportions",
    "oracle_risk",
    "oracle_summary",
    "pl_substratum_sigmas",
    "pseudo_regret",
    "pseudo_risk",
    "quadrature_sigmas",
    "sigma_K",
    "sigma_big",
    "stratum_sigma",
    "stratum_sigmas",
    "uniform_constant",
]
