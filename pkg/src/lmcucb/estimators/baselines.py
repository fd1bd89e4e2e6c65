"""Non-adaptive baselines: crude Monte-Carlo and uniform stratified Monte-Carlo."""

from __future__ import annotations

from ..core.errors import ConfigError
from ..core.geometry import exact_root, lattice_coordinates
from ..core.integrand import Integrand
from ..core.rng import Phase, RngSpec
from .allocation import centered_mean
from .report import EstimateReport


def crude_mc(f: Integrand, n: int, rng: RngSpec) -> EstimateReport:
    """Sample mean of ``f`` at ``n`` i.i.d. uniform points of [0, 1]^d."""
    n = int(n)
    if n < 1:
        raise ConfigError(f"budget n must be >= 1, got {n}")
    points = rng.generator(Phase.CRUDE).random((n, f.d))
    values = f.fn(points)
    return EstimateReport(
        method="crude",
        estimate=centered_mean(values),
        n=n,
        samples_used=n,
        main_count=n,
    )


def uniform_stratified(f: Integrand, n: int, rng: RngSpec) -> EstimateReport:
    """
    One uniform point in each of ``n`` equal hyper-cubes.

    Raises
    ------
    NotPerfectPower
        If ``n`` is not a perfect d-th power.
    """
    n = int(n)
    if n < 1:
        raise ConfigError(f"budget n must be >= 1, got {n}")
    l = exact_root(n, f.d)
    cells = lattice_coordinates(l, f.d)
    jitter = rng.generator(Phase.UNIFORM).random((n, f.d))
    points = (cells + jitter) / l
    values = f.fn(points)
    return EstimateReport(
        method="uniform",
        estimate=centered_mean(values),
        n=n,
        samples_used=n,
        main_count=n,
    )
