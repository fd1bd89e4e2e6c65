"""Core building blocks: hyper-cubic geometry, integrands, RNG streams, errors.

Everything in here is pure NumPy and immutable after construction so the
estimators and the benchmark harness can share objects across worker threads.
"""

from .errors import ConfigError, NotPerfectPower, NumericalError
from .geometry import (
    Box,
    HyperCubePartition,
    SubStratification,
    locate,
    make_partition,
    stratum_box,
    substratum_box,
    default_strata,
)
from .integrand import Integrand, PiecewiseLinearSpec, corpus, get_integrand, pl_sigma_k
from .rng import Phase, RngSpec, derive_seed

__all__ = [
    "Box",
    "ConfigError",
    "HyperCubePartition",
    "Integrand",
    "NotPerfectPower",
    "NumericalError",
    "Phase",
    "PiecewiseLinearSpec",
    "RngSpec",
    "SubStratification",
    "corpus",
    "derive_seed",
    "get_integrand",
    "locate",
    "make_partition",
    "pl_sigma_k",
    "stratum_box",
    "substratum_box",
    "default_strata",
]
