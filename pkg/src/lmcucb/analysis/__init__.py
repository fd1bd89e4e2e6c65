"""Deterministic oracle analysis by composite quadrature.

- :mod:`quadrature` builds Gauss-Legendre / midpoint tensor grids that break at
  discontinuities.
- :mod:`oracle` computes Sigma, Sigma_K, optimal proportions, pseudo-risk and
  pseudo-regret from those grids or from piecewise-linear closed forms.

Both stay free of sampling code so they can serve the benchmark harness,
the ``oracle`` CLI command and the tests alike.
"""

from .oracle import (
    OracleSummary,
    asymptotic_allocation,
    grad_norm_integral,
    optimal_proportions,
    oracle_risk,
    oracle_summary,
    pl_substratum_sigmas,
    pseudo_regret,
    pseudo_risk,
    quadrature_sigmas,
    sigma_big,
    sigma_K,
    stratum_sigma,
    stratum_sigmas,
    uniform_constant,
)
from .quadrature import QuadratureGrid

__all__ = [
    "OracleSummary",
    "QuadratureGrid",
    "asymptotic_allocation",
    "grad_norm_integral",
    "optimal_proportions",
    "oracle_risk",
    "oracle_summary",
    "pl_substratum_sigmas",
    "pseudo_regret",
    "pseudo_risk",
    "quadrature_sigmas",
    "sigma_big",
    "sigma_K",
    "stratum_sigma",
    "stratum_sigmas",
    "uniform_constant",
]
