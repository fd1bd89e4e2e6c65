"""Sampling schemes sharing one budget-ledger and seeded-RNG contract.

- :mod:`baselines` holds crude and uniform stratified Monte-Carlo.
- :mod:`allocation` holds the LMC-UCB budget arithmetic (``sbar``, ``A`` and the sub-strata quotas).
- :mod:`lmc_ucb` runs the two-phase adaptive estimator.
"""

from .allocation import (
    TwoLayerPlan,
    allocate,
    centered_mean,
    confidence_scale,
    delta_for_budget,
    empirical_std,
    floor_power,
    lemma3_lower_bound,
    sbar,
    xi_half_width,
)
from .baselines import crude_mc, uniform_stratified
from .lmc_ucb import LeftoverPolicy, LmcUcbConfig, lmc_ucb
from .report import EstimateReport

__all__ = [
    "EstimateReport",
    "LeftoverPolicy",
    "LmcUcbConfig",
    "TwoLayerPlan",
    "allocate",
    "centered_mean",
    "confidence_scale",
    "crude_mc",
    "delta_for_budget",
    "empirical_std",
    "floor_power",
    "lemma3_lower_bound",
    "lmc_ucb",
    "sbar",
    "uniform_stratified",
    "xi_half_width",
]
