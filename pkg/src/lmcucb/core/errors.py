"""Exception types raised across the package.

Each error derives from a stdlib exception so callers can keep catching
``ValueError`` / ``IndexError`` / ``ArithmeticError`` broadly.
"""

from __future__ import annotations


class ConfigError(ValueError):
    """Invalid user configuration (bad budget, stratum count, flag value, ...)."""


class NotPerfectPower(ConfigError):
    """An integer that must be an exact d-th power is not."""

    def __init__(self, value: int, d: int) -> None:
        super().__init__(f"{value} is not a perfect {d}-th power")
        self.value = value
        self.d = d


class MissingGradient(ConfigError):
    """An oracle quantity needs the analytic gradient and none is available."""


class MissingExactIntegral(ConfigError):
    """A benchmark needs the exact integral of the integrand."""


class InsufficientSpan(ConfigError):
    """Too few budgets (or too narrow a range) to fit a convergence rate."""


class TooFewSamples(ValueError):
    """An empirical statistic was requested on fewer samples than it needs."""


class ShapeMismatch(ValueError):
    """Per-stratum inputs do not line up with the plan they are combined with."""


class IndexOutOfRange(IndexError):
    """Stratum or sub-stratum index outside its partition."""


class NumericalError(ArithmeticError):
    """Base class for numerical failures (exit code 3 on the CLI)."""


class AllZeroVariation(NumericalError):
    """Every stratum has zero standard deviation; proportions are undefined."""


class DegenerateDenominator(NumericalError):
    """The allocation weights sum to zero."""


class NonPositiveMSE(NumericalError):
    """A log-log fit was asked to take the logarithm of a non-positive MSE."""


__all__ = [
    "AllZeroVariation",
    "ConfigError",
    "DegenerateDenominator",
    "IndexOutOfRange",
    "InsufficientSpan",
    "MissingExactIntegral",
    "MissingGradient",
    "NonPositiveMSE",
    "NotPerfectPower",
    "NumericalError",
    "ShapeMismatch",
    "TooFewSamples",
]
