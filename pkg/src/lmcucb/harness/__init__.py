"""Experiment harness: replicated MSE sweeps, rate fits, guarantee checks and the CLI."""

from .benchmark import run_benchmark, run_point
from .lemma3 import Lemma3Result, XiEventResult, verify_lemma3, verify_xi_event
from .rates import RateFit, fit_rate
from .replicate import run_replications
from .report import BenchmarkReport, BenchmarkRow, SkippedPoint

__all__ = [
    "BenchmarkReport",
    "BenchmarkRow",
    "Lemma3Result",
    "RateFit",
    "SkippedPoint",
    "XiEventResult",
    "fit_rate",
    "run_benchmark",
    "run_point",
    "run_replications",
    "verify_lemma3",
    "verify_xi_event",
]
