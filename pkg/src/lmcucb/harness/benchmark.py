"""Replicated MSE sweeps over budgets and estimators."""

from __future__ import annotations

import logging
import math
import time
from typing import Optional, Sequence, Tuple

import numpy as np

from ..analysis.oracle import sigma_big, uniform_constant
from ..config.experiment import ExperimentConfig
from ..core.errors import ConfigError, InsufficientSpan, MissingExactIntegral, NumericalError
from ..core.integrand import Integrand
from ..estimators.baselines import crude_mc, uniform_stratified
from ..estimators.lmc_ucb import lmc_ucb
from ..perf_system import get_process_cpu_percent, get_process_rss_mb
from ..tools.debug import time_block
from .lemma3 import verify_lemma3
from .rates import fit_rate
from .replicate import ESTIMATOR_CODES, Task, replication_seed, run_replications
from .report import BenchmarkReport, BenchmarkRow, SkippedPoint

logger = logging.getLogger(__name__)


def _task_for(estimator: str, f: Integrand, cfg: ExperimentConfig, n: int) -> Task:
    if estimator == "crude":
        return lambda spec: crude_mc(f, n, spec)
    if estimator == "uniform":
        return lambda spec: uniform_stratified(f, n, spec)
    if estimator == "lmcucb":
        lmc_cfg = cfg.lmc_config(n, f)
        lmc_cfg.partition(f.d)
        return lambda spec: lmc_ucb(f, lmc_cfg, spec)
    raise ConfigError(f"unknown estimator {estimator!r}")


def _oracle_constants(f: Integrand, cfg: ExperimentConfig) -> Tuple[Optional[float], Optional[float]]:
    if not f.has_gradient:
        return None, None
    grid = cfg.quadrature_grid(f.d)
    with time_block(f"oracle constants for {f.name}"):
        return sigma_big(f, grid), uniform_constant(f, grid)


def run_point(
    f: Integrand,
    cfg: ExperimentConfig,
    estimator: str,
    n: int,
    constants: Tuple[Optional[float], Optional[float]] = (None, None),
) -> BenchmarkRow | SkippedPoint:
    """MSE of ``estimator`` at budget ``n`` over ``cfg.reps`` seeded replications."""
    try:
        task = _task_for(estimator, f, cfg, n)
    except ConfigError as exc:
        if estimator != "lmcucb":
            raise
        logger.info("[benchmark] skip %s n=%d: %s", estimator, n, exc)
        return SkippedPoint(estimator=estimator, n=int(n), reason=str(exc))

    started = time.perf_counter()
    seed = replication_seed(cfg.seed, ESTIMATOR_CODES[estimator], n)
    with time_block(f"{estimator} n={n} x{cfg.reps}"):
        reports = run_replications(task, seed, cfg.reps, cfg.workers)

    used = np.array([r.samples_used for r in reports], dtype=np.int64)
    if np.any(used > n):
        raise NumericalError(f"{estimator} spent more than n={n} samples")
    sq = np.array([(r.estimate - f.exact_integral) ** 2 for r in reports])
    reps = len(reports)
    mse = math.fsum(sq) / reps
    stderr = float(np.std(sq, ddof=1)) / math.sqrt(reps)
    scale = float(n) ** (1.0 + 2.0 / f.d)
    sigma, uniform = constants
    K = reports[0].plan.K if reports[0].plan is not None else None

    logger.info(
        "[benchmark] %s n=%d mse=%.4e +- %.1e (%.2f s, cpu=%.0f%%, rss=%.0f MiB)",
        estimator,
        n,
        mse,
        stderr,
        time.perf_counter() - started,
        get_process_cpu_percent(),
        get_process_rss_mb(),
    )
    return BenchmarkRow(
        estimator=estimator,
        n=int(n),
        mse=mse,
        mse_stderr=stderr,
        samples_used_mean=math.fsum(float(u) for u in used) / reps,
        oracle_bound=None if sigma is None else sigma / scale,
        uniform_bound=None if uniform is None else uniform / scale,
        K=K,
    )


def fit_report_rates(report: BenchmarkReport, estimators: Sequence[str]) -> None:
    """Fill ``report.rates`` for every estimator whose rows support a fit."""
    for estimator in estimators:
        rows = report.rows_for(estimator)
        try:
            report.rates[estimator] = fit_rate((row.n, row.mse) for row in rows)
        except (InsufficientSpan, NumericalError) as exc:
            logger.info("[benchmark] no rate for %s: %s", estimator, exc)


def run_benchmark(cfg: ExperimentConfig, *, lemma3: bool = False) -> BenchmarkReport:
    """
    Sweep every (estimator, budget) pair of ``cfg``.

    Raises
    ------
    MissingExactIntegral
        If the integrand has no reference integral.
    """
    cfg = cfg.validated()
    f = cfg.integrand()
    if f.exact_integral is None:
        raise MissingExactIntegral(f"integrand '{f.name}' has no exact integral")
    logger.info(
        "[benchmark] fn=%s estimators=%s budgets=%s reps=%d workers=%d seed=%d",
        f.name,
        ",".join(cfg.estimators),
        ",".join(str(n) for n in cfg.budgets),
        cfg.reps,
        cfg.workers,
        cfg.seed,
    )
    constants = _oracle_constants(f, cfg)
    report = BenchmarkReport(
        fn=f.name,
        d=f.d,
        exact_integral=float(f.exact_integral),
        reps=cfg.reps,
        seed=cfg.seed,
    )
    for estimator in cfg.estimators:
        for n in cfg.budgets:
            outcome = run_point(f, cfg, estimator, n, constants)
            if isinstance(outcome, SkippedPoint):
                report.skipped.append(outcome)
            else:
                report.rows.append(outcome)
    fit_report_rates(report, cfg.estimators)
    if lemma3:
        report.lemma3_pass_rate = verify_lemma3(cfg).pass_rate
    return report


__all__ = ["fit_report_rates", "run_benchmark", "run_point"]
