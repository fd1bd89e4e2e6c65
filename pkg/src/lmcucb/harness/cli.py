"""Command-line entry point: ``lmcucb <command> [flags]``.

Commands
--------
integrate      one estimate, printed with its sampling ledger
benchmark      replicated MSE sweep written as CSV or JSON
rates          log-log slopes fitted from a previous benchmark file
oracle         Sigma, Sigma_K, lambda and the uniform constant of a function
verify-lemma3  empirical pass rate of the sub-strata lower bound

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Sequence

from ..analysis.oracle import oracle_summary
from ..config.experiment import ESTIMATORS, ExperimentConfig, config_from_mapping, load_config
from ..core.errors import ConfigError, InsufficientSpan, NumericalError
from ..core.rng import RngSpec
from ..dataio.report_io import emit, load_report_json, load_rows_csv, write_report
from ..estimators.baselines import crude_mc, uniform_stratified
from ..estimators.lmc_ucb import LeftoverPolicy, lmc_ucb
from ..tools.debug import time_block
from .benchmark import run_benchmark
from .lemma3 import verify_lemma3, verify_xi_event
from .rates import fit_rate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

# flag dest -> ExperimentConfig field
_OVERRIDES = {
    "fn": "fn",
    "n": "n",
    "budgets": "budgets",
    "estimators": "estimators",
    "reps": "reps",
    "K": "K",
    "delta": "delta",
    "delta_policy": "delta_policy",
    "L": "L",
    "A": "A",
    "leftover": "leftover",
    "seed": "seed",
    "workers": "workers",
    "grid_m": "grid_m",
    "out": "out",
    "format": "format",
}


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="JSON/YAML experiment file")
    common.add_argument("--fn", type=str, default=None, help="Corpus function name (default: linear1d)")
    common.add_argument("--d", type=int, default=None, help="Expected dimension of --fn (checked)")
    common.add_argument("--n", type=int, default=None, help="Budget for integrate/oracle/verify-lemma3")
    common.add_argument("--budgets", type=str, default=None, help="Comma-separated budgets for benchmark")
    common.add_argument(
        "--estimators", type=str, default=None, help=f"Comma-separated subset of {','.join(ESTIMATORS)}"
    )
    common.add_argument("--reps", type=int, default=None, help="Replications per (estimator, n)")
    common.add_argument("--K", type=int, default=None, help="Fixed stratum count (default: floor(sqrt(n)^(1/d))^d)")
    common.add_argument("--delta", type=float, default=None, help="Confidence level in (0, 1)")
    common.add_argument(
        "--delta-policy",
        dest="delta_policy",
        choices=("fixed", "n_squared"),
        default=None,
        help="'n_squared' uses delta_n = 1/n^2",
    )
    common.add_argument("--L", type=float, default=None, help="Gradient-norm bound (default: the function's)")
    common.add_argument("--A", type=float, default=None, help="Confidence scale override")
    common.add_argument(
        "--leftover",
        choices=[p.value for p in LeftoverPolicy],
        default=None,
        help="What LMC-UCB does with the unspent budget",
    )
    common.add_argument("--seed", type=int, default=None, help="Root seed")
    common.add_argument("--workers", type=int, default=None, help="Worker threads for replications")
    common.add_argument("--grid-m", dest="grid_m", type=int, default=None, help="Quadrature nodes per axis")
    common.add_argument("--out", type=str, default=None, help="Output file ('-' for stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None, help="Output format")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="lmcucb", description="Adaptive stratified Monte-Carlo integration")
    sub = parser.add_subparsers(dest="command", required=True)

    integrate = sub.add_parser("integrate", parents=[common], help="Run one estimate")
    integrate.add_argument(
        "--estimator", choices=ESTIMATORS, default="lmcucb", help="Sampling scheme (default: lmcucb)"
    )
    integrate.set_defaults(handler=_cmd_integrate)

    bench = sub.add_parser("benchmark", parents=[common], help="Replicated MSE sweep")
    bench.add_argument("--lemma3", action="store_true", help="Also record the sub-strata lower-bound pass rate at --n")
    bench.set_defaults(handler=_cmd_benchmark)

    rates = sub.add_parser("rates", parents=[common], help="Fit log-log slopes from a benchmark file")
    rates.add_argument("source", type=str, help="CSV or JSON written by 'benchmark'")
    rates.set_defaults(handler=_cmd_rates)

    oracle = sub.add_parser("oracle", parents=[common], help="Oracle constants of a function")
    oracle.set_defaults(handler=_cmd_oracle)

    lemma3 = sub.add_parser("verify-lemma3", parents=[common], help="Sub-strata lower-bound pass rate at --n")
    lemma3.add_argument("--xi", action="store_true", help="Also check the std confidence event")
    lemma3.set_defaults(handler=_cmd_verify_lemma3)
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Defaults, then ``--config``, then explicit flags."""
    if args.config and not Path(args.config).exists():
        raise ConfigError(f"config file not found: {args.config}")
    base = load_config(args.config)
    overrides: Dict[str, Any] = {
        field: getattr(args, dest) for dest, field in _OVERRIDES.items() if getattr(args, dest) is not None
    }
    cfg = config_from_mapping(overrides, base=base) if overrides else base
    if args.d is not None and args.d != cfg.integrand().d:
        raise ConfigError(f"--d {args.d} does not match '{cfg.fn}' (d={cfg.integrand().d})")
    return cfg


def _print_json(data: Any) -> None:
    print(json.dumps(data, indent=2))


def _cmd_integrate(args: argparse.Namespace, cfg: ExperimentConfig) -> int:
    f = cfg.integrand()
    spec = RngSpec(seed=cfg.seed)
    with time_block(f"integrate {args.estimator} n={cfg.n}"):
        if args.estimator == "crude":
            report = crude_mc(f, cfg.n, spec)
        elif args.estimator == "uniform":
            report = uniform_stratified(f, cfg.n, spec)
        else:
            report = lmc_ucb(f, cfg.lmc_config(cfg.n, f), spec)
    data = {"fn": f.name, "d": f.d, **report.to_mapping()}
    if f.exact_integral is not None:
        data["exact_integral"] = f.exact_integral
        data["error"] = report.estimate - f.exact_integral
    _print_json(data)
    return EXIT_OK


def _cmd_benchmark(args: argparse.Namespace, cfg: ExperimentConfig) -> int:
    report = run_benchmark(cfg, lemma3=args.lemma3)
    if cfg.out == "-":
        sys.stdout.buffer.write(emit(report, cfg.format))
        sys.stdout.flush()
        return EXIT_OK
    path = write_report(report, cfg.output_path(), cfg.format)
    logger.info("[benchmark] wrote %d rows to %s", len(report.rows), path)
    print(path)
    return EXIT_OK


def _cmd_rates(args: argparse.Namespace, cfg: ExperimentConfig) -> int:
    source = Path(args.source)
    if source.suffix.lower() == ".json":
        rows = load_report_json(source).rows
    else:
        rows = load_rows_csv(source)
    results: Dict[str, Any] = {}
    last_error: Exception | None = None
    for estimator in dict.fromkeys(row.estimator for row in rows):
        try:
            fit = fit_rate((row.n, row.mse) for row in rows if row.estimator == estimator)
            results[estimator] = fit.to_mapping()
        except (InsufficientSpan, NumericalError) as exc:
            last_error = exc
            results[estimator] = {"error": str(exc)}
    if not any("slope" in v for v in results.values()):
        raise last_error or InsufficientSpan(f"{source} holds no rows")
    _print_json(results)
    return EXIT_OK


def _cmd_oracle(args: argparse.Namespace, cfg: ExperimentConfig) -> int:
    f = cfg.integrand()
    K = cfg.strata_for(cfg.n, f.d)
    with time_block(f"oracle {f.name} K={K}"):
        summary = oracle_summary(f, K, cfg.n, cfg.quadrature_grid(f.d))
    _print_json(summary.to_mapping())
    return EXIT_OK


def _cmd_verify_lemma3(args: argparse.Namespace, cfg: ExperimentConfig) -> int:
    data: Dict[str, Any] = {"lemma3": verify_lemma3(cfg).to_mapping()}
    if args.xi:
        data["xi_event"] = verify_xi_event(cfg).to_mapping()
    _print_json(data)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s:%(name)s:%(message)s")

    try:
        cfg = resolve_config(args)
        return args.handler(args, cfg)
    except ArithmeticError as exc:
        logger.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    except (ValueError, LookupError, OSError) as exc:
        logger.error("invalid configuration: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
