"""Helper script to profile one benchmark sweep with cProfile."""

from __future__ import annotations

import argparse
import cProfile
import pstats
import sys
from pathlib import Path
from typing import List


def _ensure_src_on_path() -> None:
    repo_root = Path(__file__).resolve().parent
    src_dir = repo_root / "src"
    if str(src_dir) not in sys.path:
        sys.path.insert(0, str(src_dir))


def _parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Profile an lmcucb benchmark sweep")
    parser.add_argument(
        "--prof-output",
        type=str,
        default="benchmark_profile.prof",
        help="cProfile output file (default: benchmark_profile.prof)",
    )
    parser.add_argument(
        "--fn",
        type=str,
        default="oscillator1d",
        help="Corpus function to benchmark (default: oscillator1d)",
    )
    parser.add_argument(
        "--budgets",
        type=str,
        default="100,400,900",
        help="Comma-separated budgets (default: 100,400,900)",
    )
    parser.add_argument(
        "--reps",
        type=int,
        default=500,
        help="Replications per point (default: 500)",
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=1,
        help="Worker threads (default: 1)",
    )
    parser.add_argument(
        "--A",
        type=float,
        default=10.0,
        help="Confidence scale override (default: 10)",
    )
    parser.add_argument(
        "--print-stats",
        action="store_true",
        help="Print the top cumulative functions after profiling",
    )

    args = parser.parse_args()

    if args.reps < 2:
        parser.error("--reps must be at least 2")

    if args.workers <= 0:
        parser.error("--workers must be positive")

    return args


def _build_cli_argv(args: argparse.Namespace, out_path: Path) -> List[str]:
    argv = ["benchmark", "--fn", args.fn, "--budgets", args.budgets]
    argv.extend(["--reps", str(args.reps)])
    argv.extend(["--workers", str(args.workers)])
    argv.extend(["--A", str(args.A)])
    argv.extend(["--out", str(out_path)])
    return argv


def main() -> None:
    _ensure_src_on_path()
    args = _parse_args()
    prof_path = Path(args.prof_output).expanduser().resolve()
    # Ensure the output directory exists if the user passed a nested path
    prof_path.parent.mkdir(parents=True, exist_ok=True)
    cli_argv = _build_cli_argv(args, prof_path.with_suffix(".csv"))

    from lmcucb.harness import cli

    profiler = cProfile.Profile()
    profiler.enable()
    try:
        code = cli.main(cli_argv)
    finally:
        profiler.disable()

    profiler.dump_stats(str(prof_path))
    print(f"[profile] cProfile stats written to {prof_path}")

    if args.print_stats:
        stats = pstats.Stats(profiler)
        stats.sort_stats("cumulative").print_stats(20)

    if code:
        sys.exit(code)


if __name__ == "__main__":
    main()
