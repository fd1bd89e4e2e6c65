"""CSV / JSON serialisation of benchmark reports."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional

from ..core.errors import ConfigError
from ..harness.rates import RateFit
from ..harness.report import BenchmarkReport, BenchmarkRow, SkippedPoint

CSV_COLUMNS = (
    "estimator",
    "n",
    "mse",
    "mse_stderr",
    "samples_used_mean",
    "oracle_bound",
    "uniform_bound",
)

ReportFormat = Literal["csv", "json"]


def _real(value: Optional[float]) -> str:
    return "" if value is None else format(float(value), ".17g")


def _optional_float(text: str) -> Optional[float]:
    return None if text == "" else float(text)


def _row_mapping(row: BenchmarkRow) -> Dict[str, Any]:
    return {
        "estimator": row.estimator,
        "n": row.n,
        "mse": row.mse,
        "mse_stderr": row.mse_stderr,
        "samples_used_mean": row.samples_used_mean,
        "oracle_bound": row.oracle_bound,
        "uniform_bound": row.uniform_bound,
        "K": row.K,
    }


def report_to_mapping(report: BenchmarkReport) -> Dict[str, Any]:
    return {
        "fn": report.fn,
        "d": report.d,
        "exact_integral": report.exact_integral,
        "reps": report.reps,
        "seed": report.seed,
        "rows": [_row_mapping(row) for row in report.rows],
        "skipped": [{"estimator": s.estimator, "n": s.n, "reason": s.reason} for s in report.skipped],
        "rates": {name: fit.to_mapping() for name, fit in report.rates.items()},
        "lemma3_pass_rate": report.lemma3_pass_rate,
    }


def report_from_mapping(data: Mapping[str, Any]) -> BenchmarkReport:
    """Inverse of :func:`report_to_mapping`."""
    try:
        return BenchmarkReport(
            fn=str(data["fn"]),
            d=int(data["d"]),
            exact_integral=float(data["exact_integral"]),
            reps=int(data["reps"]),
            seed=int(data["seed"]),
            rows=[BenchmarkRow(**row) for row in data.get("rows", [])],
            skipped=[SkippedPoint(**s) for s in data.get("skipped", [])],
            rates={name: RateFit(**fit) for name, fit in (data.get("rates") or {}).items()},
            lemma3_pass_rate=data.get("lemma3_pass_rate"),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed benchmark report: {exc}") from None


def emit(report: BenchmarkReport, fmt: ReportFormat = "csv") -> bytes:
    """
    Serialise ``report`` as UTF-8 bytes with LF line endings.

    CSV holds one line per measured (estimator, n) in :data:`CSV_COLUMNS`
    order, reals at 17 significant digits and an empty cell for a missing
    bound; skipped points are left out. JSON carries the whole report.
    """
    if fmt == "json":
        text = json.dumps(report_to_mapping(report), indent=2, allow_nan=False) + "\n"
        return text.encode("utf-8")
    if fmt != "csv":
        raise ConfigError(f"format must be 'csv' or 'json', got {fmt!r}")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.rows:
        writer.writerow(
            [
                row.estimator,
                str(int(row.n)),
                _real(row.mse),
                _real(row.mse_stderr),
                _real(row.samples_used_mean),
                _real(row.oracle_bound),
                _real(row.uniform_bound),
            ]
        )
    return buffer.getvalue().encode("utf-8")


def write_report(report: BenchmarkReport, path: Path, fmt: ReportFormat = "csv") -> Path:
    """Write :func:`emit` output to ``path``; directories are created as needed."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(emit(report, fmt))
    return path


def load_report_json(path: Path) -> BenchmarkReport:
    with Path(path).open("r", encoding="utf-8") as fh:
        return report_from_mapping(json.load(fh))


def load_rows_csv(path: Path) -> List[BenchmarkRow]:
    """Read the rows of a CSV written by :func:`emit`."""
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(CSV_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ConfigError(f"{path} is missing columns {sorted(missing)}")
        rows = []
        for record in reader:
            rows.append(
                BenchmarkRow(
                    estimator=record["estimator"],
                    n=int(record["n"]),
                    mse=float(record["mse"]),
                    mse_stderr=float(record["mse_stderr"]),
                    samples_used_mean=float(record["samples_used_mean"]),
                    oracle_bound=_optional_float(record["oracle_bound"]),
                    uniform_bound=_optional_float(record["uniform_bound"]),
                )
            )
    return rows


__all__ = [
    "CSV_COLUMNS",
    "emit",
    "load_report_json",
    "load_rows_csv",
    "report_from_mapping",
    "report_to_mapping",
    "write_report",
]
