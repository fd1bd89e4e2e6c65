"""Experiment configuration for the benchmark harness and the CLI."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Literal, Mapping, MutableMapping, Optional, Tuple

import yaml

from ..analysis.quadrature import QuadratureGrid
from ..core.errors import ConfigError
from ..core.geometry import exact_root, default_strata
from ..core.integrand import Integrand, get_integrand
from ..estimators.allocation import delta_for_budget
from ..estimators.lmc_ucb import LeftoverPolicy, LmcUcbConfig

ESTIMATORS = ("crude", "uniform", "lmcucb")
RESULTS_ENV = "LMCUCB_RESULTS_DIR"

KPolicy = Literal["fixed", "theorem4"]
DeltaPolicy = Literal["fixed", "n_squared"]
OutputFormat = Literal["csv", "json"]


def default_output_dir() -> Path:
    """``$LMCUCB_RESULTS_DIR`` or ``./results``."""
    return Path(os.environ.get(RESULTS_ENV) or "results")


@dataclass(frozen=True)
class ExperimentConfig:
    """
    One benchmark sweep (or a single run for ``integrate`` / ``oracle``).

    ``k_policy="theorem4"`` picks ``K_n = floor(sqrt(n) ** (1/d)) ** d`` per
    budget; ``"fixed"`` uses ``K`` everywhere. The confidence scale comes from
    ``A`` when set, else from ``L`` (default: the integrand's own bound).
    """

    fn: str = "linear1d"
    estimators: Tuple[str, ...] = ESTIMATORS
    budgets: Tuple[int, ...] = (100, 400, 900, 1600, 2500)
    n: int = 100
    reps: int = 1000
    delta: float = 0.05
    delta_policy: DeltaPolicy = "fixed"
    k_policy: KPolicy = "theorem4"
    K: Optional[int] = None
    L: Optional[float] = None
    A: Optional[float] = None
    leftover: str = LeftoverPolicy.DISCARD.value
    seed: int = 0
    workers: int = 1
    grid_m: int = 4096
    out: Optional[str] = None
    format: OutputFormat = "csv"

    def validated(self) -> "ExperimentConfig":
        """Return a normalised copy, raising :class:`ConfigError` on invalid values."""
        estimators = tuple(dict.fromkeys(str(e).strip().lower() for e in self.estimators))
        unknown = [e for e in estimators if e not in ESTIMATORS]
        if not estimators or unknown:
            raise ConfigError(f"estimators must be a non-empty subset of {ESTIMATORS}, got {self.estimators}")
        budgets = tuple(sorted({int(n) for n in self.budgets}))
        if not budgets or budgets[0] < 1:
            raise ConfigError(f"budgets must be positive integers, got {self.budgets}")
        if int(self.n) < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        if int(self.reps) < 2:
            raise ConfigError(f"reps must be >= 2, got {self.reps}")
        if not 0.0 < float(self.delta) < 1.0:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if self.delta_policy not in ("fixed", "n_squared"):
            raise ConfigError(f"delta_policy must be 'fixed' or 'n_squared', got {self.delta_policy!r}")
        k_policy = self.k_policy
        if k_policy not in ("fixed", "theorem4"):
            raise ConfigError(f"k_policy must be 'fixed' or 'theorem4', got {self.k_policy!r}")
        if k_policy == "fixed" and (self.K is None or int(self.K) < 1):
            raise ConfigError(f"k_policy 'fixed' needs K >= 1, got {self.K}")
        if self.L is not None and float(self.L) < 0:
            raise ConfigError(f"L must be >= 0, got {self.L}")
        if self.A is not None and float(self.A) < 0:
            raise ConfigError(f"A must be >= 0, got {self.A}")
        if int(self.workers) < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if int(self.grid_m) < 32:
            raise ConfigError(f"grid_m must be >= 32, got {self.grid_m}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be 'csv' or 'json', got {self.format!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

        cfg = replace(
            self,
            fn=str(self.fn).strip().lower(),
            estimators=estimators,
            budgets=budgets,
            n=int(self.n),
            reps=int(self.reps),
            delta=float(self.delta),
            k_policy=k_policy,
            K=None if self.K is None else int(self.K),
            L=None if self.L is None else float(self.L),
            A=None if self.A is None else float(self.A),
            leftover=LeftoverPolicy.parse(self.leftover).value,
            seed=int(self.seed),
            workers=int(self.workers),
            grid_m=int(self.grid_m),
        )
        f = cfg.integrand()
        if "uniform" in estimators:
            for n in budgets:
                exact_root(n, f.d)
        if cfg.A is None and cfg.L is None and f.grad_bound is None:
            raise ConfigError(f"integrand '{f.name}' declares no gradient bound; pass --L or --A")
        return cfg

    def integrand(self) -> Integrand:
        return get_integrand(self.fn)

    def strata_for(self, n: int, d: int) -> int:
        """Stratum count used by LMC-UCB at budget ``n``."""
        if self.k_policy == "fixed":
            return int(self.K)
        return default_strata(n, d)

    def delta_for(self, n: int) -> float:
        return delta_for_budget(n) if self.delta_policy == "n_squared" else float(self.delta)

    def lmc_config(self, n: int, f: Integrand) -> LmcUcbConfig:
        """LMC-UCB parameters at budget ``n`` (raises ConfigError when ``n < 4K``)."""
        if self.A is not None:
            L, A = None, self.A
        else:
            L, A = (self.L if self.L is not None else f.grad_bound), None
        return LmcUcbConfig(
            K=self.strata_for(n, f.d),
            n=int(n),
            delta=self.delta_for(n),
            L=L,
            A_override=A,
            leftover_policy=LeftoverPolicy.parse(self.leftover),
        )

    def quadrature_grid(self, d: int) -> QuadratureGrid:
        """Oracle grid: ``grid_m`` nodes on the line, at most 256 per axis above."""
        m = self.grid_m if d == 1 else min(self.grid_m, 256)
        return QuadratureGrid(m=m)

    def output_path(self) -> Path:
        if self.out:
            return Path(self.out)
        return default_output_dir() / f"benchmark_{self.fn}.{self.format}"


_LIST_FIELDS = {"estimators", "budgets"}


def _recognized_fields() -> set[str]:
    """Return the dataclass field names accepted by :class:`ExperimentConfig`."""
    return {f.name for f in fields(ExperimentConfig)}


def _normalize_mapping(data: Mapping[str, Any]) -> MutableMapping[str, Any]:
    """Flatten a top-level ``experiment`` block and split comma-separated lists."""
    merged: MutableMapping[str, Any] = {}
    for key, value in data.items():
        if key == "experiment" and isinstance(value, Mapping):
            merged.update(value)
        else:
            merged[key] = value
    for key in _LIST_FIELDS & merged.keys():
        value = merged[key]
        if isinstance(value, str):
            merged[key] = tuple(v.strip() for v in value.split(",") if v.strip())
        elif isinstance(value, (int, float)):
            merged[key] = (value,)
        else:
            merged[key] = tuple(value)
    if "budgets" in merged:
        try:
            merged["budgets"] = tuple(int(float(v)) for v in merged["budgets"])
        except (TypeError, ValueError):
            raise ConfigError(f"budgets must be integers, got {merged['budgets']!r}") from None
    return merged


def config_from_mapping(
    data: Mapping[str, Any] | None,
    base: ExperimentConfig | None = None,
) -> ExperimentConfig:
    """Build :class:`ExperimentConfig` from ``data`` on top of ``base`` (unknown keys ignored)."""
    base = base or ExperimentConfig()
    if not data:
        return base.validated()
    normalized = _normalize_mapping(data)
    known = _recognized_fields()
    payload = {key: normalized[key] for key in normalized.keys() & known}
    if payload.get("K") is not None and "k_policy" not in payload:
        # a bare K means a fixed stratum count
        payload["k_policy"] = "fixed"
    return replace(base, **payload).validated()


def load_config(path: str | Path | None) -> ExperimentConfig:
    """
    Load an experiment from a JSON or YAML file.

    Missing files fall back to the default :class:`ExperimentConfig`.
    """
    if path is None:
        return ExperimentConfig().validated()
    cfg_path = Path(path)
    if not cfg_path.exists():
        return ExperimentConfig().validated()
    with cfg_path.open("r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    if not isinstance(raw, Mapping):
        raise ConfigError(f"Expected mapping in {cfg_path}, got {type(raw).__name__}")
    return config_from_mapping(raw)


__all__ = [
    "ESTIMATORS",
    "ExperimentConfig",
    "config_from_mapping",
    "default_output_dir",
    "load_config",
]
