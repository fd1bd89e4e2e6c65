"""Helpers for querying local process resource usage."""

from __future__ import annotations

import os
from typing import Final

import psutil

_PROCESS: Final[psutil.Process] = psutil.Process(os.getpid())


def get_process_cpu_percent() -> float:
    """
    Return CPU usage of this process since the previous call.

    psutil's cpu_percent needs to be called periodically; the first call
    returns 0.0, which is fine for progress log lines.
    """
    try:
        return float(_PROCESS.cpu_percent(interval=None))
    except Exception:
        return 0.0


def get_process_rss_mb() -> float:
    """Resident set size of this process in MiB (0.0 when unavailable)."""
    try:
        return float(_PROCESS.memory_info().rss) / (1024.0 * 1024.0)
    except Exception:
        return 0.0
