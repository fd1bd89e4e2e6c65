"""Developer tooling: opt-in timing via :func:`debug.time_block`."""

from .debug import debug_enabled, time_block

__all__ = ["debug_enabled", "time_block"]
