"""Seeded random streams for reproducible estimates.

A run is identified by ``RngSpec(seed, stream)``. Each phase of an estimator
(and, for LMC-UCB's main phase, each stratum) draws from its own child
stream::

    SeedSequence(entropy=seed, spawn_key=(stream, phase, *extra))

so the number of points an allocation puts in one stratum never shifts the
points drawn anywhere else, and two estimators sharing a spec share their
initialisation draws.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import ConfigError

_SEED_LIMIT = 2**64


class Phase(IntEnum):
    """Child-stream labels, one per sampling phase."""

    CRUDE = 0
    UNIFORM = 1
    INIT = 2
    MAIN = 3
    LEFTOVER = 4


@dataclass(frozen=True)
class RngSpec:
    """Root seed plus stream id; identical specs reproduce identical points."""

    seed: int
    stream: int = 0

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) < _SEED_LIMIT:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if int(self.stream) < 0:
            raise ConfigError(f"stream id must be >= 0, got {self.stream}")

    def generator(self, phase: Phase, *extra: int) -> np.random.Generator:
        """Independent generator for ``phase`` (and optional sub-labels such as a stratum)."""
        seq = np.random.SeedSequence(
            entropy=int(self.seed),
            spawn_key=(int(self.stream), int(phase), *(int(e) for e in extra)),
        )
        return np.random.Generator(np.random.PCG64(seq))

    def fork(self, stream: int) -> "RngSpec":
        """Same root seed on another stream."""
        return RngSpec(seed=self.seed, stream=int(stream))


def derive_seed(root: int, *labels: int) -> int:
    """Deterministic 64-bit seed for ``labels`` under ``root`` (order of calls is irrelevant)."""
    seq = np.random.SeedSequence(entropy=int(root), spawn_key=tuple(int(v) for v in labels))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


__all__ = ["Phase", "RngSpec", "derive_seed"]
