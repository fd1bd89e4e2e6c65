"""Hyper-cubic partitions of the unit cube and their two-layer sub-partitions.

Strata and sub-strata are indexed row-major over their lattice coordinates
(last axis fastest, the ``numpy.ravel_multi_index`` convention). Cells are
closed on the upper side: a point lying on a shared face belongs to the cell
with the smaller index, so point location is a total function on [0, 1]^d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike

from .errors import ConfigError, IndexOutOfRange, NotPerfectPower


# ---------------------------------------------------------------------------
# Exact integer helpers
# ---------------------------------------------------------------------------

def integer_root(value: int, d: int) -> int:
    """
    Return ``floor(value ** (1/d))`` using exact integer comparisons.

    The floating-point root is only a starting guess; it is corrected up or
    down until ``r**d <= value < (r+1)**d`` holds in integer arithmetic.
    """
    value = int(value)
    d = int(d)
    if d < 1:
        raise ConfigError(f"dimension must be >= 1, got {d}")
    if value < 0:
        raise ConfigError(f"value must be >= 0, got {value}")
    if value < 2 or d == 1:
        return value
    if d == 2:
        return math.isqrt(value)
    guess = int(round(value ** (1.0 / d)))
    while guess > 0 and guess**d > value:
        guess -= 1
    while (guess + 1) ** d <= value:
        guess += 1
    return guess


def is_perfect_power(value: int, d: int) -> bool:
    """True when ``value == l**d`` for some positive integer ``l``."""
    if value < 1:
        return False
    return integer_root(value, d) ** d == value


def exact_root(value: int, d: int) -> int:
    """Return ``l`` with ``l**d == value`` or raise :class:`NotPerfectPower`."""
    root = integer_root(value, d)
    if root < 1 or root**d != value:
        raise NotPerfectPower(int(value), int(d))
    return root


def default_strata(n: int, d: int) -> int:
    """
    Stratum count ``K_n = floor(sqrt(n) ** (1/d)) ** d``.

    ``sqrt(n)`` is floored first; the largest ``l`` with ``l**d <= isqrt(n)``
    is then found by exact search.
    """
    if n < 1:
        raise ConfigError(f"budget n must be >= 1, got {n}")
    l = integer_root(math.isqrt(int(n)), d)
    return max(1, l) ** int(d)


@lru_cache(maxsize=256)
def _lattice(m: int, d: int) -> np.ndarray:
    coords = np.indices((m,) * d).reshape(d, -1).T.astype(np.int64)
    coords.setflags(write=False)
    return coords


def lattice_coordinates(m: int, d: int) -> np.ndarray:
    """Row-major ``(m**d, d)`` array of integer lattice coordinates (read-only)."""
    if m < 1 or d < 1:
        raise ConfigError(f"lattice needs m >= 1 and d >= 1, got m={m}, d={d}")
    return _lattice(int(m), int(d))


# ---------------------------------------------------------------------------
# Boxes and partitions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box ``[lower, upper]`` inside the unit cube."""

    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.lower) != len(self.upper):
            raise ConfigError("lower and upper must have the same dimension")
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise ConfigError(f"lower must be <= upper, got {self.lower} / {self.upper}")

    @property
    def d(self) -> int:
        return len(self.lower)

    @property
    def sides(self) -> np.ndarray:
        return np.asarray(self.upper) - np.asarray(self.lower)

    @property
    def measure(self) -> float:
        return float(np.prod(self.sides))

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (np.asarray(self.lower) + np.asarray(self.upper))

    def contains(self, x: ArrayLike) -> bool:
        point = np.asarray(x, dtype=float).reshape(-1)
        return bool(np.all(point >= self.lower) and np.all(point <= self.upper))


def _fraction_box(lower_idx: Sequence[int], denom: int) -> Box:
    lower = tuple(i / denom for i in lower_idx)
    upper = tuple((i + 1) / denom for i in lower_idx)
    return Box(lower=lower, upper=upper)


@dataclass(frozen=True)
class HyperCubePartition:
    """Partition of [0, 1]^d into ``cells_per_axis ** d`` equal hyper-cubes."""

    d: int
    cells_per_axis: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ConfigError(f"dimension must be >= 1, got {self.d}")
        if self.cells_per_axis < 1:
            raise ConfigError(f"cells_per_axis must be >= 1, got {self.cells_per_axis}")

    @property
    def K(self) -> int:
        return self.cells_per_axis**self.d

    @property
    def weight(self) -> float:
        """Measure ``w_k = 1/K`` shared by every stratum."""
        return 1.0 / self.K

    @property
    def side(self) -> float:
        return 1.0 / self.cells_per_axis

    def weights(self) -> np.ndarray:
        return np.full(self.K, self.weight)

    def check_index(self, k: int) -> int:
        if not 0 <= int(k) < self.K:
            raise IndexOutOfRange(f"stratum index must be in [0, {self.K}), got {k}")
        return int(k)

    def coordinates(self, k: int) -> Tuple[int, ...]:
        """Lattice coordinate ``(i_1, ..., i_d)`` of stratum ``k``."""
        k = self.check_index(k)
        return tuple(int(c) for c in np.unravel_index(k, (self.cells_per_axis,) * self.d))

    def lower_corners(self) -> np.ndarray:
        """``(K, d)`` array of the lower corners of every stratum."""
        return lattice_coordinates(self.cells_per_axis, self.d) / self.cells_per_axis

    def locate(self, x: ArrayLike) -> np.ndarray:
        """Stratum index for each row of ``x`` (shape ``(m, d)``)."""
        coords = _axis_cells(_as_points(x, self.d), self.cells_per_axis)
        return np.ravel_multi_index(tuple(coords.T), (self.cells_per_axis,) * self.d)


@dataclass(frozen=True)
class SubStratification:
    """Split of every stratum ``k`` of ``parent`` into ``counts[k] = m_k**d`` equal cells."""

    parent: HyperCubePartition
    counts: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.counts) != self.parent.K:
            raise ConfigError(
                f"expected {self.parent.K} sub-strata counts, got {len(self.counts)}"
            )
        for count in self.counts:
            exact_root(int(count), self.parent.d)

    @classmethod
    def uniform(cls, parent: HyperCubePartition, count: int) -> "SubStratification":
        return cls(parent=parent, counts=(int(count),) * parent.K)

    @property
    def d(self) -> int:
        return self.parent.d

    def cells_per_axis(self, k: int) -> int:
        """``m_k`` such that stratum ``k`` holds ``m_k**d`` sub-strata."""
        k = self.parent.check_index(k)
        return integer_root(self.counts[k], self.d)

    def axis_counts(self) -> np.ndarray:
        return np.array([integer_root(c, self.d) for c in self.counts], dtype=np.int64)

    def measure(self, k: int) -> float:
        k = self.parent.check_index(k)
        return self.parent.weight / self.counts[k]

    def total_measure(self) -> float:
        """Sum of every sub-stratum measure (1 up to rounding)."""
        return math.fsum(
            self.parent.weight / count for count in self.counts for _ in range(count)
        )

    def cell_lower_corners(self, k: int) -> Tuple[np.ndarray, float]:
        """Lower corners ``(S_k, d)`` of the sub-strata of ``k`` and their common side."""
        m = self.cells_per_axis(k)
        l = self.parent.cells_per_axis
        origin = np.asarray(self.parent.coordinates(k), dtype=np.int64) * m
        fine = origin + lattice_coordinates(m, self.d)
        return fine / (l * m), 1.0 / (l * m)

    def locate(self, x: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
        """Return ``(k, i)`` index arrays for each row of ``x``."""
        points = _as_points(x, self.d)
        l = self.parent.cells_per_axis
        coarse = _axis_cells(points, l)
        k = np.ravel_multi_index(tuple(coarse.T), (l,) * self.d)
        m = self.axis_counts()[k][:, None]
        local = np.ceil(points * (l * m)).astype(np.int64) - 1 - coarse * m
        local = np.clip(local, 0, m - 1)
        i = np.zeros(points.shape[0], dtype=np.int64)
        for axis in range(self.d):
            i = i * m[:, 0] + local[:, axis]
        return k, i


def _as_points(x: ArrayLike, d: int) -> np.ndarray:
    points = np.asarray(x, dtype=float)
    return points.reshape(-1, d)


def _axis_cells(points: np.ndarray, cells: int) -> np.ndarray:
    # ceil(x*l) - 1 sends shared faces to the lower cell; x = 0 is clipped into cell 0
    idx = np.ceil(points * cells).astype(np.int64) - 1
    return np.clip(idx, 0, cells - 1)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def make_partition(d: int, K: int) -> HyperCubePartition:
    """
    Build the partition of [0, 1]^d into ``K`` equal hyper-cubes.

    Raises
    ------
    NotPerfectPower
        If no integer ``l`` satisfies ``l**d == K``.
    """
    if d < 1:
        raise ConfigError(f"dimension must be >= 1, got {d}")
    if K < 1:
        raise ConfigError(f"stratum count must be >= 1, got {K}")
    return HyperCubePartition(d=int(d), cells_per_axis=exact_root(int(K), int(d)))


def stratum_box(p: HyperCubePartition, k: int) -> Box:
    """The ``k``-th stratum of ``p`` in row-major lattice order."""
    return _fraction_box(p.coordinates(k), p.cells_per_axis)


def substratum_box(s: SubStratification, k: int, i: int) -> Box:
    """The ``i``-th of the ``S_k`` equal hyper-cubes tiling stratum ``k``."""
    k = s.parent.check_index(k)
    count = s.counts[k]
    if not 0 <= int(i) < count:
        raise IndexOutOfRange(f"sub-stratum index must be in [0, {count}), got {i}")
    m = s.cells_per_axis(k)
    local = np.unravel_index(int(i), (m,) * s.d)
    origin = s.parent.coordinates(k)
    fine = [o * m + int(j) for o, j in zip(origin, local)]
    return _fraction_box(fine, s.parent.cells_per_axis * m)


def locate(s: SubStratification, x: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorised point location, see :meth:`SubStratification.locate`."""
    return s.locate(x)


__all__ = [
    "Box",
    "HyperCubePartition",
    "SubStratification",
    "exact_root",
    "integer_root",
    "is_perfect_power",
    "lattice_coordinates",
    "locate",
    "make_partition",
    "stratum_box",
    "substratum_box",
    "default_strata",
]
