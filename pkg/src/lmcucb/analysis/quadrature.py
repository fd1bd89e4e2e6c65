"""Composite tensor-product quadrature over boxes of [0, 1]^d."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, List, Literal, Sequence, Tuple

import numpy as np
from scipy import special

from ..core.errors import ConfigError
from ..core.geometry import Box

QuadratureRule = Literal["midpoint", "gauss_legendre"]
PointFn = Callable[[np.ndarray], np.ndarray]

GL_ORDER = 8
# points evaluated per call of the integrand
TILE_POINTS = 1 << 16


@lru_cache(maxsize=16)
def _legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = special.roots_legendre(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _panel_order(m: int, rule: QuadratureRule) -> int:
    if rule == "midpoint":
        return 1
    for order in range(GL_ORDER, 0, -1):
        if m % order == 0:
            return order
    return 1


def _share_panels(lengths: Sequence[float], panels: int) -> List[int]:
    """Largest-remainder split of ``panels`` over segments, at least one each."""
    total = float(sum(lengths))
    ideal = [panels * length / total for length in lengths]
    alloc = [max(1, int(math.floor(v))) for v in ideal]
    while sum(alloc) < panels:
        gaps = [v - a for v, a in zip(ideal, alloc)]
        alloc[gaps.index(max(gaps))] += 1
    while sum(alloc) > panels:
        gaps = [v - a if a > 1 else math.inf for v, a in zip(ideal, alloc)]
        alloc[gaps.index(min(gaps))] -= 1
    return alloc


@dataclass(frozen=True)
class QuadratureGrid:
    """
    ``m`` nodes per axis, laid out as composite panels.

    Parameters
    ----------
    m:
        Nodes per axis over the integration box (``m**d`` nodes in total).
    rule:
        ``"gauss_legendre"`` (panels of up to 8 nodes, the largest order
        dividing ``m``) or ``"midpoint"`` (one node per panel).
    split_points:
        Interior coordinates in (0, 1) where panels must break, on every
        axis. Integrand break-points are merged in at integration time.
    """

    m: int
    rule: QuadratureRule = "gauss_legendre"
    split_points: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if int(self.m) < 1:
            raise ConfigError(f"nodes per axis must be >= 1, got {self.m}")
        if self.rule not in ("midpoint", "gauss_legendre"):
            raise ConfigError(f"rule must be 'midpoint' or 'gauss_legendre', got {self.rule!r}")
        splits = tuple(sorted({float(s) for s in self.split_points}))
        if any(not 0.0 < s < 1.0 for s in splits):
            raise ConfigError(f"split points must lie strictly inside (0, 1), got {splits}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "split_points", splits)

    def refined(self, factor: int = 2) -> "QuadratureGrid":
        return QuadratureGrid(m=self.m * int(factor), rule=self.rule, split_points=self.split_points)

    def axis_rule(
        self, lo: float, hi: float, breakpoints: Iterable[float] = ()
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Nodes and weights of the composite rule on ``[lo, hi]``.

        Returns
        -------
        nodes, weights : np.ndarray
            ``m`` nodes; the weights sum to ``hi - lo``.
        """
        cuts = sorted({s for s in (*self.split_points, *breakpoints) if lo < s < hi})
        edges = [lo, *cuts, hi]
        lengths = [b - a for a, b in zip(edges[:-1], edges[1:])]
        order = _panel_order(self.m, self.rule)
        if self.m // order < len(lengths):
            order = 1
        if self.m < len(lengths):
            raise ConfigError(
                f"{self.m} nodes per axis cannot cover {len(lengths)} segments split at {cuts}"
            )
        ref_nodes, ref_weights = (
            (np.zeros(1), np.full(1, 2.0)) if order == 1 else _legendre(order)
        )
        nodes, weights = [], []
        for (a, b), count in zip(zip(edges[:-1], edges[1:]), _share_panels(lengths, self.m // order)):
            starts = a + (b - a) * np.arange(count) / count
            half = 0.5 * (b - a) / count
            nodes.append((starts[:, None] + half * (ref_nodes[None, :] + 1.0)).ravel())
            weights.append(np.broadcast_to(half * ref_weights, (count, order)).ravel())
        return np.concatenate(nodes), np.concatenate(weights)

    def integrate(self, g: PointFn, box: Box, breakpoints: Iterable[float] = ()) -> float:
        """
        Integral of ``g`` over ``box``; ``g`` maps ``(N, d)`` points to ``(N,)`` values.

        Tiles are summed with :func:`math.fsum` so the result does not depend
        on the tiling.
        """
        bps = tuple(breakpoints)
        axes = [self.axis_rule(lo, hi, bps) for lo, hi in zip(box.lower, box.upper)]
        return tensor_integrate(g, axes)


def tensor_integrate(g: PointFn, axes: Sequence[Tuple[np.ndarray, np.ndarray]]) -> float:
    """Tensor-product rule from per-axis ``(nodes, weights)``."""
    head_nodes, head_weights = axes[0]
    rest = axes[1:]
    if rest:
        rest_pts = np.stack(
            [c.ravel() for c in np.meshgrid(*(n for n, _ in rest), indexing="ij")], axis=1
        )
        rest_w = np.ones(1)
        for _, w in rest:
            rest_w = np.multiply.outer(rest_w, w).ravel()
    else:
        rest_pts = np.empty((1, 0))
        rest_w = np.ones(1)
    rows = max(1, TILE_POINTS // rest_w.size)
    partials = []
    for start in range(0, head_nodes.size, rows):
        x0 = head_nodes[start : start + rows]
        w0 = head_weights[start : start + rows]
        pts = np.concatenate(
            [np.repeat(x0, rest_w.size)[:, None], np.tile(rest_pts, (x0.size, 1))], axis=1
        )
        values = np.asarray(g(pts), dtype=float).reshape(-1)
        partials.append(float(np.dot(values, np.multiply.outer(w0, rest_w).ravel())))
    return math.fsum(partials)


__all__ = ["GL_ORDER", "QuadratureGrid", "QuadratureRule", "tensor_integrate"]
