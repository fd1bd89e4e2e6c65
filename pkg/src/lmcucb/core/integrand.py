"""Integrands on [0, 1]^d and the named test corpus.

Every callable here is vectorised: ``fn`` maps an ``(m, d)`` array of points
to ``(m,)`` values and ``grad_fn`` maps it to ``(m, d)`` gradients. The
public :meth:`Integrand.eval` also accepts a single point (a scalar when
``d == 1``) and then returns a float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import Callable, Mapping, Optional, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy import special

from .errors import ConfigError, MissingGradient, ShapeMismatch
from .geometry import HyperCubePartition, make_partition

EvalFn = Callable[[np.ndarray], np.ndarray]
GradFn = Callable[[np.ndarray], np.ndarray]
Value = Union[float, np.ndarray]

FD_STEP = 1e-5


@dataclass(frozen=True)
class Integrand:
    """
    A function on [0, 1]^d with optional analytic references.

    Parameters
    ----------
    name:
        Corpus key, used by the CLI (``--fn``).
    d:
        Dimension of the domain.
    fn:
        Vectorised evaluation ``(m, d) -> (m,)``.
    grad_fn:
        Optional vectorised gradient ``(m, d) -> (m, d)``.
    exact_integral:
        Optional reference value of the integral over [0, 1]^d.
    grad_bound:
        Optional uniform bound ``L`` on ``||grad f||_2`` (the norm itself,
        not its square).
    breakpoints:
        Coordinates in (0, 1) where ``f`` or its gradient jumps, on every
        axis. Quadrature rules split their panels there.
    reference:
        Free-text provenance of ``exact_integral``.
    """

    name: str
    d: int
    fn: EvalFn = field(repr=False)
    grad_fn: Optional[GradFn] = field(default=None, repr=False)
    exact_integral: Optional[float] = None
    grad_bound: Optional[float] = None
    breakpoints: Tuple[float, ...] = ()
    reference: str = ""

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ConfigError(f"dimension must be >= 1, got {self.d}")
        if any(not 0.0 < b < 1.0 for b in self.breakpoints):
            raise ConfigError(f"breakpoints must lie strictly inside (0, 1), got {self.breakpoints}")

    def _points(self, x: ArrayLike) -> Tuple[np.ndarray, bool]:
        pts = np.asarray(x, dtype=float)
        single = pts.ndim == 0 or (pts.ndim == 1 and self.d > 1)
        return pts.reshape(-1, self.d), single

    @property
    def has_gradient(self) -> bool:
        return self.grad_fn is not None

    def eval(self, x: ArrayLike) -> Value:
        """Evaluate ``f`` at one point or at each row of an ``(m, d)`` array."""
        pts, single = self._points(x)
        values = np.asarray(self.fn(pts), dtype=float).reshape(-1)
        return float(values[0]) if single else values

    __call__ = eval

    def gradient(self, x: ArrayLike, *, fd_fallback: bool = False) -> np.ndarray:
        """
        Gradient at one point (``(d,)``) or at each row (``(m, d)``).

        Raises
        ------
        MissingGradient
            If no analytic gradient exists and ``fd_fallback`` is False.
        """
        pts, single = self._points(x)
        if self.grad_fn is not None:
            grads = np.asarray(self.grad_fn(pts), dtype=float).reshape(-1, self.d)
        elif fd_fallback:
            grads = finite_difference_gradient(self, pts)
        else:
            raise MissingGradient(f"integrand '{self.name}' has no analytic gradient")
        return grads[0] if single else grads


def finite_difference_gradient(f: Integrand, x: ArrayLike, h: float = FD_STEP) -> np.ndarray:
    """Central finite differences of ``f.fn``, one-sided against the cube faces."""
    pts = np.asarray(x, dtype=float).reshape(-1, f.d)
    grads = np.empty_like(pts)
    for axis in range(f.d):
        hi = pts.copy()
        lo = pts.copy()
        hi[:, axis] = np.minimum(pts[:, axis] + h, 1.0)
        lo[:, axis] = np.maximum(pts[:, axis] - h, 0.0)
        span = hi[:, axis] - lo[:, axis]
        grads[:, axis] = (f.fn(hi) - f.fn(lo)) / span
    return grads


def check_gradient(
    f: Integrand,
    rng: np.random.Generator,
    *,
    points: int = 100,
    h: float = FD_STEP,
    rtol: float = 1e-4,
) -> bool:
    """True when the analytic gradient matches central differences at random interior points."""
    pts = rng.uniform(h, 1.0 - h, size=(points, f.d))
    for bp in f.breakpoints:
        # keep the stencil off the jumps
        pts = np.where(np.abs(pts - bp) < 2 * h, pts + 4 * h, pts)
    analytic = f.gradient(pts)
    numeric = finite_difference_gradient(f, pts, h)
    return bool(np.all(np.abs(analytic - numeric) <= rtol * (1.0 + np.abs(analytic))))


def check_grad_bound(f: Integrand, rng: np.random.Generator, *, points: int = 10_000) -> bool:
    """True when ``||grad f||_2 <= L`` at ``points`` uniform random points."""
    if f.grad_bound is None:
        raise ConfigError(f"integrand '{f.name}' declares no gradient bound")
    norms = np.linalg.norm(f.gradient(rng.random((points, f.d))), axis=1)
    return bool(np.all(norms <= f.grad_bound))


# ---------------------------------------------------------------------------
# Piecewise-linear integrands
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PiecewiseLinearSpec:
    """``f(x) = <theta_k, x> + rho_k`` on stratum ``k`` of ``partition``."""

    partition: HyperCubePartition
    slopes: np.ndarray
    offsets: np.ndarray

    def __post_init__(self) -> None:
        slopes = np.array(self.slopes, dtype=float).reshape(self.partition.K, -1)
        offsets = np.array(self.offsets, dtype=float).reshape(-1)
        if slopes.shape != (self.partition.K, self.partition.d):
            raise ShapeMismatch(
                f"slopes must have shape {(self.partition.K, self.partition.d)}, got {slopes.shape}"
            )
        if offsets.shape != (self.partition.K,):
            raise ShapeMismatch(f"offsets must have shape ({self.partition.K},), got {offsets.shape}")
        slopes.setflags(write=False)
        offsets.setflags(write=False)
        object.__setattr__(self, "slopes", slopes)
        object.__setattr__(self, "offsets", offsets)

    @property
    def d(self) -> int:
        return self.partition.d

    @property
    def K(self) -> int:
        return self.partition.K

    def eval(self, x: ArrayLike) -> np.ndarray:
        pts = np.asarray(x, dtype=float).reshape(-1, self.d)
        k = self.partition.locate(pts)
        return np.einsum("ij,ij->i", self.slopes[k], pts) + self.offsets[k]

    def gradient(self, x: ArrayLike) -> np.ndarray:
        pts = np.asarray(x, dtype=float).reshape(-1, self.d)
        return self.slopes[self.partition.locate(pts)].copy()

    def slope_norms(self) -> np.ndarray:
        return np.linalg.norm(self.slopes, axis=1)


def pl_sigma_k(spec: PiecewiseLinearSpec, k: int) -> float:
    """Closed-form ``sigma_k = ||theta_k||_2 * w_k**(1/d) / (2*sqrt(3))``."""
    k = spec.partition.check_index(k)
    side = spec.partition.weight ** (1.0 / spec.d)
    return float(np.linalg.norm(spec.slopes[k]) * side / (2.0 * math.sqrt(3.0)))


def piecewise_linear_integrand(spec: PiecewiseLinearSpec, name: str = "piecewise_linear") -> Integrand:
    """Wrap ``spec`` as an :class:`Integrand` with exact integral, gradient and ``L``."""
    part = spec.partition
    centers = part.lower_corners() + 0.5 * part.side
    cell_means = np.einsum("ij,ij->i", spec.slopes, centers) + spec.offsets
    integral = math.fsum(part.weight * float(v) for v in cell_means)
    l = part.cells_per_axis
    return Integrand(
        name=name,
        d=spec.d,
        fn=spec.eval,
        grad_fn=spec.gradient,
        exact_integral=integral,
        grad_bound=float(spec.slope_norms().max()),
        breakpoints=tuple(j / l for j in range(1, l)),
        reference="closed form: sum_k w_k (<theta_k, c_k> + rho_k)",
    )


def random_piecewise_linear(
    d: int,
    K: int,
    rng: np.random.Generator,
    *,
    slope_scale: float = 5.0,
) -> PiecewiseLinearSpec:
    """Draw a piecewise-linear spec with Gaussian slopes and uniform offsets."""
    part = make_partition(d, K)
    return PiecewiseLinearSpec(
        partition=part,
        slopes=rng.normal(scale=slope_scale, size=(part.K, d)),
        offsets=rng.uniform(-1.0, 1.0, size=part.K),
    )


# ---------------------------------------------------------------------------
# Corpus
# ---------------------------------------------------------------------------

OSCILLATOR_SHIFT = 0.1
OSCILLATOR_JUMP = 0.9
OSCILLATOR_POLE = 0.7
OSCILLATOR_L_GRID = 1_000_000
OSCILLATOR_L_INFLATION = 1.1


def _osc_values(x: np.ndarray) -> np.ndarray:
    t = x[:, 0]
    base = np.sin(1.0 / (t + OSCILLATOR_SHIFT))
    jump = t > OSCILLATOR_JUMP
    extra = np.zeros_like(t)
    extra[jump] = np.sin(1.0 / (t[jump] - OSCILLATOR_POLE))
    return base + extra


def _osc_gradient(x: np.ndarray) -> np.ndarray:
    t = x[:, 0]
    u = t + OSCILLATOR_SHIFT
    grad = -np.cos(1.0 / u) / u**2
    jump = t > OSCILLATOR_JUMP
    v = t[jump] - OSCILLATOR_POLE
    grad[jump] += -np.cos(1.0 / v) / v**2
    return grad[:, None]


def _sin_inverse_antiderivative(x: float, shift: float) -> float:
    # d/dx [ (x+a) sin(1/(x+a)) - Ci(1/(x+a)) ] = sin(1/(x+a))
    u = x + shift
    _, ci = special.sici(1.0 / u)
    return u * math.sin(1.0 / u) - float(ci)


def oscillator_exact_integral() -> float:
    """Integral of the oscillator, via the sine/cosine-integral closed form."""
    main = _sin_inverse_antiderivative(1.0, OSCILLATOR_SHIFT) - _sin_inverse_antiderivative(
        0.0, OSCILLATOR_SHIFT
    )
    tail = _sin_inverse_antiderivative(1.0, -OSCILLATOR_POLE) - _sin_inverse_antiderivative(
        OSCILLATOR_JUMP, -OSCILLATOR_POLE
    )
    return main + tail


def oscillator_grad_bound() -> float:
    """Max of ``|f'|`` over a 10^6-point grid of [0, 1], inflated by 10%."""
    grid = np.linspace(0.0, 1.0, OSCILLATOR_L_GRID)[:, None]
    return OSCILLATOR_L_INFLATION * float(np.max(np.abs(_osc_gradient(grid))))


def _product_values(x: np.ndarray) -> np.ndarray:
    return np.prod(np.sin(np.pi * x), axis=1)


def _product_gradient(x: np.ndarray) -> np.ndarray:
    s = np.sin(np.pi * x)
    c = np.cos(np.pi * x)
    return np.pi * np.stack([c[:, 0] * s[:, 1], s[:, 0] * c[:, 1]], axis=1)


DEFAULT_PIECEWISE = PiecewiseLinearSpec(
    partition=HyperCubePartition(d=1, cells_per_axis=4),
    slopes=np.array([[1.0], [4.0], [0.5], [8.0]]),
    offsets=np.array([0.0, -1.0, 1.0, -6.0]),
)


@lru_cache(maxsize=1)
def _build_corpus() -> Mapping[str, Integrand]:
    members = [
        Integrand(
            name="constant1d",
            d=1,
            fn=lambda x: np.full(x.shape[0], 1.5),
            grad_fn=lambda x: np.zeros_like(x),
            exact_integral=1.5,
            grad_bound=0.0,
            reference="analytic",
        ),
        Integrand(
            name="linear1d",
            d=1,
            fn=lambda x: x[:, 0].copy(),
            grad_fn=lambda x: np.ones_like(x),
            exact_integral=0.5,
            grad_bound=1.0,
            reference="analytic",
        ),
        Integrand(
            name="quadratic1d",
            d=1,
            fn=lambda x: x[:, 0] ** 2,
            grad_fn=lambda x: 2.0 * x,
            exact_integral=1.0 / 3.0,
            grad_bound=2.0,
            reference="analytic",
        ),
        Integrand(
            name="oscillator1d",
            d=1,
            fn=_osc_values,
            grad_fn=_osc_gradient,
            exact_integral=oscillator_exact_integral(),
            grad_bound=oscillator_grad_bound(),
            breakpoints=(OSCILLATOR_JUMP,),
            reference="closed form via Ci; matches Gauss-Legendre at 10^6 nodes split at 0.9",
        ),
        Integrand(
            name="product2d",
            d=2,
            fn=_product_values,
            grad_fn=_product_gradient,
            exact_integral=4.0 / math.pi**2,
            grad_bound=math.pi,
            reference="analytic",
        ),
        piecewise_linear_integrand(DEFAULT_PIECEWISE, name="piecewise1d"),
    ]
    return MappingProxyType({f.name: f for f in members})


def corpus() -> Mapping[str, Integrand]:
    """Named test integrands (read-only mapping)."""
    return _build_corpus()


def get_integrand(name: str) -> Integrand:
    """Look up a corpus member by name."""
    members = corpus()
    key = str(name).strip().lower()
    if key not in members:
        raise ConfigError(f"unknown function '{name}', expected one of {sorted(members)}")
    return members[key]


__all__ = [
    "DEFAULT_PIECEWISE",
    "Integrand",
    "PiecewiseLinearSpec",
    "check_grad_bound",
    "check_gradient",
    "corpus",
    "finite_difference_gradient",
    "get_integrand",
    "oscillator_exact_integral",
    "oscillator_grad_bound",
    "piecewise_linear_integrand",
    "pl_sigma_k",
    "random_piecewise_linear",
]
