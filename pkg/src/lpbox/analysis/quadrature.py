"""
Quadrature infrastructure.

Spatial integrals use tensorized Gauss-Hermite rules whose weights are kept
in log form, so that grids against the inverse Gaussian measure
pi^{n/2} e^{|y|^2} dy do not overflow. Time integrals against dt/t use a
uniform trapezoid in u = log t with power-law tail corrections at both ends.

Integrands are vectorized: a spatial integrand takes an array of shape
(N, n) and returns (N,) or (N, m); a time integrand takes an array of
times and returns an array of the same shape.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Literal, Sequence

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss
from scipy.special import logsumexp

from lpbox.core.config import settings
from lpbox.core.exceptions import ArgumentError, CapabilityError, EvaluationError, IntegrabilityError

logger = logging.getLogger(__name__)

MeasureTag = Literal["lebesgue", "gauss", "inverse_gauss"]
MAX_GRID_NODES = 10**7
_DIRECT_SUM_LOG_LIMIT = 700.0


@lru_cache(maxsize=64)
def _hermgauss(points: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = hermgauss(points)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=64)
def _leggauss(points: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(points)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True, eq=False)
class SpaceGrid:
    """Nodes of shape (N, n) with log-weights for the measure named by `measure_tag`."""
    dimension: int
    nodes: np.ndarray
    log_weights: np.ndarray
    measure_tag: MeasureTag

    def __post_init__(self):
        if self.nodes.ndim != 2 or self.nodes.shape[1] != self.dimension:
            raise ArgumentError(f"Grid nodes must have shape (N, {self.dimension}).")
        if self.nodes.shape[0] == 0 or self.nodes.shape[0] != self.log_weights.shape[0]:
            raise ArgumentError("Grid nodes and weights must be non-empty and of equal length.")

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weights)


def gauss_hermite_grid(
    points_per_dim: int,
    dimension: int,
    shift: Sequence[float] | np.ndarray | None = None,
    scale: float = 1.0,
    measure: MeasureTag = "gauss",
) -> SpaceGrid:
    """
    Tensor Gauss-Hermite grid for the weight e^{-|xi|^2}, moved by
    y = shift + scale * xi. The weights absorb the Jacobian and the density
    of `measure` at y, so that sum w_i f(y_i) ~ int f dmeasure.
    """
    if not 2 <= points_per_dim <= 200:
        raise ArgumentError(f"points_per_dim must lie in [2, 200], got {points_per_dim}.")
    if dimension < 1:
        raise ArgumentError(f"Dimension must be positive, got {dimension}.")
    if scale <= 0:
        raise ArgumentError(f"Scale must be positive, got {scale}.")
    if points_per_dim**dimension > MAX_GRID_NODES:
        raise CapabilityError(
            f"A {points_per_dim}^{dimension} grid exceeds the {MAX_GRID_NODES} node limit."
        )
    x, w = _hermgauss(points_per_dim)
    log_w1 = np.log(w)
    mesh = np.meshgrid(*([x] * dimension), indexing="ij")
    xi = np.stack([m.ravel() for m in mesh], axis=-1)
    log_mesh = np.meshgrid(*([log_w1] * dimension), indexing="ij")
    log_w = np.sum(np.stack([m.ravel() for m in log_mesh], axis=-1), axis=-1)

    shift_arr = np.zeros(dimension) if shift is None else np.broadcast_to(np.asarray(shift, dtype=float), (dimension,))
    nodes = shift_arr + scale * xi
    unshifted = not np.any(shift_arr) and scale == 1.0

    if measure == "gauss":
        if not unshifted:
            log_w = log_w + dimension * math.log(scale) + np.sum(xi * xi, axis=-1) - np.sum(nodes * nodes, axis=-1)
    elif measure == "lebesgue":
        log_w = log_w + dimension * math.log(scale) + np.sum(xi * xi, axis=-1)
    elif measure == "inverse_gauss":
        log_w = (log_w + dimension * math.log(scale) + np.sum(xi * xi, axis=-1)
                 + np.sum(nodes * nodes, axis=-1) + 0.5 * dimension * math.log(math.pi))
    else:
        raise ArgumentError(f"Unknown measure tag '{measure}'.")

    logger.debug("Built %s grid: %d^%d nodes, scale %.3g", measure, points_per_dim, dimension, scale)
    return SpaceGrid(dimension=dimension, nodes=nodes, log_weights=log_w, measure_tag=measure)


def _evaluate(grid: SpaceGrid, f: Callable[[np.ndarray], np.ndarray] | np.ndarray) -> np.ndarray:
    values = np.asarray(f(grid.nodes) if callable(f) else f, dtype=float)
    if values.shape[0] != grid.size:
        raise ArgumentError(f"Integrand returned {values.shape[0]} values for {grid.size} nodes.")
    finite = np.isfinite(values)
    if not np.all(finite):
        bad = np.argwhere(~finite)[0][0]
        raise EvaluationError("Non-finite integrand value", location=grid.nodes[bad])
    return values


def integrate(grid: SpaceGrid, f: Callable[[np.ndarray], np.ndarray] | np.ndarray):
    """Sum of w_i f(x_i). Returns a float, or an array for vector-valued f."""
    values = _evaluate(grid, f)
    log_w = grid.log_weights
    if values.ndim > 1:
        log_w = log_w.reshape((-1,) + (1,) * (values.ndim - 1))
    if np.max(np.abs(grid.log_weights)) < _DIRECT_SUM_LOG_LIMIT:
        result = np.sum(np.exp(log_w) * values, axis=0)
    else:
        with np.errstate(divide="ignore"):
            log_abs = np.log(np.abs(values))
        result, sign = logsumexp(log_w + log_abs, b=np.sign(values), axis=0, return_sign=True)
        result = sign * np.exp(result)
    return float(result) if np.ndim(result) == 0 else result


def lp_norm(grid: SpaceGrid, f: Callable[[np.ndarray], np.ndarray] | np.ndarray, p: float) -> float:
    """(int |f|^p dmu)^{1/p}, summed in log space."""
    if p < 1:
        raise ArgumentError(f"p must be at least 1, got {p}.")
    values = np.abs(_evaluate(grid, f))
    nonzero = values > 0
    if not np.any(nonzero):
        return 0.0
    log_terms = grid.log_weights[nonzero] + p * np.log(values[nonzero])
    return float(np.exp(logsumexp(log_terms) / p))


@dataclass(frozen=True)
class TimeGrid:
    """
    Trapezoid rule for int_0^inf F(t) dt/t in u = log t on [t_min, t_max],
    with power-law tail corrections outside the window.
    """
    t_min: float = field(default_factory=lambda: settings.t_min)
    t_max: float = field(default_factory=lambda: settings.t_max)
    points: int = field(default_factory=lambda: settings.time_points)

    def __post_init__(self):
        if not 0 < self.t_min < self.t_max:
            raise ArgumentError(f"Time grid needs 0 < t_min < t_max, got ({self.t_min}, {self.t_max}).")
        if self.points < 16:
            raise ArgumentError(f"Time grid needs at least 16 points, got {self.points}.")

    @cached_property
    def step(self) -> float:
        return math.log(self.t_max / self.t_min) / (self.points - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.exp(np.linspace(math.log(self.t_min), math.log(self.t_max), self.points))

    @cached_property
    def weights(self) -> np.ndarray:
        w = np.full(self.points, self.step)
        w[0] = w[-1] = 0.5 * self.step
        return w

    def refined(self) -> TimeGrid:
        """Same window, halved step; the old nodes are a subset of the new ones."""
        return TimeGrid(self.t_min, self.t_max, 2 * self.points - 1)


def lq_from_samples(grid: TimeGrid, samples: np.ndarray, q: float, axis: int = -1) -> np.ndarray | float:
    """
    (int |F|^q dt/t)^{1/q} from samples of F on grid.nodes along `axis`.
    Outside the window |F|^q is extended by a power law (t -> 0) and by an
    exponential in log t (t -> inf), fitted on the two outermost nodes.
    """
    if q < 1:
        raise ArgumentError(f"q must be at least 1, got {q}.")
    g = np.moveaxis(np.abs(np.asarray(samples, dtype=float)), axis, -1)
    if g.shape[-1] != grid.points:
        raise ArgumentError(f"Expected {grid.points} samples along the time axis, got {g.shape[-1]}.")
    if not np.all(np.isfinite(g)):
        raise EvaluationError("Non-finite time samples")
    gq = g**q
    total = np.sum(gq * grid.weights, axis=-1)

    h = grid.step
    with np.errstate(divide="ignore", invalid="ignore"):
        lower_rate = (np.log(gq[..., 1]) - np.log(gq[..., 0])) / h
        upper_rate = (np.log(gq[..., -2]) - np.log(gq[..., -1])) / h
        lower = np.where((gq[..., 0] > 0) & (lower_rate > 0), gq[..., 0] / lower_rate, 0.0)
        upper = np.where((gq[..., -1] > 0) & (upper_rate > 0), gq[..., -1] / upper_rate, 0.0)
    total = total + np.nan_to_num(lower) + np.nan_to_num(upper)
    result = total ** (1.0 / q)
    return float(result) if np.ndim(result) == 0 else result


def time_lq_norm(grid: TimeGrid, F: Callable[[np.ndarray], np.ndarray], q: float) -> float:
    """(int_0^inf |F(t)|^q dt/t)^{1/q}."""
    return float(lq_from_samples(grid, np.asarray(F(grid.nodes), dtype=float), q))


def composite_legendre(
    edges: Sequence[float] | np.ndarray, points_per_panel: int = 16
) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on consecutive panels [edges[i], edges[i+1]]."""
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ArgumentError("Panel edges must be a strictly increasing sequence of length >= 2.")
    x, w = _leggauss(points_per_panel)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (x + 1.0)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def check_tail_decay(
    f: Callable[[np.ndarray], np.ndarray],
    dimension: int,
    degree: int = 0,
    radii: Sequence[float] = (4.0, 6.0, 8.0),
    tolerance: float = 1e-6,
) -> None:
    """
    Heuristic check that f e^{|x|^2} times a Gaussian-weighted polynomial of
    `degree` is integrable against gamma_-1, i.e. that |f(x)| |x|^{degree+n}
    is negligible on the outermost shell relative to its largest sampled value.
    """
    directions = [np.eye(dimension)[i] for i in range(dimension)]
    directions += [-d for d in directions]
    directions.append(np.ones(dimension) / math.sqrt(dimension))
    directions.append(-np.ones(dimension) / math.sqrt(dimension))
    directions = np.array(directions)

    inner = np.concatenate([r * directions for r in (0.0, 0.5, 1.0, 2.0)])
    reference = float(np.max(np.abs(np.asarray(f(inner), dtype=float))))
    shell_values = []
    for radius in radii:
        points = radius * directions
        values = np.abs(np.asarray(f(points), dtype=float))
        if values.ndim > 1:
            values = np.max(values, axis=tuple(range(1, values.ndim)))
        shell_values.append(float(np.max(values)) * radius ** (degree + dimension))
    reference = max(reference, *shell_values[:-1], np.finfo(float).tiny)
    if not all(np.isfinite(shell_values)) or shell_values[-1] > tolerance * reference:
        raise IntegrabilityError(
            "Integrand does not decay fast enough against gamma_-1",
            location=radii[-1] * directions[0],
        )
