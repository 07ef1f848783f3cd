"""
Admissibility function, local/global regions, the slab J(z), and a
sampled-verification harness for pointwise kernel estimates.

    m(x)   = min{1, |x|^{-2}},  m(0) = 1
    N_nu   = {(x, y): |x - y| < nu n sqrt(m(x))}        (local region)
    J(z)   = {x: |x_perp| < 1, 4|z|/3 < x_z < 3|z|/2},   z = (eta, ..., eta)

An inequality "lhs <= C rhs" with an unspecified constant is verified by
sampling: C is fitted as the largest sampled ratio and the fit is called
stable when doubling the sample count moves it by at most 10%.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Literal, Sequence

import numpy as np
from scipy.special import gammaln, logsumexp

from lpbox.analysis.kernels import KernelTag, kernel_derivative, ou_coordinates
from lpbox.analysis.quadrature import TimeGrid, composite_legendre, lq_from_samples
from lpbox.analysis.special_functions import MultiIndex, as_multiindex
from lpbox.core.exceptions import ArgumentError, CapabilityError, EvaluationError
from lpbox.models.data_models import BoundReport

logger = logging.getLogger(__name__)

STABILITY_TOLERANCE = 0.10
_CHUNK = 128

Branch = Literal["negative", "positive", "both"]


# ---------------------------------------------------------------------------
# Admissibility and local regions
# ---------------------------------------------------------------------------

def m_admissibility(x):
    """m(x) = min{1, |x|^{-2}} with m(0) = 1; x has the coordinate axis last."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim <= 1
    x = np.atleast_1d(x)
    value = 1.0 / np.maximum(np.sum(x * x, axis=-1), 1.0)
    return float(value) if scalar else value


def local_radius(x, nu: float = 1.0):
    """nu n sqrt(m(x))."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return nu * x.shape[-1] * np.sqrt(m_admissibility(x))


def in_local_region(x, y, nu: float = 1.0):
    """(x, y) in N_nu, strict inequality."""
    if nu <= 0:
        raise ArgumentError(f"Region parameter nu must be positive, got {nu}.")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1:] != y.shape[-1:]:
        raise ArgumentError(f"Point dimensions differ: {x.shape[-1:]} vs {y.shape[-1:]}.")
    inside = np.linalg.norm(x - y, axis=-1) < local_radius(x, nu)
    return bool(inside) if np.ndim(inside) == 0 else inside


def branch_of(x, y) -> np.ndarray | str:
    """'negative' where <x, y> <= 0, 'positive' otherwise."""
    inner = np.sum(np.asarray(x, dtype=float) * np.asarray(y, dtype=float), axis=-1)
    labels = np.where(inner <= 0, "negative", "positive")
    return str(labels) if labels.ndim == 0 else labels


@dataclass(frozen=True)
class RegionSpec:
    nu: float = 1.0
    dimension: int = 1

    def __post_init__(self):
        if self.nu <= 0:
            raise ArgumentError(f"Region parameter nu must be positive, got {self.nu}.")
        if self.dimension < 1:
            raise ArgumentError(f"Dimension must be at least 1, got {self.dimension}.")

    def radius(self, x):
        return local_radius(x, self.nu)

    def contains(self, x, y):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dimension:
            raise ArgumentError(f"Point of dimension {x.shape[-1]} in a region of dimension {self.dimension}.")
        return in_local_region(x, y, self.nu)


# ---------------------------------------------------------------------------
# The slab J(z)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JRegion:
    eta: float
    dimension: int

    def __post_init__(self):
        if self.eta <= 0:
            raise ArgumentError(f"eta must be positive, got {self.eta}.")
        if self.dimension < 1:
            raise ArgumentError(f"Dimension must be at least 1, got {self.dimension}.")

    @property
    def z(self) -> np.ndarray:
        return np.full(self.dimension, float(self.eta))

    @property
    def z_norm(self) -> float:
        return self.eta * math.sqrt(self.dimension)

    @property
    def axis(self) -> np.ndarray:
        return np.ones(self.dimension) / math.sqrt(self.dimension)

    @property
    def bounds(self) -> tuple[float, float]:
        return 4.0 * self.z_norm / 3.0, 1.5 * self.z_norm

    def split(self, x) -> tuple[np.ndarray, np.ndarray]:
        """(x_z, |x_perp|) for points x of shape (..., n)."""
        x = np.asarray(x, dtype=float)
        along = x @ self.axis
        perp = x - along[..., None] * self.axis
        return along, np.linalg.norm(perp, axis=-1)

    def contains(self, x):
        along, perp = self.split(x)
        lo, hi = self.bounds
        inside = (perp < 1.0) & (along > lo) & (along < hi)
        return bool(inside) if np.ndim(inside) == 0 else inside

    def _complement_basis(self) -> np.ndarray:
        """Orthonormal (n, n - 1) basis of the hyperplane orthogonal to z."""
        q, _ = np.linalg.qr(np.column_stack([self.axis, np.eye(self.dimension)]))
        return q[:, 1:self.dimension]

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Uniform points in J(z), shape (count, n)."""
        lo, hi = self.bounds
        along = rng.uniform(lo, hi, size=count)
        points = along[:, None] * self.axis
        if self.dimension > 1:
            d = self.dimension - 1
            directions = _unit_vectors(rng, count, d)
            radii = rng.uniform(size=count) ** (1.0 / d)
            points = points + (directions * radii[:, None]) @ self._complement_basis().T
        return points

    def log_gamma_measure(self, panels: int = 64, points_per_panel: int = 16) -> float:
        """log gamma_-1(J(z)) by Gauss-Legendre in log form."""
        lo, hi = self.bounds
        nodes, weights = composite_legendre(np.linspace(lo, hi, panels + 1), points_per_panel)
        log_axial = float(logsumexp(nodes**2, b=weights))
        log_perp = 0.0
        if self.dimension > 1:
            d = self.dimension - 1
            rho, w = composite_legendre(np.linspace(0.0, 1.0, 9), points_per_panel)
            log_sphere = math.log(2.0) + 0.5 * d * math.log(math.pi) - float(gammaln(0.5 * d))
            log_perp = log_sphere + math.log(float(np.sum(w * np.exp(rho**2) * rho ** (d - 1))))
        return 0.5 * self.dimension * math.log(math.pi) + log_axial + log_perp

    def rule(self, panels: int = 32, points_per_panel: int = 8, perp_points: int = 16) -> tuple[np.ndarray, np.ndarray]:
        """
        Tensor Gauss-Legendre nodes on J(z), shape (N, n), with the log of
        their gamma_-1 weights. Only n <= 2, where the cross-section is an
        interval.
        """
        if self.dimension > 2:
            raise CapabilityError(f"J(z) quadrature is provided for n <= 2, got n = {self.dimension}.")
        lo, hi = self.bounds
        along, w_along = composite_legendre(np.linspace(lo, hi, panels + 1), points_per_panel)
        if self.dimension == 1:
            points = along[:, None] * self.axis
            log_w = np.log(w_along)
        else:
            perp, w_perp = composite_legendre(np.array([-1.0, 0.0, 1.0]), perp_points // 2)
            normal = self._complement_basis()[:, 0]
            points = along[:, None, None] * self.axis + perp[None, :, None] * normal
            points = points.reshape(-1, 2)
            log_w = (np.log(w_along)[:, None] + np.log(w_perp)[None, :]).ravel()
        log_w = log_w + np.sum(points * points, axis=-1) + 0.5 * self.dimension * math.log(math.pi)
        return points, log_w

    def log_lower_bound_proxy(self) -> float:
        """log of e^{(3|z|/2)^2} |z|^{-1}."""
        return (1.5 * self.z_norm) ** 2 - math.log(self.z_norm)

    def measure_ratio(self) -> float:
        return math.exp(self.log_gamma_measure() - self.log_lower_bound_proxy())


def _unit_vectors(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    v = rng.standard_normal((count, n))
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    return v / np.where(norms > 0, norms, 1.0)


# ---------------------------------------------------------------------------
# Verification harness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundSampler:
    """Draws (count, len(names)) sample rows; `names` label the columns in reports."""
    names: tuple[str, ...]
    draw: Callable[[np.random.Generator, int], np.ndarray]


@dataclass(frozen=True)
class BoundProblem:
    bound_id: str
    sampler: BoundSampler
    lhs: Callable[[np.ndarray], np.ndarray]
    log_rhs: Callable[[np.ndarray], np.ndarray]
    parameters: dict[str, Any] = field(default_factory=dict)


def report_from_ratios(
    bound_id: str,
    ratios: np.ndarray,
    locate: Callable[[int], dict[str, Any]],
    parameters: dict[str, Any] | None = None,
    half: int | None = None,
) -> BoundReport:
    """Fit C = max ratio on the whole sample and on its first `half` entries."""
    ratios = np.asarray(ratios, dtype=float)
    if ratios.size == 0:
        raise ArgumentError(f"No samples to fit a constant for '{bound_id}'.")
    half = max(1, ratios.size // 2) if half is None else half
    fitted = float(np.max(ratios))
    half_constant = float(np.max(ratios[:half]))
    if half_constant > 0:
        growth = (fitted - half_constant) / half_constant
    else:
        growth = 0.0 if fitted == 0 else math.inf
    stable = growth <= STABILITY_TOLERANCE
    if not stable:
        logger.warning(f"Fitted constant for '{bound_id}' grew by {growth:.1%} when the sample doubled.")
    worst = int(np.argmax(ratios))
    return BoundReport(
        bound_id=bound_id,
        samples=int(ratios.size),
        fitted_constant=fitted,
        half_sample_constant=half_constant,
        growth=growth,
        stable=stable,
        violations_at_fitted=int(np.sum(ratios > fitted)),
        max_ratio_location=locate(worst),
        parameters=dict(parameters or {}),
    )


def verify_bound(
    bound_id: str,
    sampler: BoundSampler,
    lhs: Callable[[np.ndarray], np.ndarray],
    log_rhs: Callable[[np.ndarray], np.ndarray],
    samples: int = 1000,
    seed: int = 0,
    parameters: dict[str, Any] | None = None,
) -> BoundReport:
    """
    Draw 2 * samples points, evaluate |lhs| and log rhs, and fit the constant
    on the first half and on everything.
    """
    if samples < 1:
        raise ArgumentError(f"Sample count must be positive, got {samples}.")
    rng = np.random.default_rng(seed)
    points = np.asarray(sampler.draw(rng, 2 * samples), dtype=float)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ArgumentError(f"Sampler for '{bound_id}' produced no points.")

    lhs_values = np.abs(np.asarray(lhs(points), dtype=float))
    log_rhs_values = np.asarray(log_rhs(points), dtype=float)
    for label, values in (("left-hand side", lhs_values), ("right-hand side", log_rhs_values)):
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            raise EvaluationError(f"Non-finite {label} for bound '{bound_id}'", location=points[bad[0]])

    with np.errstate(divide="ignore"):
        log_ratio = np.where(lhs_values > 0, np.log(lhs_values) - log_rhs_values, -np.inf)
    ratios = np.exp(log_ratio)
    overflow = np.flatnonzero(~np.isfinite(ratios))
    if overflow.size:
        raise EvaluationError(f"Ratio overflow for bound '{bound_id}'", location=points[overflow[0]])

    def locate(i: int) -> dict[str, Any]:
        return {name: round(float(v), 6) for name, v in zip(sampler.names, points[i])}

    logger.debug(f"Bound '{bound_id}': {points.shape[0]} samples evaluated.")
    return report_from_ratios(bound_id, ratios, locate, parameters, half=samples)


def run_problem(problem: BoundProblem, samples: int = 1000, seed: int = 0) -> BoundReport:
    return verify_bound(problem.bound_id, problem.sampler, problem.lhs, problem.log_rhs,
                        samples, seed, problem.parameters)


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------

def log_radial_points(rng: np.random.Generator, count: int, n: int,
                      r_min: float = 0.05, r_max: float = 5.0) -> np.ndarray:
    """Points with log-uniform radius in [r_min, r_max] and uniform direction."""
    radii = np.exp(rng.uniform(math.log(r_min), math.log(r_max), size=count))
    return _unit_vectors(rng, count, n) * radii[:, None]


def _pair_names(n: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(n)) + tuple(f"y{i + 1}" for i in range(n))


def global_pair_sampler(n: int, nu: float = 1.0, branch: Branch = "both",
                        r_max: float = 5.0, reach: float = 6.0) -> BoundSampler:
    """
    (x, y) in the global region N_nu^c: |x| log-radial, then y = x + d with
    |d| log-uniform in [radius(x), radius(x) + reach]. `branch` keeps only
    pairs with the requested sign of <x, y>.
    """
    def draw(rng: np.random.Generator, count: int) -> np.ndarray:
        kept: list[np.ndarray] = []
        total = 0
        for _ in range(64):
            if total >= count:
                break
            x = log_radial_points(rng, 2 * count, n, r_max=r_max)
            rho = local_radius(x, nu) * (1.0 + 1e-9)
            lengths = np.exp(rng.uniform(np.log(rho), np.log(rho + reach)))
            y = x + _unit_vectors(rng, 2 * count, n) * lengths[:, None]
            if branch != "both":
                mask = branch_of(x, y) == branch
                x, y = x[mask], y[mask]
            kept.append(np.hstack([x, y]))
            total += x.shape[0]
        if not kept:
            return np.empty((0, 2 * n))
        return np.vstack(kept)[:count]

    return BoundSampler(_pair_names(n), draw)


def local_pair_sampler(n: int, nu: float = 2.0, r_max: float = 5.0, depth: float = 1e-3) -> BoundSampler:
    """(x, y) in N_nu with |x - y| log-uniform in [depth * radius(x), radius(x))."""
    def draw(rng: np.random.Generator, count: int) -> np.ndarray:
        x = log_radial_points(rng, count, n, r_min=0.01, r_max=r_max)
        rho = local_radius(x, nu)
        lengths = rho * np.exp(rng.uniform(math.log(depth), 0.0, size=count)) * (1.0 - 1e-9)
        y = x + _unit_vectors(rng, count, n) * lengths[:, None]
        return np.hstack([x, y])

    return BoundSampler(_pair_names(n), draw)


def kernel_time_sampler(n: int, t_min: float = 1e-3, t_max: float = 10.0, spread: float = 2.0) -> BoundSampler:
    """
    (x, y, t) in coordinates adapted to T_t(x, y): t log-uniform,
    y = w / sqrt(1 - e^{-2t}) and x = e^{-t} y + sqrt(1 - e^{-2t}) z with
    w, z uniform in [-spread, spread]^n and [-3, 3]^n.
    """
    def draw(rng: np.random.Generator, count: int) -> np.ndarray:
        t = np.exp(rng.uniform(math.log(t_min), math.log(t_max), size=count))
        a, _, s = ou_coordinates(t)
        root = np.sqrt(s)[:, None]
        y = rng.uniform(-spread, spread, size=(count, n)) / root
        x = a[:, None] * y + root * rng.uniform(-3.0, 3.0, size=(count, n))
        return np.hstack([x, y, t[:, None]])

    return BoundSampler(_pair_names(n) + ("t",), draw)


# ---------------------------------------------------------------------------
# Kernel norms in t
# ---------------------------------------------------------------------------

def _split_pairs(points: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    return points[:, :n], points[:, n:2 * n]


def kernel_time_values(x: np.ndarray, y: np.ndarray, times: np.ndarray, m: int, k: MultiIndex,
                       power: float, tag: KernelTag = "A") -> np.ndarray:
    """t^power d_x^k d_t^m K_t(x_i, y_i) on (points, times)."""
    values = kernel_derivative(x[:, None, :], y[:, None, :], times[None, :], m, k, tag)
    return np.asarray(values) * times[None, :] ** power


def kernel_time_norm(x, y, m: int, k: MultiIndex | Sequence[int], q: float, tgrid: TimeGrid,
                     tag: KernelTag = "A", power: float | None = None) -> np.ndarray:
    """
    R(x, y) = || t^power d_x^k d_t^m K_t(x, y) ||_{L^q(dt/t)} for pairs of
    points of shape (N, n); power defaults to m + |k|/2. q = inf gives the sup.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    k = as_multiindex(k)
    power = m + 0.5 * k.degree() if power is None else power
    out = np.empty(x.shape[0])
    for start in range(0, x.shape[0], _CHUNK):
        block = slice(start, start + _CHUNK)
        values = kernel_time_values(x[block], y[block], tgrid.nodes, m, k, power, tag)
        if math.isinf(q):
            out[block] = np.max(np.abs(values), axis=-1)
        else:
            out[block] = lq_from_samples(tgrid, values, q)
    return out


def heat_difference_norm(x, y, q: float, tgrid: TimeGrid) -> np.ndarray:
    """|| t d_t (W_t(x - y) - T^A_t(x, y)) ||_{L^q(dt/t)}."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    t = tgrid.nodes
    zero = MultiIndex.zero(x.shape[-1])
    out = np.empty(x.shape[0])
    for start in range(0, x.shape[0], _CHUNK):
        block = slice(start, start + _CHUNK)
        xb, yb = x[block][:, None, :], y[block][:, None, :]
        euclid = kernel_derivative(xb, yb, t[None, :], 1, zero, "euclid")
        inverse = kernel_derivative(xb, yb, t[None, :], 1, zero, "A")
        out[block] = lq_from_samples(tgrid, t[None, :] * (np.asarray(euclid) - np.asarray(inverse)), q)
    return out


# ---------------------------------------------------------------------------
# The estimates
# ---------------------------------------------------------------------------

def _global_log_rhs(x: np.ndarray, y: np.ndarray, eta: float, delta: float) -> np.ndarray:
    """Two-case global estimate, selected by the sign of <x, y>."""
    n = x.shape[-1]
    sx = np.sum(x * x, axis=-1)
    sy = np.sum(y * y, axis=-1)
    negative = -(eta + delta) * sx / 2.0 + (eta - delta) * sy / 2.0
    plus = np.linalg.norm(x + y, axis=-1)
    minus = np.linalg.norm(x - y, axis=-1)
    with np.errstate(divide="ignore"):
        positive = n * np.log(plus) + eta * (sy - sx) / 2.0 - delta * plus * minus / 2.0
    return np.where(np.sum(x * y, axis=-1) <= 0, negative, positive)


@dataclass(frozen=True)
class BoundParameters:
    dimension: int = 1
    m: int = 1
    k: MultiIndex | None = None
    q: float = 2.0
    eta: float = 0.9
    delta: float = 0.6
    branch: Branch = "both"
    time_points: int = 768

    def __post_init__(self):
        k = MultiIndex.zero(self.dimension) if self.k is None else as_multiindex(self.k)
        if len(k) != self.dimension:
            raise ArgumentError(f"Space order {k} does not match dimension {self.dimension}.")
        if not 0 < self.delta < self.eta < 1:
            raise ArgumentError(f"Need 0 < delta < eta < 1, got delta={self.delta}, eta={self.eta}.")
        if self.q < 1:
            raise ArgumentError(f"q must be at least 1, got {self.q}.")
        object.__setattr__(self, "k", k)

    def as_dict(self) -> dict[str, Any]:
        return {"n": self.dimension, "m": self.m, "k": str(self.k), "q": self.q,
                "eta": self.eta, "delta": self.delta}


def acot_deriv_problem(params: BoundParameters) -> BoundProblem:
    """|t^{m+|k|/2} d_x^k d_t^m T^A_t(x, y)| against the Gaussian envelope, pointwise in (x, y, t)."""
    n, eta, delta = params.dimension, params.eta, params.delta
    power = params.m + 0.5 * params.k.degree()

    def split(points):
        return points[:, :n], points[:, n:2 * n], points[:, 2 * n]

    def lhs(points):
        x, y, t = split(points)
        return t**power * np.asarray(kernel_derivative(x, y, t, params.m, params.k, "A"))

    def log_rhs(points):
        x, y, t = split(points)
        _, _, s = ou_coordinates(t)
        sx, sy = np.sum(x * x, axis=-1), np.sum(y * y, axis=-1)
        gap = np.sum((x - np.exp(-t)[:, None] * y) ** 2, axis=-1)
        return -t / 2.0 - 0.5 * n * np.log(s) + (eta - delta) * (sy - sx) / 2.0 - delta * gap / s

    return BoundProblem("acot_deriv", kernel_time_sampler(n), lhs, log_rhs, params.as_dict())


def a2_problem(params: BoundParameters) -> BoundProblem:
    """R_{m,k}(x, y) on N_1^c against the two-case global estimate."""
    n = params.dimension
    tgrid = TimeGrid(1e-8, 60.0, params.time_points)

    def lhs(points):
        x, y = _split_pairs(points, n)
        return kernel_time_norm(x, y, params.m, params.k, params.q, tgrid)

    def log_rhs(points):
        x, y = _split_pairs(points, n)
        return _global_log_rhs(x, y, params.eta, params.delta)

    parameters = params.as_dict() | {"branch": params.branch}
    return BoundProblem("a2", global_pair_sampler(n, 1.0, params.branch), lhs, log_rhs, parameters)


def local_size_problem(params: BoundParameters) -> BoundProblem:
    """R_{m,k}(x, y) <= C |x - y|^{-n} on N_2."""
    n = params.dimension
    tgrid = TimeGrid(1e-12, 60.0, params.time_points)

    def lhs(points):
        x, y = _split_pairs(points, n)
        return kernel_time_norm(x, y, params.m, params.k, params.q, tgrid)

    def log_rhs(points):
        x, y = _split_pairs(points, n)
        return -n * np.log(np.linalg.norm(x - y, axis=-1))

    return BoundProblem("b", local_pair_sampler(n, 2.0), lhs, log_rhs, params.as_dict())


def local_gradient_problem(params: BoundParameters) -> BoundProblem:
    """max_i ||t^{m+|k|/2} d_t^m d_{x_i} d_x^k T^A_t(x, y)|| <= C |x - y|^{-n-1} on N_2."""
    n = params.dimension
    tgrid = TimeGrid(1e-12, 60.0, params.time_points)
    power = params.m + 0.5 * params.k.degree()

    def lhs(points):
        x, y = _split_pairs(points, n)
        norms = [kernel_time_norm(x, y, params.m, params.k.shifted(i), params.q, tgrid, power=power)
                 for i in range(n)]
        return np.max(np.vstack(norms), axis=0)

    def log_rhs(points):
        x, y = _split_pairs(points, n)
        return -(n + 1) * np.log(np.linalg.norm(x - y, axis=-1))

    return BoundProblem("c", local_pair_sampler(n, 2.0), lhs, log_rhs, params.as_dict())


def difference_problem(params: BoundParameters) -> BoundProblem:
    """||t d_t (W_t - T^A_t)(x, y)||_{L^q(dt/t)} <= C sqrt(1 + |x|) |x - y|^{-(n - 1/2)} on N_1."""
    n = params.dimension
    tgrid = TimeGrid(1e-12, 1e6, params.time_points)

    def lhs(points):
        x, y = _split_pairs(points, n)
        return heat_difference_norm(x, y, params.q, tgrid)

    def log_rhs(points):
        x, y = _split_pairs(points, n)
        return 0.5 * np.log1p(np.linalg.norm(x, axis=-1)) - (n - 0.5) * np.log(np.linalg.norm(x - y, axis=-1))

    parameters = {"n": n, "q": params.q}
    return BoundProblem("diferencia", local_pair_sampler(n, 1.0), lhs, log_rhs, parameters)


def maximal_kernel_problem(params: BoundParameters) -> BoundProblem:
    """sup_t t^{m+|k|/2} |d_x^k d_t^m T^A_t(x, y)| on N_{1/delta}^c against the two-case estimate."""
    n = params.dimension
    tgrid = TimeGrid(1e-8, 60.0, params.time_points)
    nu = 1.0 / params.delta

    def lhs(points):
        x, y = _split_pairs(points, n)
        return kernel_time_norm(x, y, params.m, params.k, math.inf, tgrid)

    def log_rhs(points):
        x, y = _split_pairs(points, n)
        return _global_log_rhs(x, y, params.eta, params.delta)

    parameters = params.as_dict() | {"nu": nu}
    return BoundProblem("maximal_kernel", global_pair_sampler(n, nu, params.branch), lhs, log_rhs, parameters)


BOUND_BUILDERS: dict[str, Callable[[BoundParameters], BoundProblem]] = {
    "acot_deriv": acot_deriv_problem,
    "a2": a2_problem,
    "b": local_size_problem,
    "c": local_gradient_problem,
    "diferencia": difference_problem,
    "maximal_kernel": maximal_kernel_problem,
}


def build_problem(bound_id: str, params: BoundParameters) -> BoundProblem:
    try:
        builder = BOUND_BUILDERS[bound_id]
    except KeyError:
        raise ArgumentError(f"Unknown bound '{bound_id}'. Known: {', '.join(BOUND_BUILDERS)}.") from None
    return builder(params)
