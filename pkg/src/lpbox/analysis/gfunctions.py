"""
Littlewood-Paley g-functions

    g(f)(x) = ( int_0^inf || t^{power} d_x^k d_t^beta S_t f(x) ||_X^q dt/t )^{1/q}

for the semigroups S_t named by a GFunctionSpec. The time weight is
t^{beta + |k|/2} for heat semigroups and t^{beta + |k|} for Poisson
semigroups, so that both are dilation invariant.

The spectral path (heat_A, poisson_A, poisson_A_minus_I) is exact in beta
and k: each mode contributes r^beta e^{-rt} (-1)^{|k|} H~_{l+k}(x). The
Euclidean tags use the closed form W_t H~_l(x) = sigma^{-1-l} H~_l(x / sigma),
sigma = sqrt(1 + 2t), per coordinate, and are limited to integer beta.

Local and global parts restrict the integration variable y to N_nu(x) or
its complement; the global part is computed by kernel quadrature over the
exterior of the ball |y - x| < nu n sqrt(m(x)) and the local part is the
full value minus the global one.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Literal, Mapping, Sequence

import numpy as np

from lpbox.analysis.kernels import KernelTag, kernel_derivative, subordination_matrix
from lpbox.analysis.oracles import gamma_integral
from lpbox.analysis.quadrature import (
    SpaceGrid,
    TimeGrid,
    composite_legendre,
    gauss_hermite_grid,
    lp_norm,
    lq_from_samples,
)
from lpbox.analysis.regions import local_radius, report_from_ratios
from lpbox.analysis.special_functions import (
    MultiIndex,
    as_multiindex,
    compositions,
    hermite_table,
    hermite_tilde,
    multinomial,
)
from lpbox.analysis.spectral import HermiteExpansion, space_derivative
from lpbox.core.config import settings
from lpbox.core.exceptions import ArgumentError, CapabilityError
from lpbox.models.data_models import BoundReport

logger = logging.getLogger(__name__)

GTag = Literal["heat_A", "poisson_A", "poisson_A_minus_I", "heat_euclid", "poisson_euclid"]
RegionName = Literal["full", "local", "global"]

G_TAGS: tuple[str, ...] = ("heat_A", "poisson_A", "poisson_A_minus_I", "heat_euclid", "poisson_euclid")
SPECTRAL_TAGS = ("heat_A", "poisson_A", "poisson_A_minus_I")
KERNEL_TAGS: dict[str, KernelTag] = {
    "heat_A": "A",
    "poisson_A": "A",
    "poisson_A_minus_I": "A_minus_I",
    "heat_euclid": "euclid",
    "poisson_euclid": "euclid",
}
REGION_MAX_DIMENSION = 2

# Upper bound on the number of floats held by one block of time samples.
_BLOCK_FLOATS = 2**22
_ANGLES = 64


@dataclass(frozen=True)
class NormSpec:
    """The l^r norm on R^m, the target norm of vector-valued g-functions."""
    r: float = 2.0
    m: int = 1

    def __post_init__(self):
        if not self.r >= 1:
            raise ArgumentError(f"Norm exponent r must be at least 1, got {self.r}.")
        if self.m < 1:
            raise ArgumentError(f"Vector dimension must be at least 1, got {self.m}.")

    def __call__(self, values, axis: int = -1) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if values.shape[axis] != self.m:
            raise ArgumentError(f"Expected {self.m} components, got {values.shape[axis]}.")
        return np.linalg.norm(values, ord=self.r, axis=axis)


@dataclass(frozen=True)
class GFunctionSpec:
    beta: float = 1.0
    k: tuple[int, ...] | None = None
    q: float = 2.0
    semigroup_tag: GTag = "heat_A"
    norm: NormSpec = field(default_factory=NormSpec)
    region: RegionName = "full"
    nu: float = 1.0

    def __post_init__(self):
        if not self.q > 1:
            raise ArgumentError(f"q must exceed 1, got {self.q}.")
        if not self.beta > 0:
            raise ArgumentError(f"beta must be positive, got {self.beta}.")
        if self.semigroup_tag not in G_TAGS:
            raise ArgumentError(f"Unknown semigroup tag '{self.semigroup_tag}'.")
        if self.region not in ("full", "local", "global"):
            raise ArgumentError(f"Unknown region '{self.region}'.")
        if self.nu <= 0:
            raise ArgumentError(f"Region parameter nu must be positive, got {self.nu}.")
        if self.k is not None:
            object.__setattr__(self, "k", as_multiindex(self.k).entries)

    @property
    def is_poisson(self) -> bool:
        return self.semigroup_tag.startswith("poisson")

    @property
    def is_spectral(self) -> bool:
        return self.semigroup_tag in SPECTRAL_TAGS

    @property
    def kernel_tag(self) -> KernelTag:
        return KERNEL_TAGS[self.semigroup_tag]

    def space_order(self, n: int) -> MultiIndex:
        if self.k is None:
            return MultiIndex.zero(n)
        k = MultiIndex(self.k)
        if len(k) != n:
            raise ArgumentError(f"Space order {k} does not match dimension {n}.")
        return k

    def time_power(self, k: MultiIndex) -> float:
        return self.beta + (k.degree() if self.is_poisson else 0.5 * k.degree())

    def integer_order(self) -> int:
        if not float(self.beta).is_integer():
            raise CapabilityError(
                f"beta = {self.beta} is fractional; '{self.semigroup_tag}' with region '{self.region}' "
                "needs an integer order."
            )
        return int(self.beta)

    def with_changes(self, **changes: Any) -> GFunctionSpec:
        return replace(self, **changes)

    def describe(self) -> dict[str, Any]:
        return {
            "beta": self.beta,
            "k": "0" if self.k is None else str(MultiIndex(self.k)),
            "q": self.q,
            "semigroup": self.semigroup_tag,
            "r": self.norm.r,
            "m": self.norm.m,
            "region": self.region,
        }


# ---------------------------------------------------------------------------
# Time samples of the integrand
# ---------------------------------------------------------------------------

def _spectral_parts(f: HermiteExpansion, x: np.ndarray, beta: float, k: MultiIndex,
                    semigroup_tag: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Distinct rates r (R,), their Weyl multipliers r^beta (R,) and the
    spatial parts A (R, X, m) with sum over modes of rate r of
    c_l (-1)^{|k|} H~_{l+k}(x).
    """
    rates = f.rates(semigroup_tag)
    shifted = space_derivative(f, k)
    gauss = np.exp(-np.sum(x * x, axis=-1))
    basis = shifted.basis_values(x) * gauss
    unique, inverse = np.unique(rates, return_inverse=True)
    onehot = (inverse[None, :] == np.arange(unique.size)[:, None]).astype(float)
    parts = np.einsum("rl,lx,lc->rxc", onehot, basis, shifted.coefficients)
    if beta == 0:
        multipliers = np.ones_like(unique)
    else:
        multipliers = np.where(unique > 0, np.abs(unique) ** beta, 0.0)
    return unique, multipliers, parts


def _spectral_samples(f: HermiteExpansion, x: np.ndarray, times: np.ndarray, beta: float,
                      k: MultiIndex, power: float, semigroup_tag: str) -> np.ndarray:
    """t^power d_x^k d_t^beta S_t f(x) up to sign, shape (T, X, m)."""
    rates, multipliers, parts = _spectral_parts(f, x, beta, k, semigroup_tag)
    weights = times[:, None] ** power * multipliers[None, :] * np.exp(-np.outer(times, rates))
    return np.einsum("tr,rxc->txc", weights, parts)


def _spectral_paired(f: HermiteExpansion, x: np.ndarray, times: np.ndarray, beta: float,
                     k: MultiIndex, power: float, semigroup_tag: str) -> np.ndarray:
    """As _spectral_samples but with one time per point: shape (X, m)."""
    rates, multipliers, parts = _spectral_parts(f, x, beta, k, semigroup_tag)
    weights = times[:, None] ** power * multipliers[None, :] * np.exp(-np.outer(times, rates))
    return np.einsum("xr,rxc->xc", weights, parts)


def euclid_heat_samples(f: HermiteExpansion, x, times, m: int = 0,
                        k: MultiIndex | Sequence[int] | None = None) -> np.ndarray:
    """
    d_t^m d_x^k W_t f(x), shape (T, X, m_components), from

        d_t^m d_x^k W_t H~_l(x) = 2^{-m} sum_{|r|=m} (m; r)
            prod_i (-1)^{k_i} sigma^{-1-l_i-2r_i-k_i} H~_{l_i+2r_i+k_i}(x_i / sigma).
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    times = np.atleast_1d(np.asarray(times, dtype=float))
    n = f.dimension
    k = MultiIndex.zero(n) if k is None else as_multiindex(k)
    if x.shape[-1] != n or len(k) != n:
        raise ArgumentError(f"Points and space order must have dimension {n}.")
    out = np.zeros((times.size, x.shape[0], f.vector_dim))
    if not f.indices:
        return out
    sigma = np.sqrt(1.0 + 2.0 * times)
    u = x[None, :, :] / sigma[:, None, None]
    top = max(max(l) for l in f.indices) + 2 * m + max(k)
    table = hermite_table(top, u) * np.exp(-u * u)[None, ...]
    rs = compositions(m, n)
    for l, c in zip(f.indices, f.coefficients):
        mode = np.zeros((times.size, x.shape[0]))
        for r in rs:
            term = np.full((times.size, x.shape[0]), multinomial(m, r.entries) * 2.0 ** (-m))
            for i in range(n):
                degree = l[i] + 2 * r[i] + k[i]
                term = term * (-1) ** k[i] * sigma[:, None] ** (-1 - degree) * table[degree][..., i]
            mode = mode + term
        out = out + mode[..., None] * c[None, None, :]
    return out


def _euclid_samples(f: HermiteExpansion, x: np.ndarray, times: np.ndarray, m: int,
                    k: MultiIndex, power: float, poisson: bool) -> np.ndarray:
    if not poisson:
        return times[:, None, None] ** power * euclid_heat_samples(f, x, times, m, k)
    tau, weights = subordination_matrix(times, m)
    heat = euclid_heat_samples(f, x, tau, 0, k)
    return times[:, None, None] ** power * np.einsum("ts,sxc->txc", weights, heat)


def _full_samples(spec: GFunctionSpec, f: HermiteExpansion, x: np.ndarray, times: np.ndarray,
                  k: MultiIndex) -> np.ndarray:
    power = spec.time_power(k)
    if spec.is_spectral:
        return _spectral_samples(f, x, times, spec.beta, k, power, spec.semigroup_tag)
    return _euclid_samples(f, x, times, spec.integer_order(), k, power, spec.is_poisson)


def _exterior_rule(x: np.ndarray, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes (Y, n) and weights covering |y - x| >= radius, graded towards the sphere."""
    n = x.shape[-1]
    reach = float(np.linalg.norm(x)) + 8.0
    edges = np.concatenate([[0.0], np.geomspace(1e-4, reach, 28)])
    s, w = composite_legendre(edges, 12)
    r = radius + s
    if n == 1:
        nodes = np.concatenate([x[0] + r, x[0] - r])[:, None]
        return nodes, np.concatenate([w, w])
    theta = 2.0 * np.pi * np.arange(_ANGLES) / _ANGLES
    circle = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    nodes = x[None, None, :] + r[:, None, None] * circle[None, :, :]
    weights = (w * r)[:, None] * np.full(_ANGLES, 2.0 * np.pi / _ANGLES)[None, :]
    return nodes.reshape(-1, 2), weights.ravel()


def _global_samples(spec: GFunctionSpec, f: HermiteExpansion, x: np.ndarray, times: np.ndarray,
                    k: MultiIndex, m: int) -> np.ndarray:
    """Time samples of the part of the integrand coming from y in N_nu(x)^c."""
    power = spec.time_power(k)
    tag = spec.kernel_tag
    radii = np.atleast_1d(local_radius(x, spec.nu))
    if spec.is_poisson:
        tau, subordination = subordination_matrix(times, m)
    out = np.empty((times.size, x.shape[0], f.vector_dim))
    for j, point in enumerate(x):
        nodes, weights = _exterior_rule(point, float(radii[j]))
        weighted = f.evaluate(nodes) * weights[:, None]
        if spec.is_poisson:
            kernel = kernel_derivative(point[None, None, :], nodes[None, :, :], tau[:, None], 0, k, tag)
            out[:, j, :] = subordination @ (np.asarray(kernel) @ weighted)
        else:
            kernel = kernel_derivative(point[None, None, :], nodes[None, :, :], times[:, None], m, k, tag)
            out[:, j, :] = np.asarray(kernel) @ weighted
    return times[:, None, None] ** power * out


def g_integrand(spec: GFunctionSpec, f: HermiteExpansion, x, times) -> np.ndarray:
    """
    Vector samples t^power d_x^k d_t^beta S_t f(x) of shape (T, X, m), with
    f restricted to the region named by the spec.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if x.shape[-1] != f.dimension:
        raise ArgumentError(f"Point dimension {x.shape[-1]} does not match expansion dimension {f.dimension}.")
    if f.vector_dim != spec.norm.m:
        raise ArgumentError(f"Expansion has {f.vector_dim} components, the norm expects {spec.norm.m}.")
    if np.any(times <= 0):
        raise ArgumentError("Times must be positive.")
    k = spec.space_order(f.dimension)
    if spec.region == "full":
        return _full_samples(spec, f, x, times, k)

    if f.dimension > REGION_MAX_DIMENSION:
        raise CapabilityError(f"Local/global splits are implemented up to dimension {REGION_MAX_DIMENSION}.")
    m = spec.integer_order()
    outer = _global_samples(spec, f, x, times, k, m)
    if spec.is_spectral:
        # spectral samples carry r^beta e^{-rt}, i.e. (-1)^m d_t^m
        outer = (-1) ** m * outer
    if spec.region == "global":
        return outer
    return _full_samples(spec, f, x, times, k) - outer


def _block_size(spec: GFunctionSpec, tgrid: TimeGrid, points: int) -> int:
    per_point = tgrid.points * spec.norm.m
    if spec.semigroup_tag == "poisson_euclid":
        per_point *= 4
    return max(1, min(points, _BLOCK_FLOATS // per_point))


def g_values(spec: GFunctionSpec, f: HermiteExpansion, x, tgrid: TimeGrid | None = None) -> np.ndarray:
    """g(f) at every point of x (shape (X, n)), as an array of shape (X,)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    tgrid = tgrid or TimeGrid()
    out = np.empty(x.shape[0])
    if f.is_zero():
        out[:] = 0.0
        return out
    step = _block_size(spec, tgrid, x.shape[0])
    for start in range(0, x.shape[0], step):
        block = slice(start, start + step)
        samples = g_integrand(spec, f, x[block], tgrid.nodes)
        out[block] = lq_from_samples(tgrid, spec.norm(samples), spec.q, axis=0)
    return out


def g_value(spec: GFunctionSpec, f: HermiteExpansion, x, tgrid: TimeGrid | None = None) -> float:
    """g(f)(x) at a single point x."""
    x = np.asarray(x, dtype=float)
    if x.ndim > 1:
        raise ArgumentError("g_value takes a single point; use g_values for arrays of points.")
    return float(g_values(spec, f, x[None, :] if x.ndim == 1 else x.reshape(1, 1), tgrid)[0])


def eigenfunction_g_value(k: MultiIndex | Sequence[int] | int, x, q: float, beta: float):
    """|H~_k(x)| Gamma(q beta)^{1/q} q^{-beta}, the closed form for a single eigenfunction."""
    return np.abs(hermite_tilde(k, x)) * gamma_integral(q * beta, q) ** (1.0 / q)


# ---------------------------------------------------------------------------
# Norms in L^p(gamma_-1)
# ---------------------------------------------------------------------------

def lp_space_grid(n: int, p: float, points: int | None = None) -> SpaceGrid:
    """Gauss-Hermite grid for L^p(gamma_-1), scaled to the decay e^{-(p-1)|x|^2} of |f|^p e^{|x|^2}."""
    if p <= 1:
        raise ArgumentError(f"Space exponent p must exceed 1 for Hermite-type functions, got {p}.")
    points = points or settings.space_points
    return gauss_hermite_grid(points, n, scale=1.0 / math.sqrt(p - 1.0), measure="inverse_gauss")


def expansion_lp_norm(f: HermiteExpansion, p: float, norm: NormSpec | None = None,
                      sgrid: SpaceGrid | None = None) -> float:
    """|| ||f(.)||_X ||_{L^p(gamma_-1)}."""
    norm = norm or NormSpec(m=f.vector_dim)
    sgrid = sgrid or lp_space_grid(f.dimension, p)
    return lp_norm(sgrid, norm(f.evaluate(sgrid.nodes)), p)


def g_lp_norm(spec: GFunctionSpec, f: HermiteExpansion, p: float, sgrid: SpaceGrid | None = None,
              tgrid: TimeGrid | None = None) -> float:
    """||g(f)||_{L^p(gamma_-1)}."""
    sgrid = sgrid or lp_space_grid(f.dimension, p)
    return lp_norm(sgrid, g_values(spec, f, sgrid.nodes, tgrid), p)


# ---------------------------------------------------------------------------
# Probes
# ---------------------------------------------------------------------------

@dataclass
class RatioProbeResult:
    upper: BoundReport
    lower: BoundReport
    rows: list[dict[str, Any]] = field(default_factory=list)


def _named(
    corpus: Mapping[str, HermiteExpansion] | Sequence[HermiteExpansion], prefix: str
) -> list[tuple[str, HermiteExpansion]]:
    if isinstance(corpus, Mapping):
        return list(corpus.items())
    return [(f"{prefix}[{i}]", f) for i, f in enumerate(corpus)]


def ratio_probe(
    spec: GFunctionSpec,
    corpus: Mapping[str, HermiteExpansion] | Sequence[HermiteExpansion],
    p: float,
    sgrid: SpaceGrid | None = None,
    tgrid: TimeGrid | None = None,
    corpus_id: str = "corpus",
) -> RatioProbeResult:
    """
    max over the corpus of ||g(f)||_p / ||f||_p (upper) and ||f||_p / ||g(f)||_p
    (lower). Members with a vanishing norm on either side are skipped.
    """
    members = _named(corpus, corpus_id)
    if not members:
        raise ArgumentError("The corpus is empty.")
    rows: list[dict[str, Any]] = []
    for name, f in members:
        grid = sgrid or lp_space_grid(f.dimension, p)
        f_norm = expansion_lp_norm(f, p, spec.norm, grid)
        g_norm = g_lp_norm(spec, f, p, grid, tgrid) if f_norm > 0 else 0.0
        if f_norm == 0 or g_norm == 0:
            logger.warning(f"Skipping corpus member {name}: zero norm (f: {f_norm:.3g}, g: {g_norm:.3g}).")
            continue
        rows.append({"member": name, "f_norm": f_norm, "g_norm": g_norm,
                     "upper": g_norm / f_norm, "lower": f_norm / g_norm})
    if not rows:
        raise ArgumentError("Every corpus member was skipped; nothing to probe.")

    parameters = spec.describe() | {"p": p, "corpus": corpus_id}
    half = (len(rows) + 1) // 2

    def locate(i: int) -> dict[str, Any]:
        return {"member": rows[i]["member"]}

    upper = report_from_ratios("gfun_upper", np.array([r["upper"] for r in rows]), locate, parameters, half)
    lower = report_from_ratios("gfun_lower", np.array([r["lower"] for r in rows]), locate, parameters, half)
    return RatioProbeResult(upper, lower, rows)


def maximal_value(m: int, k: MultiIndex | Sequence[int] | None, f: HermiteExpansion, x,
                  tgrid: TimeGrid | None = None, semigroup_tag: str = "heat_A"):
    """
    sup_t || t^{m+|k|/2} d_t^m d_x^k S_t f(x) ||_X on the time grid, refined by
    one parabolic step in log t around the grid maximum.
    """
    if m < 0:
        raise ArgumentError(f"Time order must be non-negative, got {m}.")
    if semigroup_tag not in SPECTRAL_TAGS:
        raise ArgumentError(f"Maximal values are computed spectrally; got '{semigroup_tag}'.")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim <= 1
    x = np.atleast_2d(x) if x.ndim else x.reshape(1, 1)
    if x.shape[-1] != f.dimension:
        raise ArgumentError(f"Point dimension {x.shape[-1]} does not match expansion dimension {f.dimension}.")
    tgrid = tgrid or TimeGrid()
    k = MultiIndex.zero(f.dimension) if k is None else as_multiindex(k)
    norm = NormSpec(m=f.vector_dim)
    power = m + (k.degree() if semigroup_tag.startswith("poisson") else 0.5 * k.degree())

    samples = norm(_spectral_samples(f, x, tgrid.nodes, m, k, power, semigroup_tag))
    best = np.argmax(samples, axis=0)
    grid_max = samples[best, np.arange(x.shape[0])]

    inner = np.clip(best, 1, tgrid.points - 2)
    cols = np.arange(x.shape[0])
    left, mid, right = samples[inner - 1, cols], samples[inner, cols], samples[inner + 1, cols]
    curvature = left - 2.0 * mid + right
    with np.errstate(divide="ignore", invalid="ignore"):
        offset = np.where(curvature < 0, 0.5 * (left - right) / curvature, 0.0)
    offset = np.clip(np.nan_to_num(offset), -1.0, 1.0) * tgrid.step
    t_star = np.exp(np.log(tgrid.nodes[inner]) + offset)
    refined = norm(_spectral_paired(f, x, t_star, m, k, power, semigroup_tag))
    result = np.maximum(grid_max, refined)
    return float(result[0]) if scalar else result


def subordination_transfer_probe(
    f: HermiteExpansion,
    x,
    m: int,
    k: MultiIndex | Sequence[int] | None = None,
    q: float = 2.0,
    tgrid: TimeGrid | None = None,
) -> BoundReport:
    """
    Pointwise ratio g^q_{m,k,Poisson}(f)(x) / sum_{0 <= l <= m/2} g^q_{m-l,k,heat}(f)(x)
    over the points x, reported as a fitted constant.
    """
    if m < 1:
        raise ArgumentError(f"Order must be at least 1, got {m}.")
    x = np.atleast_2d(np.asarray(x, dtype=float))
    k_entries = None if k is None else as_multiindex(k).entries
    norm = NormSpec(m=f.vector_dim)
    poisson = GFunctionSpec(beta=m, k=k_entries, q=q, semigroup_tag="poisson_A", norm=norm)
    lhs = g_values(poisson, f, x, tgrid)
    rhs = np.zeros_like(lhs)
    for l in range(m // 2 + 1):
        rhs = rhs + g_values(poisson.with_changes(beta=m - l, semigroup_tag="heat_A"), f, x, tgrid)
    keep = rhs > 0
    if not np.any(keep):
        raise ArgumentError("The heat g-functions vanish at every sample point.")
    points = x[keep]

    def locate(i: int) -> dict[str, Any]:
        return {f"x{j + 1}": round(float(v), 6) for j, v in enumerate(points[i])}

    parameters = {"m": m, "k": "0" if k is None else str(as_multiindex(k)), "q": q}
    return report_from_ratios("subordination_transfer", lhs[keep] / rhs[keep], locate, parameters)


def beta_monotonicity_probe(
    corpus: Mapping[str, HermiteExpansion] | Sequence[HermiteExpansion],
    beta_low: float,
    beta_high: float,
    q: float = 2.0,
    p: float = 2.0,
    semigroup_tag: GTag = "poisson_A",
    sgrid: SpaceGrid | None = None,
    tgrid: TimeGrid | None = None,
    corpus_id: str = "corpus",
) -> BoundReport:
    """Fitted C in ||g_{beta_low}(f)||_p <= C ||g_{beta_high}(f)||_p over the corpus."""
    if not beta_low < beta_high:
        raise ArgumentError(f"Need beta_low < beta_high, got {beta_low} and {beta_high}.")
    members = _named(corpus, corpus_id)
    names: list[str] = []
    ratios: list[float] = []
    for name, f in members:
        spec = GFunctionSpec(beta=beta_low, q=q, semigroup_tag=semigroup_tag, norm=NormSpec(m=f.vector_dim))
        grid = sgrid or lp_space_grid(f.dimension, p)
        low = g_lp_norm(spec, f, p, grid, tgrid)
        high = g_lp_norm(spec.with_changes(beta=beta_high), f, p, grid, tgrid)
        if high == 0:
            logger.warning(f"Skipping corpus member {name}: vanishing g-function.")
            continue
        names.append(name)
        ratios.append(low / high)
    if not ratios:
        raise ArgumentError("Every corpus member was skipped; nothing to probe.")
    parameters = {"beta_low": beta_low, "beta_high": beta_high, "q": q, "p": p,
                  "semigroup": semigroup_tag, "corpus": corpus_id}
    return report_from_ratios("beta_monotonicity", np.array(ratios), lambda i: {"member": names[i]},
                              parameters, (len(ratios) + 1) // 2)


# ---------------------------------------------------------------------------
# Point-mass sources
# ---------------------------------------------------------------------------

def point_mass_log_g(
    x,
    z,
    m: int,
    k: MultiIndex | Sequence[int] | None = None,
    q: float = 2.0,
    tgrid: TimeGrid | None = None,
) -> np.ndarray:
    """
    log g^q_{m,k,P}(f)(x) for f the unit point mass of L^1(gamma_-1) at z:

        g(f)(x) = pi^{-n/2} e^{-|z|^2} || t^{m+|k|} d_t^m d_x^k P_t(x, z) ||_{L^q(dt/t)}

    The Poisson kernel derivative comes from one shared subordination grid.
    Points where the norm vanishes get -inf.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    z = np.asarray(z, dtype=float)
    n = x.shape[-1]
    if z.shape != (n,):
        raise ArgumentError(f"Source point of shape {z.shape} for points of dimension {n}.")
    if m < 0:
        raise ArgumentError(f"Order must be non-negative, got {m}.")
    k = MultiIndex.zero(n) if k is None else as_multiindex(k)
    tgrid = tgrid or TimeGrid(1e-3, 1e2, 384)
    times = tgrid.nodes
    tau, weights = subordination_matrix(times, m)
    heat = np.asarray(kernel_derivative(x[None, :, :], z, tau[:, None], 0, k, "A"))
    samples = (weights @ heat) * times[:, None] ** (m + k.degree())
    norms = lq_from_samples(tgrid, samples, q, axis=0)
    with np.errstate(divide="ignore"):
        return np.log(norms) - 0.5 * n * math.log(math.pi) - float(z @ z)


def log_weak_type_proxy(log_g: np.ndarray, log_w: np.ndarray) -> float:
    """
    log sup_s s mu({g > s}) for a discrete measure with log weights `log_w`
    carried by points where g takes the values exp(log_g).
    """
    log_g = np.asarray(log_g, dtype=float).ravel()
    log_w = np.asarray(log_w, dtype=float).ravel()
    if log_g.shape != log_w.shape or log_g.size == 0:
        raise ArgumentError("Need one log weight per log value, and at least one point.")
    order = np.argsort(-log_g, kind="stable")
    cumulative = np.logaddexp.accumulate(log_w[order])
    return float(np.max(log_g[order] + cumulative))
