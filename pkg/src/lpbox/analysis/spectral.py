"""
Finite-rank spectral calculus on span{H~_k}.

A HermiteExpansion stores f = sum_k c_k H~_k with vector coefficients
c_k in R^m. Every operator below is diagonal (or an index shift) in this
basis and returns a new expansion:

    heat            T_t H~_k        = e^{-lam t} H~_k,          lam = n + |k|
    Poisson         P_t H~_k        = e^{-t sqrt(lam)} H~_k
    Poisson (A - I) P_t H~_k        = e^{-t sqrt(lam - 1)} H~_k
    space           d_{x_i} H~_k    = -H~_{k + e_i}
    Riesz           R_i H~_k        = -lam^{-1/2} H~_{k + e_i}
    Weyl            d_t^beta e^{-rt} = r^beta e^{-rt}
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Mapping, Sequence

import numpy as np

from lpbox.analysis.kernels import (
    KernelTag,
    SubordinationRule,
    kernel_derivative,
    ou_coordinates,
    subordination_weights,
)
from lpbox.analysis.oracles import gamma_integral
from lpbox.analysis.quadrature import (
    SpaceGrid,
    TimeGrid,
    check_tail_decay,
    gauss_hermite_grid,
)
from lpbox.analysis.special_functions import (
    MultiIndex,
    as_multiindex,
    hermite_table,
    log_hermite_tilde_sq_norm,
    multiindices_up_to_degree,
)
from lpbox.core.config import settings
from lpbox.core.exceptions import ArgumentError, CapabilityError
from lpbox.models.data_models import ExpansionTerm, HermiteExpansionDocument

logger = logging.getLogger(__name__)

SpectralTag = Literal["heat_A", "heat_A_minus_I", "poisson_A", "poisson_A_minus_I"]

ZERO_MODE_FLAG = "zero_mode"


def _order_key(k: MultiIndex) -> tuple:
    return (k.degree(), k.entries)


@dataclass(frozen=True)
class Eigenvalue:
    """Eigenvalue `value` of the generator and the decay rate of the semigroup on that mode."""
    value: float
    rate: float

    @classmethod
    def of(cls, k: MultiIndex, semigroup: SpectralTag) -> Eigenvalue:
        lam = float(len(k) + k.degree())
        if semigroup.endswith("A_minus_I"):
            lam -= 1.0
        rate = math.sqrt(lam) if semigroup.startswith("poisson") else lam
        return cls(lam, rate)


@dataclass(frozen=True, eq=False)
class HermiteExpansion:
    dimension: int
    indices: tuple[MultiIndex, ...]
    coefficients: np.ndarray
    flags: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        coefficients = np.asarray(self.coefficients, dtype=float)
        if coefficients.ndim == 1:
            coefficients = coefficients[:, None]
        if coefficients.ndim != 2 or coefficients.shape[0] != len(self.indices):
            raise ArgumentError("Coefficients must have shape (number of terms, vector_dim).")
        if coefficients.shape[1] < 1:
            raise ArgumentError("Expansions need at least one component.")
        for k in self.indices:
            if len(k) != self.dimension:
                raise ArgumentError(f"Index {k} does not have dimension {self.dimension}.")
            if max(k) > settings.degree_cap:
                raise CapabilityError(f"Index {k} exceeds the degree cap {settings.degree_cap} per dimension.")
        if len(set(self.indices)) != len(self.indices):
            raise ArgumentError("Expansion indices must be unique.")
        coefficients.setflags(write=False)
        object.__setattr__(self, "coefficients", coefficients)

    # --- construction -----------------------------------------------------

    @classmethod
    def from_terms(cls, dimension: int, terms: Mapping, vector_dim: int | None = None,
                   flags: frozenset[str] = frozenset()) -> HermiteExpansion:
        """Build from {k: coefficient}; repeated indices are summed."""
        merged: dict[MultiIndex, np.ndarray] = {}
        for k, c in terms.items():
            k = as_multiindex(k)
            c = np.atleast_1d(np.asarray(c, dtype=float))
            merged[k] = merged[k] + c if k in merged else c
        if vector_dim is None:
            vector_dim = next(iter(merged.values())).shape[0] if merged else 1
        ordered = sorted(merged, key=_order_key)
        coefficients = np.zeros((len(ordered), vector_dim))
        for row, k in enumerate(ordered):
            coefficients[row] = merged[k]
        return cls(dimension, tuple(ordered), coefficients, flags)

    @classmethod
    def zero(cls, dimension: int, vector_dim: int = 1) -> HermiteExpansion:
        return cls(dimension, (), np.zeros((0, vector_dim)))

    @classmethod
    def eigenfunction(
        cls, k: MultiIndex | Sequence[int] | int, coefficient: float | Sequence[float] = 1.0
    ) -> HermiteExpansion:
        k = as_multiindex(k)
        return cls.from_terms(len(k), {k: coefficient})

    @classmethod
    def stack(cls, components: Sequence[HermiteExpansion]) -> HermiteExpansion:
        """Vector-valued expansion whose j-th component is the scalar expansion components[j]."""
        if not components:
            raise ArgumentError("Cannot stack an empty list of expansions.")
        n = components[0].dimension
        indices = sorted({k for comp in components for k in comp.indices}, key=_order_key)
        coefficients = np.zeros((len(indices), len(components)))
        position = {k: row for row, k in enumerate(indices)}
        for j, comp in enumerate(components):
            if comp.dimension != n or comp.vector_dim != 1:
                raise ArgumentError("Stacked expansions must be scalar and share a dimension.")
            for k, c in zip(comp.indices, comp.coefficients[:, 0]):
                coefficients[position[k], j] = c
        return cls(n, tuple(indices), coefficients)

    # --- inspection --------------------------------------------------------

    @property
    def vector_dim(self) -> int:
        return self.coefficients.shape[1]

    @property
    def max_degree(self) -> int:
        return max((k.degree() for k in self.indices), default=0)

    def is_zero(self) -> bool:
        return not np.any(self.coefficients)

    def coefficient(self, k: MultiIndex | Sequence[int] | int) -> np.ndarray:
        k = as_multiindex(k)
        for index, c in zip(self.indices, self.coefficients):
            if index == k:
                return c.copy()
        return np.zeros(self.vector_dim)

    def component(self, j: int) -> HermiteExpansion:
        return HermiteExpansion(self.dimension, self.indices, self.coefficients[:, j:j + 1], self.flags)

    def degrees(self) -> np.ndarray:
        return np.array([k.degree() for k in self.indices], dtype=float)

    def eigenvalues(self, semigroup: SpectralTag = "heat_A") -> np.ndarray:
        return np.array([Eigenvalue.of(k, semigroup).value for k in self.indices], dtype=float)

    def rates(self, semigroup: SpectralTag) -> np.ndarray:
        return np.array([Eigenvalue.of(k, semigroup).rate for k in self.indices], dtype=float)

    def sq_norms(self) -> np.ndarray:
        """||H~_k||^2 in L^2(gamma_-1) for every index."""
        return np.exp([log_hermite_tilde_sq_norm(k) for k in self.indices])

    # --- evaluation --------------------------------------------------------

    def basis_values(self, x) -> np.ndarray:
        """prod_i H_{k_i}(x_i) for each index, shape (K, ...); the Gaussian factor is left out."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape[-1] != self.dimension:
            raise ArgumentError(f"Point dimension {x.shape[-1]} does not match expansion dimension {self.dimension}.")
        if not self.indices:
            return np.zeros((0,) + x.shape[:-1])
        top = max(max(k) for k in self.indices)
        table = hermite_table(top, x)
        out = np.empty((len(self.indices),) + x.shape[:-1])
        for row, k in enumerate(self.indices):
            value = np.ones(x.shape[:-1])
            for i, ki in enumerate(k):
                if ki:
                    value = value * table[ki][..., i]
            out[row] = value
        return out

    def evaluate(self, x) -> np.ndarray:
        """sum_k c_k H~_k(x), shape (..., m)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        basis = self.basis_values(x)
        gauss = np.exp(-np.sum(x * x, axis=-1))
        return np.tensordot(basis, self.coefficients, axes=(0, 0)) * gauss[..., None]

    def __call__(self, x) -> np.ndarray:
        values = self.evaluate(x)
        return values[..., 0] if self.vector_dim == 1 else values

    # --- algebra -----------------------------------------------------------

    def scaled(self, factors: np.ndarray, flags: frozenset[str] | None = None) -> HermiteExpansion:
        """Multiply term k by factors[k] (scalar or per-component)."""
        factors = np.asarray(factors, dtype=float)
        if factors.ndim == 1:
            factors = factors[:, None]
        return HermiteExpansion(self.dimension, self.indices, self.coefficients * factors,
                                self.flags if flags is None else flags)

    def shifted(self, k: MultiIndex, factors: np.ndarray | None = None) -> HermiteExpansion:
        """Move every term l to l + k, optionally scaling it."""
        coefficients = self.coefficients if factors is None else self.coefficients * np.asarray(factors)[:, None]
        indices = tuple(index + k for index in self.indices)
        return HermiteExpansion(self.dimension, indices, coefficients, self.flags)

    def _combine(self, other: HermiteExpansion, sign: float) -> HermiteExpansion:
        if other.dimension != self.dimension or other.vector_dim != self.vector_dim:
            raise ArgumentError("Expansions must share dimension and vector size.")
        terms: dict[MultiIndex, np.ndarray] = {k: c for k, c in zip(self.indices, self.coefficients)}
        for k, c in zip(other.indices, other.coefficients):
            terms[k] = terms[k] + sign * c if k in terms else sign * c
        if not terms:
            return HermiteExpansion.zero(self.dimension, self.vector_dim)
        return HermiteExpansion.from_terms(self.dimension, terms, self.vector_dim, self.flags | other.flags)

    def __add__(self, other: HermiteExpansion) -> HermiteExpansion:
        return self._combine(other, 1.0)

    def __sub__(self, other: HermiteExpansion) -> HermiteExpansion:
        return self._combine(other, -1.0)

    def __mul__(self, scalar: float) -> HermiteExpansion:
        return HermiteExpansion(self.dimension, self.indices, self.coefficients * float(scalar), self.flags)

    __rmul__ = __mul__

    def __neg__(self) -> HermiteExpansion:
        return self * -1.0

    def max_coefficient_difference(self, other: HermiteExpansion) -> float:
        diff = self - other
        return float(np.max(np.abs(diff.coefficients))) if diff.indices else 0.0

    # --- serialization -----------------------------------------------------

    def to_document(self) -> HermiteExpansionDocument:
        return HermiteExpansionDocument(
            n=self.dimension,
            m=self.vector_dim,
            terms=[ExpansionTerm(k=list(k.entries), c=[float(v) for v in c])
                   for k, c in zip(self.indices, self.coefficients)],
        )

    @classmethod
    def from_document(cls, document: HermiteExpansionDocument | dict) -> HermiteExpansion:
        if isinstance(document, dict):
            document = HermiteExpansionDocument.model_validate(document)
        if not document.terms:
            return cls.zero(document.n, document.m)
        return cls.from_terms(document.n, {tuple(t.k): t.c for t in document.terms}, document.m)


# ---------------------------------------------------------------------------
# Expansion of functions
# ---------------------------------------------------------------------------

def default_space_grid(n: int, points: int | None = None) -> SpaceGrid:
    return gauss_hermite_grid(points or settings.space_points, n, measure="inverse_gauss")


def gram_matrix(indices: Sequence[MultiIndex], grid: SpaceGrid) -> np.ndarray:
    """Quadrature Gram matrix of the H~_k against gamma_-1; diagonal ||H~_k||^2 in exact arithmetic."""
    probe = HermiteExpansion(grid.dimension, tuple(indices), np.zeros((len(indices), 1)))
    basis = probe.basis_values(grid.nodes)
    w = np.exp(grid.log_weights - 2.0 * np.sum(grid.nodes**2, axis=-1))
    return (basis * w) @ basis.T


def expand(
    f: Callable[[np.ndarray], np.ndarray],
    n: int,
    max_degree: int,
    grid: SpaceGrid | None = None,
    check_tail: bool = True,
) -> HermiteExpansion:
    """
    c_k = ||H~_k||^{-2} int f H~_k dgamma_-1 for |k| <= max_degree, by quadrature
    on an inverse Gaussian grid.
    """
    grid = grid or default_space_grid(n)
    if grid.measure_tag != "inverse_gauss" or grid.dimension != n:
        raise ArgumentError("expand needs an inverse_gauss grid of matching dimension.")
    if check_tail:
        check_tail_decay(f, n, degree=max_degree)
    indices = multiindices_up_to_degree(n, max_degree)
    values = np.asarray(f(grid.nodes), dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    # e^{-|y|^2} of H~_k is folded into the weights
    weighted = values * np.exp(grid.log_weights - np.sum(grid.nodes**2, axis=-1))[:, None]
    probe = HermiteExpansion(n, tuple(indices), np.zeros((len(indices), 1)))
    moments = probe.basis_values(grid.nodes) @ weighted
    sq = probe.sq_norms()
    return HermiteExpansion(n, tuple(indices), moments / sq[:, None])


# ---------------------------------------------------------------------------
# Semigroup actions
# ---------------------------------------------------------------------------

def _check_t(t: float, strict: bool = False) -> None:
    if t < 0 or (strict and t == 0):
        raise ArgumentError(f"Time must be {'positive' if strict else 'non-negative'}, got {t}.")


def heat_action(f: HermiteExpansion, t: float, operator: Literal["A", "A_minus_I"] = "A") -> HermiteExpansion:
    _check_t(t)
    rates = f.rates("heat_A" if operator == "A" else "heat_A_minus_I")
    return f.scaled(np.exp(-rates * t))


def poisson_action(f: HermiteExpansion, t: float, operator_tag: Literal["A", "A_minus_I"] = "A") -> HermiteExpansion:
    """P_t f; for A - I in dimension 1 the k = 0 mode has rate 0 and is flagged."""
    _check_t(t)
    tag: SpectralTag = "poisson_A" if operator_tag == "A" else "poisson_A_minus_I"
    rates = f.rates(tag)
    flags = f.flags
    if np.any(rates == 0):
        flags = flags | {ZERO_MODE_FLAG}
        logger.debug("Poisson action of A - I meets the zero mode; its multiplier is 1.")
    return f.scaled(np.exp(-rates * t), flags)


def weyl_time_derivative(
    f: HermiteExpansion, t: float, beta: float, semigroup_tag: SpectralTag = "heat_A"
) -> HermiteExpansion:
    """d_t^beta S_t f with r^beta e^{-rt} per mode; modes with r = 0 are annihilated."""
    _check_t(t, strict=True)
    if beta <= 0:
        raise ArgumentError(f"Weyl order must be positive, got {beta}.")
    rates = f.rates(semigroup_tag)
    factors = np.where(rates > 0, rates**beta * np.exp(-rates * t), 0.0)
    return f.scaled(factors)


def ordinary_time_derivative(
    f: HermiteExpansion, t: float, m: int, semigroup_tag: SpectralTag = "heat_A"
) -> HermiteExpansion:
    """d_t^m S_t f with the signed multipliers (-r)^m e^{-rt}."""
    _check_t(t)
    if m < 0:
        raise ArgumentError(f"Time order must be non-negative, got {m}.")
    rates = f.rates(semigroup_tag)
    return f.scaled((-rates) ** m * np.exp(-rates * t))


def space_derivative(f: HermiteExpansion, k: MultiIndex | Sequence[int]) -> HermiteExpansion:
    """d_x^k f, using d/dz H~_l = -H~_{l+1}."""
    k = as_multiindex(k)
    if len(k) != f.dimension:
        raise ArgumentError(f"Space order {k} does not match dimension {f.dimension}.")
    return f.shifted(k) * ((-1) ** k.degree())


def coordinate_multiple(f: HermiteExpansion, i: int) -> HermiteExpansion:
    """x_i f, using x H~_j = H~_{j+1} / 2 + j H~_{j-1}; i is 1-based."""
    if not 1 <= i <= f.dimension:
        raise ArgumentError(f"Coordinate {i} out of range 1..{f.dimension}.")
    terms: dict[MultiIndex, np.ndarray] = {}

    def add(index: MultiIndex, value: np.ndarray) -> None:
        terms[index] = terms[index] + value if index in terms else value

    for k, c in zip(f.indices, f.coefficients):
        add(k.shifted(i - 1, 1), 0.5 * c)
        if k[i - 1]:
            add(k.shifted(i - 1, -1), k[i - 1] * c)
    if not terms:
        return HermiteExpansion.zero(f.dimension, f.vector_dim)
    return HermiteExpansion.from_terms(f.dimension, terms, f.vector_dim, f.flags)


def apply_operator(f: HermiteExpansion) -> HermiteExpansion:
    """A f = -Delta f / 2 - x . grad f, built from derivatives and coordinate multiples."""
    total = HermiteExpansion.zero(f.dimension, f.vector_dim)
    for i in range(1, f.dimension + 1):
        unit = MultiIndex.unit(f.dimension, i - 1)
        first = space_derivative(f, unit)
        total = total - space_derivative(first, unit) * 0.5 - coordinate_multiple(first, i)
    return total


def inverse_sqrt(f: HermiteExpansion) -> HermiteExpansion:
    """A^{-1/2} f = sum (n + |l|)^{-1/2} c_l H~_l."""
    return f.scaled(f.eigenvalues("heat_A") ** -0.5)


def riesz_transform(f: HermiteExpansion, i: int) -> HermiteExpansion:
    """R_i f = d_{x_i} A^{-1/2} f; i is 1-based."""
    if not 1 <= i <= f.dimension:
        raise ArgumentError(f"Riesz coordinate {i} out of range 1..{f.dimension}.")
    if not f.indices:
        return f
    return f.shifted(MultiIndex.unit(f.dimension, i - 1), -(f.eigenvalues("heat_A") ** -0.5))


def e0_projection(f: HermiteExpansion) -> HermiteExpansion:
    """Keep only the k = 0 term."""
    zero = MultiIndex.zero(f.dimension)
    if zero not in f.indices:
        return HermiteExpansion.zero(f.dimension, f.vector_dim)
    return HermiteExpansion.from_terms(f.dimension, {zero: f.coefficient(zero)}, f.vector_dim)


# ---------------------------------------------------------------------------
# Identities
# ---------------------------------------------------------------------------

def intertwining_defect(f: HermiteExpansion, t: float, i: int) -> float:
    """max |coef| of d_{x_i} P_t^A f + d_t P_t^{A-I} R_i f; i is 1-based."""
    lhs = space_derivative(poisson_action(f, t, "A"), MultiIndex.unit(f.dimension, i - 1))
    rhs = -ordinary_time_derivative(riesz_transform(f, i), t, 1, "poisson_A_minus_I")
    return lhs.max_coefficient_difference(rhs)


def inner_product(f: HermiteExpansion, h: HermiteExpansion) -> float:
    """int <f, h> dgamma_-1, spectrally."""
    total = 0.0
    h_terms = dict(zip(h.indices, h.coefficients))
    for k, c, sq in zip(f.indices, f.coefficients, f.sq_norms()):
        if k in h_terms:
            total += float(np.dot(c, h_terms[k])) * sq
    return total


@dataclass(frozen=True)
class PolarizationResult:
    lhs_spectral: float
    rhs_spectral: float
    lhs_quadrature: float
    rhs_quadrature: float

    @property
    def spectral_error(self) -> float:
        return abs(self.lhs_spectral - self.rhs_spectral) / max(abs(self.lhs_spectral), 1e-300)

    @property
    def quadrature_error(self) -> float:
        return abs(self.lhs_quadrature - self.rhs_quadrature) / max(abs(self.lhs_quadrature), 1e-300)


def _union_indices(*expansions: HermiteExpansion) -> list[MultiIndex]:
    return sorted({k for e in expansions for k in e.indices}, key=_order_key)


def _aligned(f: HermiteExpansion, indices: Sequence[MultiIndex]) -> np.ndarray:
    position = {k: row for row, k in enumerate(indices)}
    out = np.zeros((len(indices), f.vector_dim))
    for k, c in zip(f.indices, f.coefficients):
        out[position[k]] = c
    return out


def polarization_check(f: HermiteExpansion, h: HermiteExpansion, grid: SpaceGrid | None = None,
                       tgrid: TimeGrid | None = None) -> PolarizationResult:
    """
    int <f, h> dgamma_-1 = 4 int_0^inf int <t d_t P_t f, t d_t P_t h> dgamma_-1 dt/t,
    once per mode with Gamma integrals and once by space and time quadrature.
    """
    indices = _union_indices(f, h)
    cf, ch = _aligned(f, indices), _aligned(h, indices)
    probe = HermiteExpansion(f.dimension, tuple(indices), np.zeros((len(indices), 1)))
    sq = probe.sq_norms()
    lam = probe.eigenvalues("heat_A")
    pair = np.sum(cf * ch, axis=1)

    lhs_spectral = float(np.sum(pair * sq))
    per_mode = np.array([4.0 * l * gamma_integral(2.0, 2.0 * math.sqrt(l)) for l in lam])
    rhs_spectral = float(np.sum(pair * sq * per_mode))

    grid = grid or default_space_grid(f.dimension)
    tgrid = tgrid or TimeGrid()
    gram = gram_matrix(indices, grid)
    lhs_quadrature = float(np.sum(cf * (gram @ ch)))
    rate = np.sqrt(lam)
    # t d_t P_t on each mode: -t r e^{-rt}
    mult = -(tgrid.nodes[:, None] * rate[None, :]) * np.exp(-tgrid.nodes[:, None] * rate[None, :])
    integrand = np.einsum("tk,kj,tj,kc,jc->t", mult, gram, mult, cf, ch)
    rhs_quadrature = 4.0 * float(np.sum(tgrid.weights * integrand))
    return PolarizationResult(lhs_spectral, rhs_spectral, lhs_quadrature, rhs_quadrature)


def plancherel_check(f: HermiteExpansion, m: int, k: MultiIndex | Sequence[int],
                     grid: SpaceGrid | None = None, tgrid: TimeGrid | None = None) -> tuple[float, float]:
    """
    ||t^{m+|k|/2} d_t^m d_x^k T_t f||^2 in L^2(gamma_-1) x L^2(dt/t), by the
    coefficient formula sum |c_l|^2 ||H~_{l+k}||^2 lam^{2m} Gamma(2m+|k|) / (2 lam)^{2m+|k|}
    and by quadrature. Returns (formula, quadrature).
    """
    k = as_multiindex(k)
    power = 2 * m + k.degree()
    if power <= 0:
        raise ArgumentError("The square function needs 2m + |k| > 0.")
    lam = f.eigenvalues("heat_A")
    shifted = f.shifted(k)
    sq = shifted.sq_norms()
    c2 = np.sum(f.coefficients**2, axis=1)
    formula = float(np.sum(c2 * sq * lam ** (2 * m) * np.array([gamma_integral(power, 2.0 * l) for l in lam])))

    grid = grid or default_space_grid(f.dimension)
    tgrid = tgrid or TimeGrid()
    gram = gram_matrix(shifted.indices, grid)
    t = tgrid.nodes[:, None]
    mult = t ** (0.5 * power) * lam[None, :] ** m * np.exp(-lam[None, :] * t)
    integrand = np.einsum("tk,kj,tj,kc,jc->t", mult, gram, mult, f.coefficients, f.coefficients)
    return formula, float(np.sum(tgrid.weights * integrand))


# ---------------------------------------------------------------------------
# Kernel-quadrature actions
# ---------------------------------------------------------------------------

def _middle_gaussian(tag: KernelTag, x: np.ndarray, t, decay: float) -> tuple[np.ndarray, np.ndarray]:
    """Center (..., n) and precision (...) of kernel(x, y) e^{-decay |y|^2} as a Gaussian in y."""
    t = np.asarray(t, dtype=float)
    if tag == "euclid":
        p_kernel = 1.0 / (2.0 * t)
        precision = p_kernel + decay
        return (p_kernel / precision)[..., None] * x, precision
    a, b, _ = ou_coordinates(t)
    a, b = np.asarray(a), np.asarray(b)
    precision = a * a * b * b + decay
    return (a * b * b / precision)[..., None] * x, precision


def kernel_heat_action(
    f: Callable[[np.ndarray], np.ndarray],
    t: float,
    x,
    m: int = 0,
    k: MultiIndex | Sequence[int] | None = None,
    tag: KernelTag = "A",
    decay: float = 1.0,
    points: int = 48,
) -> np.ndarray:
    """
    d_t^m d_x^k int K_t(x, y) f(y) dy at the points x (shape (X, n)), with a
    Gauss-Hermite rule centred on the Gaussian factor of K_t(x, .) e^{-decay |.|^2}.
    `decay` is the Gaussian rate carried by f (1 for Hermite expansions).
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    n = x.shape[-1]
    base = gauss_hermite_grid(points, n, measure="lebesgue")
    center, precision = _middle_gaussian(tag, x, t, decay)
    scale = 1.0 / np.sqrt(precision)
    y = center[:, None, :] + np.asarray(scale)[..., None, None] * base.nodes[None, :, :]
    log_w = base.log_weights[None, :] + n * np.log(np.asarray(scale))[..., None]
    kernel = np.asarray(kernel_derivative(x[:, None, :], y, t, m, k, tag))
    values = np.asarray(f(y.reshape(-1, n)), dtype=float)
    values = values.reshape(y.shape[:2] + values.shape[1:])
    if values.ndim == 3:
        return np.einsum("xy,xy,xyc->xc", np.exp(log_w), kernel, values)
    return np.sum(np.exp(log_w) * kernel * values, axis=1)


def kernel_poisson_action(
    f: Callable[[np.ndarray], np.ndarray],
    t: float,
    x,
    m: int = 0,
    k: MultiIndex | Sequence[int] | None = None,
    tag: KernelTag = "A",
    decay: float = 1.0,
    rule: SubordinationRule | None = None,
    points: int = 48,
) -> np.ndarray:
    """d_t^m d_x^k P_t f(x) as a subordination sum of kernel heat actions."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    rule = rule or SubordinationRule()
    tau, weights = subordination_weights(t, m, rule, tag, x.shape[-1])
    total = 0.0
    for tau_j, w_j in zip(tau, weights):
        if w_j == 0.0:
            continue
        total = total + w_j * kernel_heat_action(f, float(tau_j), x, 0, k, tag, decay, points)
    return np.asarray(total)
