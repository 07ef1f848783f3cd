"""
Closed-form kernels and their derivatives.

Notation used throughout, for t > 0:

    a = e^{-t},   b = (1 - e^{-2t})^{-1/2}     (1 - e^{-2t} via expm1)

    T^L_t(x, y) = b^n exp(-b^2 |y - a x|^2)                 Ornstein-Uhlenbeck (Mehler)
    T^A_t(x, y) = pi^{-n/2} e^{-nt} T^L_t(y, x)               inverse Gaussian heat kernel
    T^{A-I}_t   = e^{t} T^A_t
    W_t(z)      = (2 pi t)^{-n/2} exp(-|z|^2 / 2t)            Euclidean heat kernel

All semigroups act by T_t f(x) = int T_t(x, y) f(y) dy (Lebesgue).

Points are arrays with the coordinate axis last; leading axes broadcast,
and `t` may be an array broadcasting against them.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Literal, Sequence

import numpy as np
from numpy.polynomial.hermite import hermgauss

from lpbox.analysis.quadrature import gauss_hermite_grid, integrate
from lpbox.analysis.special_functions import (
    MultiIndex,
    as_multiindex,
    compositions,
    hermite_table,
    multinomial,
    stirling2,
)
from lpbox.core.config import settings
from lpbox.core.exceptions import ArgumentError, CapabilityError

logger = logging.getLogger(__name__)

SignPattern = Literal["corrected", "uncorrected"]
KernelTag = Literal["A", "A_minus_I", "euclid"]

TEUWEN_MAX_ORDER = 8
MAX_SPACE_DEGREE = 6


@dataclass(frozen=True, eq=False)
class KernelQuery:
    """An evaluation request for d_x^k d_t^m K_t(x, y) (or a fractional order beta)."""
    x: np.ndarray
    y: np.ndarray
    t: float
    time_order: int = 0
    space_order: MultiIndex | None = None
    beta: float | None = None

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        y = np.atleast_1d(np.asarray(self.y, dtype=float))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        k = MultiIndex.zero(x.shape[-1]) if self.space_order is None else as_multiindex(self.space_order)
        object.__setattr__(self, "space_order", k)
        if x.shape[-1] != y.shape[-1] or len(k) != x.shape[-1]:
            raise ArgumentError(f"Dimension mismatch: x {x.shape}, y {y.shape}, k {k}.")
        if self.t <= 0:
            raise ArgumentError(f"Kernel time must be positive, got {self.t}.")
        if self.time_order < 0:
            raise ArgumentError(f"Time order must be non-negative, got {self.time_order}.")
        if self.beta is not None and self.beta <= 0:
            raise ArgumentError(f"Fractional order must be positive, got {self.beta}.")

    @property
    def dimension(self) -> int:
        return self.x.shape[-1]


def _check_time(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ArgumentError(f"Kernel time must be positive, got {t}.")
    return t


def _pair(x, y) -> tuple[np.ndarray, np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    scalar = x.ndim <= 1 and y.ndim <= 1
    x, y = np.atleast_1d(x), np.atleast_1d(y)
    if x.shape[-1] != y.shape[-1]:
        raise ArgumentError(f"Points of dimensions {x.shape[-1]} and {y.shape[-1]} do not match.")
    return x, y, scalar


def _out(value: np.ndarray, scalar: bool):
    return float(value) if scalar and np.ndim(value) == 0 else value


def ou_coordinates(t):
    """(a, b, 1 - e^{-2t}) for t > 0."""
    t = _check_time(t)
    one_minus = -np.expm1(-2.0 * t)
    a = np.exp(-t)
    b = 1.0 / np.sqrt(one_minus)
    if a.ndim == 0:
        return float(a), float(b), float(one_minus)
    return a, b, one_minus


# ---------------------------------------------------------------------------
# Euclidean heat kernel
# ---------------------------------------------------------------------------

def heat_euclid(z, t):
    """W_t(z) = (2 pi t)^{-n/2} exp(-|z|^2 / 2t)."""
    t = _check_time(t)
    z = np.asarray(z, dtype=float)
    scalar = z.ndim <= 1 and t.ndim == 0
    z = np.atleast_1d(z)
    n = z.shape[-1]
    value = (2.0 * np.pi * t) ** (-0.5 * n) * np.exp(-np.sum(z * z, axis=-1) / (2.0 * t))
    return _out(value, scalar)


def dxk_dtm_heat_euclid(z, t, m: int, k: MultiIndex | Sequence[int] | None = None):
    """
    d_z^k d_t^m W_t(z)
        = W_t(z) 2^{-m} sum_{|r|=m} (m; r) prod_i (-1)^{k_i} (2t)^{-(2r_i+k_i)/2} H_{2r_i+k_i}(z_i / sqrt(2t)).
    """
    t = _check_time(t)
    z = np.asarray(z, dtype=float)
    scalar = z.ndim <= 1 and t.ndim == 0
    z = np.atleast_1d(z)
    n = z.shape[-1]
    k = MultiIndex.zero(n) if k is None else as_multiindex(k)
    if len(k) != n:
        raise ArgumentError(f"Space order {k} does not match dimension {n}.")
    if m < 0:
        raise ArgumentError(f"Time order must be non-negative, got {m}.")

    scale = np.sqrt(2.0 * t)[..., None] if t.ndim else math.sqrt(2.0 * float(t))
    u = z / scale
    table = hermite_table(2 * m + max(k), u)
    total = 0.0
    for r in compositions(m, n):
        term = float(multinomial(m, r.entries))
        for i in range(n):
            degree = 2 * r[i] + k[i]
            term = term * (-1) ** k[i] * (2.0 * t) ** (-0.5 * degree) * table[degree][..., i]
        total = total + term
    value = heat_euclid(z, t) * 2.0 ** (-m) * total
    return _out(value, scalar)


def dt_heat_euclid(z, u, l: int):
    """d_u^l W_u(z); in one dimension (4u)^{-l} H_{2l}(z / sqrt(2u)) W_u(z)."""
    return dxk_dtm_heat_euclid(z, u, l)


# ---------------------------------------------------------------------------
# Ornstein-Uhlenbeck and inverse Gaussian heat kernels
# ---------------------------------------------------------------------------

def mehler_ou(x, y, t):
    """T^L_t(x, y) = exp(-|y - e^{-t} x|^2 / (1 - e^{-2t})) (1 - e^{-2t})^{-n/2}."""
    x, y, scalar = _pair(x, y)
    a, b, _ = ou_coordinates(t)
    a_, b_ = np.asarray(a)[..., None], np.asarray(b)[..., None]
    z = b_ * (y - a_ * x)
    n = x.shape[-1]
    value = np.asarray(b) ** n * np.exp(-np.sum(z * z, axis=-1))
    return _out(value, scalar and np.ndim(t) == 0)


def invgauss_heat(x, y, t):
    """T^A_t(x, y) = pi^{-n/2} e^{-nt} exp(-|x - e^{-t} y|^2 / (1 - e^{-2t})) (1 - e^{-2t})^{-n/2}."""
    x, y, scalar = _pair(x, y)
    n = x.shape[-1]
    value = np.pi ** (-0.5 * n) * np.exp(-n * np.asarray(t, dtype=float)) * mehler_ou(y, x, t)
    return _out(value, scalar and np.ndim(t) == 0)


@lru_cache(maxsize=None)
def teuwen_terms(
    m: int, n: int, sign_pattern: SignPattern = "corrected", mass: int = 0
) -> tuple[tuple[Fraction, tuple[int, ...], tuple[int, ...]], ...]:
    """
    Exact coefficient table of

        d_t^m [e^{-mass t} T^L_t(x, y)] = e^{-mass t} b^n e^{-|z|^2}
            sum coef (ab)^{|j|} prod_i H_{l_i}(x_i) H_{j_i}(z_i),    z = b (y - a x),

    as (coef, l, j) triples. For mass = 0 the coefficients are

        (-1)^m (m; r) prod_i (-1)^{s_i + l_i} 2^{-s_i} S(r_i, s_i) C(s_i, l_i),   j_i = 2 s_i - l_i,

    summed over |r| = m, s <= r, l <= s. The "uncorrected" pattern replaces
    (-1)^{s_i + l_i} by (-1)^{s_i}; it is kept as a negative control.
    """
    if m < 0 or n < 1:
        raise ArgumentError(f"Invalid order/dimension ({m}, {n}).")
    if m > TEUWEN_MAX_ORDER:
        raise CapabilityError(f"Time order {m} exceeds the supported maximum {TEUWEN_MAX_ORDER}.")
    if sign_pattern not in ("corrected", "uncorrected"):
        raise ArgumentError(f"Unknown sign pattern '{sign_pattern}'.")

    table: dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction] = defaultdict(Fraction)
    orders = [(m, Fraction(1))] if mass == 0 else [
        (j, Fraction(math.comb(m, j) * (-mass) ** (m - j))) for j in range(m + 1)
    ]
    for order, outer in orders:
        for r in compositions(order, n):
            per_coordinate = []
            for ri in r:
                options = []
                for s in range(ri + 1):
                    stirling = stirling2(ri, s)
                    if stirling == 0:
                        continue
                    for l in range(s + 1):
                        sign = (-1) ** (s + l) if sign_pattern == "corrected" else (-1) ** s
                        options.append((sign * Fraction(stirling * math.comb(s, l), 2**s), l, 2 * s - l))
                per_coordinate.append(options)
            base = (-1) ** order * outer * multinomial(order, r.entries)
            for choice in itertools.product(*per_coordinate):
                coef = base
                for c, _, _ in choice:
                    coef *= c
                key = (tuple(c[1] for c in choice), tuple(c[2] for c in choice))
                table[key] += coef
    return tuple(sorted((coef, l, j) for (l, j), coef in table.items() if coef != 0))


def _mehler_series(
    left, right, t, m: int, k: MultiIndex, mass: int, sign_pattern: SignPattern = "corrected"
) -> np.ndarray:
    """
    d_left^k d_t^m [e^{-mass t} T^L_t(right, left)] with z = b (left - a right).
    The left point carries the space derivative.
    """
    n = left.shape[-1]
    a, b, _ = ou_coordinates(t)
    a_arr, b_arr = np.asarray(a), np.asarray(b)
    z = b_arr[..., None] * (left - a_arr[..., None] * right)
    terms = teuwen_terms(m, n, sign_pattern, mass)
    max_l = max(max(l) for _, l, _ in terms)
    max_j = max(max(j) for _, _, j in terms) + max(k)
    h_right = hermite_table(max_l, np.broadcast_to(right, z.shape))
    h_z = hermite_table(max_j, z)
    ab = a_arr * b_arr
    total = 0.0
    for coef, l, j in terms:
        term = float(coef) * ab ** sum(j)
        for i in range(n):
            term = term * h_right[l[i]][..., i] * h_z[j[i] + k[i]][..., i]
        total = total + term
    space_factor = np.prod([(-b_arr) ** ki for ki in k], axis=0)
    return np.exp(-mass * np.asarray(t)) * b_arr**n * np.exp(-np.sum(z * z, axis=-1)) * space_factor * total


def _check_orders(m: int, k: MultiIndex) -> None:
    if m < 0:
        raise ArgumentError(f"Time order must be non-negative, got {m}.")
    if m > TEUWEN_MAX_ORDER:
        raise CapabilityError(f"Time order {m} exceeds the supported maximum {TEUWEN_MAX_ORDER}.")
    if k.degree() > MAX_SPACE_DEGREE:
        raise CapabilityError(f"Space order {k} exceeds the supported degree {MAX_SPACE_DEGREE}.")


def dt_m_ou(x, y, t, m: int, sign_pattern: SignPattern = "corrected"):
    """d_t^m T^L_t(x, y) by the Stirling/binomial expansion."""
    x, y, scalar = _pair(x, y)
    _check_orders(m, MultiIndex.zero(x.shape[-1]))
    value = _mehler_series(y, x, t, m, MultiIndex.zero(x.shape[-1]), 0, sign_pattern)
    return _out(value, scalar and np.ndim(t) == 0)


def dxk_dtm_invgauss(x, y, t, m: int, k: MultiIndex | Sequence[int] | None = None):
    """
    d_x^k d_t^m T^A_t(x, y) = (-1)^m pi^{-n/2} e^{-nt} b^n sum_j C(m,j) n^{m-j} sum_{|r|=j} (j; r)
        prod_i sum_{s,l} (-1)^{s+l+k_i} 2^{-s} S(r_i,s) C(s,l) (ab)^{2s-l} b^{k_i} H_l(y_i) H~_{2s-l+k_i}(z_i)
    with z = b (x - a y).
    """
    x, y, scalar = _pair(x, y)
    n = x.shape[-1]
    k = MultiIndex.zero(n) if k is None else as_multiindex(k)
    if len(k) != n:
        raise ArgumentError(f"Space order {k} does not match dimension {n}.")
    _check_orders(m, k)
    value = np.pi ** (-0.5 * n) * _mehler_series(x, y, t, m, k, n)
    return _out(value, scalar and np.ndim(t) == 0)


def kernel_derivative(x, y, t, m: int = 0, k: MultiIndex | Sequence[int] | None = None, tag: KernelTag = "A"):
    """d_x^k d_t^m of the heat kernel named by `tag`, evaluated at (x, y)."""
    if tag == "A":
        return dxk_dtm_invgauss(x, y, t, m, k)
    if tag == "A_minus_I":
        x, y, scalar = _pair(x, y)
        n = x.shape[-1]
        k = MultiIndex.zero(n) if k is None else as_multiindex(k)
        _check_orders(m, k)
        value = np.pi ** (-0.5 * n) * _mehler_series(x, y, t, m, k, n - 1)
        return _out(value, scalar and np.ndim(t) == 0)
    if tag == "euclid":
        x, y, scalar = _pair(x, y)
        return _out(dxk_dtm_heat_euclid(x - y, t, m, k), scalar and np.ndim(t) == 0)
    raise ArgumentError(f"Unknown kernel tag '{tag}'.")


def evaluate_query(query: KernelQuery, tag: KernelTag = "A"):
    """Evaluate a KernelQuery pointwise. Fractional orders are only available spectrally."""
    if query.beta is not None:
        raise CapabilityError("Pointwise kernels of fractional time order are not provided; use the spectral path.")
    return kernel_derivative(query.x, query.y, query.t, query.time_order, query.space_order, tag)


# ---------------------------------------------------------------------------
# Poisson kernels by subordination
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubordinationRule:
    """
    Quadrature for P_t = pi^{-1/2} int_0^inf e^{-s} s^{-1/2} T_{t^2/4s} ds.

    log_trapezoid: trapezoid in u = log(tau), tau = t^2/4s, which also gives
        d_t^m P_t = (-1)^m pi^{-1/2} int (2 sqrt(tau))^{-m} H_{m+1}(w) e^{-w^2} T_tau du / 2,
        w = t / (2 sqrt(tau)).
    gauss_hermite: s = v^2 folded to the full line, 64-point Gauss-Hermite;
        only m = 0.
    """
    method: Literal["log_trapezoid", "gauss_hermite"] = "log_trapezoid"
    step: float = field(default_factory=lambda: settings.subordination_step)
    points: int = 64

    def log_tau_nodes(self, t: float, tag: KernelTag, n: int) -> np.ndarray:
        center = math.log(t * t / 4.0)
        lower = center - 7.0
        if tag == "A" or (tag == "A_minus_I" and n > 1):
            upper = max(math.log(max(50.0, 20.0 * t)), center + 3.0)
        else:
            upper = max(60.0, center + 40.0)
        count = int(math.ceil((upper - lower) / self.step)) + 1
        return lower + self.step * np.arange(count)


def subordination_weights(
    t: float, m: int, rule: SubordinationRule, tag: KernelTag, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """
    Times tau_j and weights omega_j with d_t^m P_t ~ sum_j omega_j T_{tau_j}
    for the heat semigroup named by `tag`.
    """
    if t <= 0:
        raise ArgumentError(f"Poisson time must be positive, got {t}.")
    if rule.method == "gauss_hermite":
        if m != 0:
            raise CapabilityError("The folded Gauss-Hermite rule only supports m = 0.")
        v, w = hermgauss(rule.points)
        return t * t / (4.0 * v * v), w / math.sqrt(math.pi)
    tau = np.exp(rule.log_tau_nodes(t, tag, n))
    return tau, subordination_density(t, tau, m) * rule.step


def subordination_density(t, tau, m: int) -> np.ndarray:
    """
    Density in u = log(tau) of d_t^m P_t against T_tau:
    (-1)^m pi^{-1/2} (2 sqrt(tau))^{-m} H_{m+1}(w) e^{-w^2} / 2, w = t / (2 sqrt(tau)).
    `t` and `tau` broadcast.
    """
    t = np.asarray(t, dtype=float)
    tau = np.asarray(tau, dtype=float)
    w_arg = t / (2.0 * np.sqrt(tau))
    h = hermite_table(m + 1, w_arg)[m + 1]
    return (-1) ** m / math.sqrt(math.pi) * 0.5 * (2.0 * np.sqrt(tau)) ** (-m) * h * np.exp(-w_arg * w_arg)


def subordination_matrix(times, m: int, step: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """
    One shared log-tau grid for many Poisson times: returns tau (S,) and
    weights (T, S) with d_t^m P_t ~ sum_j weights[t, j] T_{tau_j}.
    The grid runs from log(t_min^2 / 4) - 7 to 60, wide enough for every tag.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times <= 0):
        raise ArgumentError("Poisson times must be positive.")
    step = settings.subordination_step if step is None else step
    lower = math.log(float(times.min()) ** 2 / 4.0) - 7.0
    upper = max(60.0, math.log(float(times.max()) ** 2 / 4.0) + 40.0)
    count = int(math.ceil((upper - lower) / step)) + 1
    tau = np.exp(lower + step * np.arange(count))
    return tau, subordination_density(times[:, None], tau[None, :], m) * step


def dxk_dtm_poisson(x, y, t: float, m: int = 0, k: MultiIndex | Sequence[int] | None = None,
                    tag: KernelTag = "A", rule: SubordinationRule | None = None):
    """d_x^k d_t^m P_t(x, y) for the Poisson semigroup subordinated to `tag`."""
    x, y, scalar = _pair(x, y)
    rule = rule or SubordinationRule()
    tau, weights = subordination_weights(float(t), m, rule, tag, x.shape[-1])
    shape = np.broadcast_shapes(x.shape[:-1], y.shape[:-1])
    tau_b = tau.reshape((-1,) + (1,) * len(shape))
    values = kernel_derivative(x[None, ...], y[None, ...], tau_b, 0, k, tag)
    value = np.tensordot(weights, np.asarray(values), axes=(0, 0))
    return _out(value, scalar)


def poisson_kernel(x, y, t: float, operator_tag: KernelTag = "A", rule: SubordinationRule | None = None):
    """P_t(x, y) for operator_tag in {A, A_minus_I, euclid}."""
    return dxk_dtm_poisson(x, y, t, 0, None, operator_tag, rule)


# ---------------------------------------------------------------------------
# Euclidean Poisson gradient kernel
# ---------------------------------------------------------------------------

def euclid_poisson_grad_kernel(x, t: float, i: int):
    """
    K_t^i(x) = c_n x_i t^2 (t^2 + 2|x|^2)^{-(n+3)/2},
    c_n = -2^{n/2+1} (n+1) pi^{-(n+1)/2} Gamma((n+1)/2). i is 1-based.
    """
    if t <= 0:
        raise ArgumentError(f"Poisson time must be positive, got {t}.")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim <= 1
    x = np.atleast_1d(x)
    n = x.shape[-1]
    if not 1 <= i <= n:
        raise ArgumentError(f"Coordinate label {i} out of range 1..{n}.")
    c_n = -(2.0 ** (0.5 * n + 1)) * (n + 1) * math.pi ** (-0.5 * (n + 1)) * math.gamma(0.5 * (n + 1))
    value = c_n * x[..., i - 1] * t * t * (t * t + 2.0 * np.sum(x * x, axis=-1)) ** (-0.5 * (n + 3))
    return _out(value, scalar)


@dataclass(frozen=True, eq=False)
class FourierProfile:
    decay: float
    amplitude: float
    max_deviation: float
    frequencies: np.ndarray
    modulus: np.ndarray


def fourier_profile(t: float = 1.0, length: float = 200.0, points: int = 2**16,
                    window: tuple[float, float] = (0.25, 8.0)) -> FourierProfile:
    """
    Discrete Fourier transform of K_t^1 in one dimension, fitted on `window`
    to |K^(xi)| = C |xi| e^{-c t |xi|}. Returns c, C and the largest relative
    deviation of the data from the fitted profile.
    """
    dx = length / points
    grid = (np.arange(points) - points // 2) * dx
    samples = euclid_poisson_grad_kernel(grid[:, None], t, 1)
    spectrum = dx * np.fft.fftshift(np.fft.fft(np.fft.ifftshift(samples)))
    xi = 2.0 * np.pi * np.fft.fftshift(np.fft.fftfreq(points, d=dx))
    modulus = np.abs(spectrum)
    mask = (np.abs(xi) >= window[0]) & (np.abs(xi) <= window[1])
    absxi = np.abs(xi[mask])
    design = np.stack([np.ones_like(absxi), -t * absxi], axis=-1)
    coef, *_ = np.linalg.lstsq(design, np.log(modulus[mask] / absxi), rcond=None)
    amplitude, decay = math.exp(coef[0]), float(coef[1])
    fitted = amplitude * absxi * np.exp(-decay * t * absxi)
    deviation = float(np.max(np.abs(modulus[mask] / fitted - 1.0)))
    return FourierProfile(decay, amplitude, deviation, xi[mask], modulus[mask])


# ---------------------------------------------------------------------------
# Semigroup composition
# ---------------------------------------------------------------------------

def _gaussian_in_middle(x, z, t: float, s: float, tag: KernelTag) -> tuple[np.ndarray, float]:
    """Center and precision of the Gaussian factor of T_t(x, y) T_s(y, z) in y."""
    if tag == "euclid":
        p_t, p_s = 1.0 / (2.0 * t), 1.0 / (2.0 * s)
        return (p_t * x + p_s * z) / (p_t + p_s), p_t + p_s
    a_t, b_t, _ = ou_coordinates(t)
    a_s, b_s, _ = ou_coordinates(s)
    precision = b_t * b_t * a_t * a_t + b_s * b_s
    center = (b_t * b_t * a_t * x + b_s * b_s * a_s * z) / precision
    return center, precision


def composition_check(x, z, t: float, s: float, m1: int = 0, m2: int = 0,
                      tag: KernelTag = "A", points: int = 40) -> tuple[float, float]:
    """
    Both sides of d_t^{m1} d_s^{m2} T_{t+s}(x, z) = int d_s^{m2} T_s(y, z) d_t^{m1} T_t(x, y) dy.
    Returns (closed form, quadrature).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    n = x.shape[-1]
    lhs = float(kernel_derivative(x, z, t + s, m1 + m2, None, tag))
    center, precision = _gaussian_in_middle(x, z, t, s, tag)
    grid = gauss_hermite_grid(points, n, shift=center, scale=1.0 / math.sqrt(precision), measure="lebesgue")

    def integrand(y: np.ndarray) -> np.ndarray:
        return (np.asarray(kernel_derivative(y, z[None, :], s, m2, None, tag))
                * np.asarray(kernel_derivative(x[None, :], y, t, m1, None, tag)))

    return lhs, float(integrate(grid, integrand))
