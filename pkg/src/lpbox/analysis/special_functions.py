"""
Hermite polynomials, Gaussian-weighted Hermite functions, Stirling numbers
and multi-index combinatorics.

Conventions:
    H_k(u)        physicists' Hermite polynomial, H_{k+1} = 2uH_k - 2kH_{k-1}
    H~_k(x)       e^{-|x|^2} prod_i H_{k_i}(x_i)   (plain tensor product, no global sign)
    ||H~_k||^2    prod_i pi 2^{k_i} k_i!           in L^2(gamma_-1)
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.special import gammaln

from lpbox.core.config import settings
from lpbox.core.exceptions import ArgumentError, CapabilityError

logger = logging.getLogger(__name__)

SPLIT_DEGREE = 30
_RESCALE_ABOVE = 1e100
STIRLING_MAX_N = 20


@dataclass(frozen=True)
class MultiIndex:
    """
    k = (k_1, ..., k_n) in N^n. Ordered component-wise, so `<=` is a
    partial order: (1, 0) and (0, 1) are incomparable.
    """
    entries: tuple[int, ...]

    def __post_init__(self):
        entries = tuple(int(v) for v in self.entries)
        if not entries:
            raise ArgumentError("A multi-index needs at least one entry.")
        if any(v < 0 for v in entries):
            raise ArgumentError(f"Multi-index entries must be non-negative, got {entries}.")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def zero(cls, n: int) -> MultiIndex:
        return cls((0,) * n)

    @classmethod
    def unit(cls, n: int, i: int) -> MultiIndex:
        """e_i with a 0-based coordinate i."""
        if not 0 <= i < n:
            raise ArgumentError(f"Coordinate {i} out of range for dimension {n}.")
        return cls(tuple(1 if j == i else 0 for j in range(n)))

    @property
    def dimension(self) -> int:
        return len(self.entries)

    def degree(self) -> int:
        return sum(self.entries)

    def shifted(self, i: int, by: int = 1) -> MultiIndex:
        """k + by*e_i, 0-based i."""
        values = list(self.entries)
        values[i] += by
        return MultiIndex(tuple(values))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[int]:
        return iter(self.entries)

    def __getitem__(self, i: int) -> int:
        return self.entries[i]

    def __add__(self, other: MultiIndex) -> MultiIndex:
        _check_same_dimension(self, other)
        return MultiIndex(tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __le__(self, other: MultiIndex) -> bool:
        _check_same_dimension(self, other)
        return all(a <= b for a, b in zip(self.entries, other.entries))

    def __lt__(self, other: MultiIndex) -> bool:
        return self <= other and self != other

    def __ge__(self, other: MultiIndex) -> bool:
        return other <= self

    def __gt__(self, other: MultiIndex) -> bool:
        return other < self

    def __str__(self) -> str:
        return "(" + ",".join(str(v) for v in self.entries) + ")"


def _check_same_dimension(a: MultiIndex, b: MultiIndex) -> None:
    if len(a) != len(b):
        raise ArgumentError(f"Multi-index dimension mismatch: {a} vs {b}.")


def as_multiindex(k: MultiIndex | Sequence[int] | int) -> MultiIndex:
    if isinstance(k, MultiIndex):
        return k
    if isinstance(k, (int, np.integer)):
        return MultiIndex((int(k),))
    return MultiIndex(tuple(k))


@dataclass(frozen=True)
class HermiteValue:
    """A value stored as value * exp(log_scale) so that high degrees do not overflow."""
    value: np.ndarray | float
    log_scale: np.ndarray | float = 0.0

    def reconstruct(self) -> np.ndarray | float:
        return self.value * np.exp(self.log_scale)


def _check_degree(k: int) -> None:
    if k < 0:
        raise ArgumentError(f"Hermite degree must be non-negative, got {k}.")
    if k > settings.max_hermite_degree:
        raise CapabilityError(
            f"Hermite degree {k} exceeds the configured maximum {settings.max_hermite_degree}."
        )


def _unwrap(result: np.ndarray, scalar: bool):
    return float(result) if scalar else result


def hermite(k: int, u):
    """H_k(u) by the three-term recurrence; vectorized over u."""
    _check_degree(k)
    scalar = np.ndim(u) == 0
    u = np.asarray(u, dtype=float)
    h_prev = np.ones_like(u)
    if k == 0:
        return _unwrap(h_prev, scalar)
    h = 2.0 * u
    for j in range(1, k):
        h_prev, h = h, 2.0 * u * h - 2.0 * j * h_prev
    return _unwrap(h, scalar)


def hermite_table(max_degree: int, u) -> np.ndarray:
    """Array of shape (max_degree + 1, *u.shape) holding H_0(u), ..., H_K(u)."""
    _check_degree(max_degree)
    u = np.asarray(u, dtype=float)
    table = np.empty((max_degree + 1,) + u.shape)
    table[0] = 1.0
    if max_degree >= 1:
        table[1] = 2.0 * u
    for j in range(1, max_degree):
        table[j + 1] = 2.0 * u * table[j] - 2.0 * j * table[j - 1]
    return table


def hermite_split(k: int, u) -> HermiteValue:
    """
    H_k(u) as a HermiteValue. The recurrence is renormalized whenever the
    running value leaves [-1e100, 1e100].
    """
    _check_degree(k)
    u = np.asarray(u, dtype=float)
    log_scale = np.zeros_like(u)
    h_prev = np.ones_like(u)
    if k == 0:
        return HermiteValue(h_prev, log_scale)
    h = 2.0 * u
    for j in range(1, k):
        h_prev, h = h, 2.0 * u * h - 2.0 * j * h_prev
        big = np.abs(h) > _RESCALE_ABOVE
        if np.any(big):
            factor = np.where(big, np.abs(h), 1.0)
            h = h / factor
            h_prev = h_prev / factor
            log_scale = log_scale + np.log(factor)
    return HermiteValue(h, log_scale)


def hermite_tilde(k: MultiIndex | Sequence[int] | int, x):
    """
    H~_k(x) = e^{-|x|^2} prod_i H_{k_i}(x_i) for x of shape (..., n).
    Degrees above 30 go through the split representation.
    """
    k = as_multiindex(k)
    x = np.asarray(x, dtype=float)
    scalar = x.ndim <= 1
    x = np.atleast_1d(x)
    if x.shape[-1] != len(k):
        raise ArgumentError(f"Point of dimension {x.shape[-1]} does not match multi-index {k}.")
    sq = np.sum(x * x, axis=-1)

    if k.degree() <= SPLIT_DEGREE:
        value = np.exp(-sq)
        for i, ki in enumerate(k):
            if ki:
                value = value * hermite(ki, x[..., i])
        return _unwrap(value, scalar)

    mantissa = np.ones(x.shape[:-1])
    log_scale = -sq
    for i, ki in enumerate(k):
        part = hermite_split(ki, x[..., i])
        mantissa = mantissa * part.value
        log_scale = log_scale + part.log_scale
    return _unwrap(HermiteValue(mantissa, log_scale).reconstruct(), scalar)


def log_hermite_tilde_sq_norm(k: MultiIndex | Sequence[int] | int) -> float:
    k = as_multiindex(k)
    return float(sum(math.log(math.pi) + ki * math.log(2.0) + gammaln(ki + 1) for ki in k))


def hermite_tilde_l2_norm(k: MultiIndex | Sequence[int] | int) -> float:
    """||H~_k||_{L^2(gamma_-1)} = prod_i sqrt(pi 2^{k_i} k_i!)."""
    return math.exp(0.5 * log_hermite_tilde_sq_norm(k))


def stirling2(N: int, l: int) -> int:
    """Stirling number of the second kind S(N, l); zero when l > N."""
    if N < 0 or l < 0:
        raise ArgumentError(f"Stirling arguments must be non-negative, got ({N}, {l}).")
    if N > STIRLING_MAX_N:
        raise CapabilityError(f"Stirling numbers are tabulated up to N = {STIRLING_MAX_N}, got {N}.")
    return _stirling2(N, l)


@lru_cache(maxsize=None)
def _stirling2(N: int, l: int) -> int:
    if l > N:
        return 0
    if N == 0:
        return 1
    if l == 0:
        return 0
    return l * _stirling2(N - 1, l) + _stirling2(N - 1, l - 1)


def multiindex_range(bound: MultiIndex | Sequence[int]) -> list[MultiIndex]:
    """All s with 0 <= s_i <= bound_i, lexicographic."""
    bound = as_multiindex(bound)
    return [MultiIndex(entries) for entries in itertools.product(*(range(b + 1) for b in bound))]


def compositions(total: int, n: int) -> list[MultiIndex]:
    """All r in N^n with |r| = total, lexicographic."""
    if total < 0 or n < 1:
        raise ArgumentError(f"Invalid composition request ({total}, {n}).")
    return [MultiIndex(r) for r in _compositions(total, n)]


def _compositions(total: int, n: int) -> Iterable[tuple[int, ...]]:
    if n == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, n - 1):
            yield (first,) + rest


def multiindices_up_to_degree(n: int, max_degree: int) -> list[MultiIndex]:
    """All k in N^n with |k| <= max_degree, grouped by degree."""
    out: list[MultiIndex] = []
    for d in range(max_degree + 1):
        out.extend(compositions(d, n))
    return out


def multinomial(total: int, r: Sequence[int]) -> int:
    """total! / prod r_i!"""
    if sum(r) != total:
        raise ArgumentError(f"Parts {tuple(r)} do not sum to {total}.")
    result = math.factorial(total)
    for part in r:
        result //= math.factorial(part)
    return result
