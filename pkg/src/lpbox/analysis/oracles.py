"""
Independent reference computations.

- finite differences with a Ridders/Richardson tableau, in double precision
  or in mpmath arithmetic
- the Weyl fractional derivative as a numerical integral
- exact differentiation of the Ornstein-Uhlenbeck kernel with sympy, and the
  same polynomial obtained by expanding the Stirling/binomial series term by term
- closed-form Gamma integrals
- a recorder that pins oracle values into a fixtures document
"""

from __future__ import annotations

import json
import logging
import math
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable, Literal

import numpy as np
import sympy as sp
from mpmath.ctx_mp import MPContext
from scipy.special import gammaln

from lpbox.analysis.kernels import SignPattern, ou_coordinates, teuwen_terms
from lpbox.core.exceptions import ArgumentError, CapabilityError, IntegrabilityError

logger = logging.getLogger(__name__)

SYMBOLIC_MAX_ORDER = 3
SYMBOLIC_MAX_DIMENSION = 2
EXTENDED_DIGITS = 40


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FDScheme:
    """
    Central differences of accuracy `order` (error in even powers of h),
    refined by halving the step `richardson_levels` times.

    With `digits` set, stencils and the tableau run in a private mpmath
    context at that working precision; F then receives that context's mpf
    numbers and has to compute with `t.context`.
    """
    order: int = 2
    base_step: float = 0.1
    richardson_levels: int = 10
    digits: int | None = None

    def __post_init__(self):
        if self.order != 2:
            raise ArgumentError("Only second-order central stencils are supported.")
        if self.base_step <= 0 or self.richardson_levels < 1:
            raise ArgumentError("FDScheme needs a positive step and at least one level.")
        if self.digits is not None and self.digits < 16:
            raise ArgumentError(f"Extended precision needs at least 16 digits, got {self.digits}.")

    @classmethod
    def for_time(cls, t, m: int, levels: int = 10, digits: int | None = None) -> FDScheme:
        """A step whose coarsest stencil t +- m h / 2 stays within t +- t/8."""
        return cls(base_step=min(0.1, 0.25 * float(np.min(t)) / max(m, 1)), richardson_levels=levels, digits=digits)

    @property
    def smallest_step(self) -> float:
        return self.base_step / 2 ** (self.richardson_levels - 1)

    def step_floor(self, t) -> float:
        """Steps below this lose every digit of t + h to rounding."""
        unit = 1e-12 if self.digits is None else 10.0 ** (4 - self.digits)
        return unit * max(1.0, float(np.max(np.abs(t))))


@dataclass(frozen=True)
class FDResult:
    value: Any
    error: float


def _central(F: Callable, t, m: int, h):
    total = 0.0
    for j in range(m + 1):
        total = total + (-1) ** j * math.comb(m, j) * np.asarray(F(t + (0.5 * m - j) * h), dtype=float)
    return total / h**m


def _central_mp(F: Callable, t, m: int, h):
    total = t * 0
    for j in range(m + 1):
        total += (-1) ** j * math.comb(m, j) * F(t + (0.5 * m - j) * h)
    return total / h**m


_contexts = threading.local()


def _mp_context(digits: int) -> MPContext:
    """One mpmath context per thread and precision; mpmath precision is context state."""
    cache = _contexts.__dict__.setdefault("by_digits", {})
    if digits not in cache:
        ctx = MPContext()
        ctx.dps = digits
        cache[digits] = ctx
    return cache[digits]


def _ridders(stencil: Callable[[Any], Any], base_step, levels: int,
             magnitude: Callable[[Any], float]) -> tuple[Any, float]:
    """
    Richardson tableau over steps base_step / 2^i. Every entry is scored by
    its distance to the two entries it was built from; the best-scored entry
    over the whole tableau is returned with its score.
    """
    h = base_step
    previous = [stencil(h)]
    best, err = previous[0], math.inf
    for _ in range(1, levels):
        h = h / 2
        row = [stencil(h)]
        fac = 4.0
        for j in range(1, len(previous) + 1):
            row.append((row[j - 1] * fac - previous[j - 1]) / (fac - 1.0))
            fac *= 4.0
            errt = max(magnitude(row[j] - row[j - 1]), magnitude(row[j] - previous[j - 1]))
            if errt <= err:
                err, best = errt, row[j]
        previous = row
    return best, err


def fd_time_derivative(F: Callable, t, m: int, scheme: FDScheme | None = None) -> FDResult:
    """m-th derivative of F at t by central differences and Ridders extrapolation."""
    if m < 0:
        raise ArgumentError(f"Derivative order must be non-negative, got {m}.")
    if m == 0:
        return FDResult(F(t), 0.0)
    scheme = scheme or FDScheme.for_time(t, m)
    if np.any(np.asarray(t, dtype=float) - m * scheme.base_step <= 0):
        raise ArgumentError(f"Stencil leaves t > 0: t = {t}, m = {m}, step = {scheme.base_step}.")
    if scheme.smallest_step < scheme.step_floor(t):
        raise CapabilityError(f"Finite-difference step underflows: {scheme.smallest_step:.3e}.")

    if scheme.digits is None:
        best, err = _ridders(
            lambda h: _central(F, t, m, h),
            scheme.base_step,
            scheme.richardson_levels,
            lambda d: float(np.max(np.abs(d))),
        )
        return FDResult(float(best) if np.ndim(best) == 0 else best, err)

    ctx = _mp_context(scheme.digits)
    t_mp = ctx.mpf(float(t))
    best, err = _ridders(
        lambda h: _central_mp(F, t_mp, m, h),
        ctx.mpf(scheme.base_step),
        scheme.richardson_levels,
        lambda d: float(abs(d)),
    )
    return FDResult(float(best), err)


def mehler_ou_extended(x, y, t, ctx: MPContext | None = None) -> Any:
    """T^L_t(x, y) in mpmath arithmetic, in the context of t when t is an mpf; scalar t only."""
    ctx = ctx or getattr(t, "context", None) or _mp_context(EXTENDED_DIGITS)
    xs = [ctx.mpf(float(v)) for v in np.atleast_1d(x)]
    ys = [ctx.mpf(float(v)) for v in np.atleast_1d(y)]
    t = ctx.mpf(t)
    a = ctx.exp(-t)
    one_minus = -ctx.expm1(-2 * t)
    distance = ctx.fsum((yi - a * xi) ** 2 for xi, yi in zip(xs, ys))
    return one_minus ** (-ctx.mpf(len(xs)) / 2) * ctx.exp(-distance / one_minus)



# ---------------------------------------------------------------------------
# Weyl fractional derivative
# ---------------------------------------------------------------------------

_WEYL_LOWER_CUT = 1e-5


def weyl_integral(
    F: Callable,
    t: float,
    alpha: float,
    signed: bool = False,
    derivative: Callable[[np.ndarray, int], np.ndarray] | None = None,
    panel_width: float = 0.5,
    points_per_panel: int = 16,
) -> float:
    """
    Weyl derivative of order alpha at t:

        (1/Gamma(m - alpha)) int_t^inf F^{(m)}(u) (u - t)^{m - alpha - 1} du,  m = floor(alpha) + 1.

    The integral is taken in u = t + e^v. Below e^v = 1e-5 the derivative is
    replaced by its first-order Taylor polynomial and integrated exactly.
    The result is multiplied by (-1)^m so that e^{-lam u} maps to
    lam^alpha e^{-lam t}; pass signed=True for the raw integral.
    """
    if alpha <= 0:
        raise ArgumentError(f"Weyl order must be positive, got {alpha}.")
    m = math.floor(alpha) + 1
    nu = m - alpha

    if derivative is None:
        def derivative(u: np.ndarray, order: int) -> np.ndarray:
            return np.asarray(fd_time_derivative(F, u, order, FDScheme.for_time(u, order)).value)

    g0 = float(derivative(np.array([t]), m)[0])
    g1 = float(derivative(np.array([t]), m + 1)[0])
    s_c = _WEYL_LOWER_CUT
    lower = g0 * s_c**nu / nu + g1 * s_c ** (nu + 1) / (nu + 1)

    scale = max(abs(g0), np.finfo(float).tiny)
    s_max = 1.0
    while True:
        tail = abs(float(derivative(np.array([t + s_max]), m)[0])) * s_max**nu
        if tail < 1e-17 * scale:
            break
        s_max *= 2.0
        if s_max > 1e6:
            raise IntegrabilityError("Weyl integrand does not decay", location=[t, t + s_max])

    v_lo, v_hi = math.log(s_c), math.log(s_max)
    panels = max(1, math.ceil((v_hi - v_lo) / panel_width))
    x, w = np.polynomial.legendre.leggauss(points_per_panel)
    edges = np.linspace(v_lo, v_hi, panels + 1)
    half = 0.5 * np.diff(edges)
    v = (edges[:-1, None] + half[:, None] * (x + 1.0)).ravel()
    wv = (half[:, None] * w).ravel()
    body = float(np.sum(wv * np.asarray(derivative(t + np.exp(v), m)) * np.exp(nu * v)))

    raw = (lower + body) / math.exp(gammaln(nu))
    return raw if signed else (-1) ** m * raw


# ---------------------------------------------------------------------------
# Gamma integrals
# ---------------------------------------------------------------------------

def gamma_integral(a: float, lam: float) -> float:
    """int_0^inf t^a e^{-lam t} dt/t = Gamma(a) lam^{-a}."""
    if a <= 0 or lam <= 0:
        raise ArgumentError(f"gamma_integral needs a, lam > 0, got ({a}, {lam}).")
    return math.exp(gammaln(a) - a * math.log(lam))




# ---------------------------------------------------------------------------
# Exact polynomial tables for the Ornstein-Uhlenbeck kernel
#
# Generators: x_1..x_n, y_1..y_n, a = e^{-t}, b = (1 - e^{-2t})^{-1/2}.
# T^L_t(x, y) = b^n exp(-b^2 |y - a x|^2); derivatives are P * exp(...) with
# P in Q[x, y, a, b] reduced modulo a^2 b^2 = b^2 - 1.
# ---------------------------------------------------------------------------

Table = dict[tuple[int, ...], sp.Rational]


def kernel_ring(n: int) -> tuple[sp.Symbol, ...]:
    """Generators (x_1..x_n, y_1..y_n, a, b) of the coefficient tables."""
    xs = sp.symbols(f"x1:{n + 1}")
    ys = sp.symbols(f"y1:{n + 1}")
    a, b = sp.symbols("a b", positive=True)
    return (*xs, *ys, a, b)


def normal_form(expr: sp.Expr, gens: tuple[sp.Symbol, ...]) -> sp.Poly:
    """Remainder modulo a^2 b^2 - b^2 + 1: no monomial keeps both a^2 and b^2."""
    a, b = gens[-2:]
    _, remainder = sp.reduced(sp.expand(expr), [a**2 * b**2 - b**2 + 1], *gens, order="lex")
    return sp.Poly(remainder, *gens, domain=sp.QQ)


def _time_derivative(expr: sp.Expr, a: sp.Symbol, b: sp.Symbol) -> sp.Expr:
    # da/dt = -a, db/dt = -a^2 b^3
    return -a * sp.diff(expr, a) - a**2 * b**3 * sp.diff(expr, b)


def _check_symbolic_caps(m: int, n: int) -> None:
    if m < 0 or n < 1:
        raise ArgumentError(f"Invalid symbolic request m = {m}, n = {n}.")
    if m > SYMBOLIC_MAX_ORDER or n > SYMBOLIC_MAX_DIMENSION:
        raise CapabilityError(
            f"Symbolic differentiation supports m <= {SYMBOLIC_MAX_ORDER}, n <= {SYMBOLIC_MAX_DIMENSION}; "
            f"got m = {m}, n = {n}."
        )


def _as_table(poly: sp.Poly) -> Table:
    return {mono: sp.Rational(c) for mono, c in poly.as_dict().items() if c != 0}


@lru_cache(maxsize=None)
def _symbolic_cached(m: int, n: int) -> tuple[tuple[tuple[int, ...], sp.Rational], ...]:
    gens = kernel_ring(n)
    xs, ys, (a, b) = gens[:n], gens[n:2 * n], gens[2 * n:]
    exponent = -b**2 * sum((yi - a * xi) ** 2 for xi, yi in zip(xs, ys))
    d_exponent = _time_derivative(exponent, a, b)
    p = normal_form(b**n, gens)
    for _ in range(m):
        expr = p.as_expr()
        p = normal_form(_time_derivative(expr, a, b) + expr * d_exponent, gens)
    return tuple(sorted(_as_table(p).items()))


def symbolic_kernel_derivative(m: int, n: int) -> Table:
    """
    Canonical coefficient table of P_m, where d^m/dt^m T^L_t(x, y) = P_m exp(-b^2 |y - a x|^2),
    obtained by repeated exact product/chain-rule differentiation.
    """
    _check_symbolic_caps(m, n)
    return dict(_symbolic_cached(m, n))


def teuwen_expansion_table(m: int, n: int, sign_pattern: SignPattern = "corrected") -> Table:
    """
    The Stirling/binomial series for d^m/dt^m T^L_t(x, y) expanded over the
    same generators as `symbolic_kernel_derivative`, with z_i = b y_i - a b x_i.
    """
    _check_symbolic_caps(m, n)
    gens = kernel_ring(n)
    xs, ys, (a, b) = gens[:n], gens[n:2 * n], gens[2 * n:]
    total = sp.Integer(0)
    for coef, l_idx, j_idx in teuwen_terms(m, n, sign_pattern):
        term = sp.Rational(coef.numerator, coef.denominator) * b**n * (a * b) ** sum(j_idx)
        for i in range(n):
            term *= sp.hermite(l_idx[i], xs[i]) * sp.hermite(j_idx[i], b * ys[i] - a * b * xs[i])
        total += term
    return _as_table(normal_form(total, gens))


def table_mismatches(left: Table, right: Table) -> list[tuple[tuple[int, ...], sp.Rational, sp.Rational]]:
    """Monomials whose coefficients differ, with (left, right) values."""
    zero = sp.Integer(0)
    out = []
    for mono in sorted(set(left) | set(right)):
        lv, rv = left.get(mono, zero), right.get(mono, zero)
        if lv != rv:
            out.append((mono, lv, rv))
    return out


def evaluate_table(table: Table, x, y, t: float) -> float:
    """Numerical value of P exp(-b^2 |y - a x|^2) at one point."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    a, b, _ = ou_coordinates(t)
    values = np.concatenate([x, y, [a, b]])
    poly = 0.0
    for mono, c in table.items():
        poly += float(c) * float(np.prod(values ** np.array(mono)))
    return poly * math.exp(-b * b * float(np.sum((y - a * x) ** 2)))


# ---------------------------------------------------------------------------
# Fixture pins
# ---------------------------------------------------------------------------

@dataclass
class FixtureRecorder:
    """Collects oracle values keyed by (operation, inputs)."""
    records: list[dict[str, Any]] = field(default_factory=list)

    def record(self, operation: str, inputs: dict[str, Any], value: float) -> float:
        self.records.append({"operation": operation, "inputs": inputs, "value": float(value)})
        return value

    def to_document(self) -> list[dict[str, Any]]:
        return sorted(self.records, key=lambda r: (r["operation"], json.dumps(r["inputs"], sort_keys=True)))


def load_fixtures(path: str | Path) -> list[dict[str, Any]]:
    with open(path, "r", encoding="utf-8") as f:
        document = json.load(f)
    if not isinstance(document, list):
        raise ArgumentError(f"Fixture file {path} does not hold a list of records.")
    return document


def compare_fixtures(
    document: list[dict[str, Any]],
    evaluate: Callable[[str, dict[str, Any]], float],
    rel_tol: float = 1e-9,
    mode: Literal["relative", "absolute"] = "relative",
) -> list[dict[str, Any]]:
    """Re-evaluate every pinned record; return those that drifted."""
    drifted = []
    for record in document:
        fresh = float(evaluate(record["operation"], record["inputs"]))
        pinned = float(record["value"])
        scale = max(abs(pinned), 1e-300) if mode == "relative" else 1.0
        if abs(fresh - pinned) > rel_tol * scale:
            drifted.append({**record, "fresh": fresh})
    return drifted
