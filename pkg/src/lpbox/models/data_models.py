"""
Defines the Pydantic data models for the application.

These models validate experiment configuration, carry results between the
analysis library and the report writer, and fix the serialized shape of
fixtures (Hermite expansions) and reports (bound records, assertions).
"""

import math
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

ExperimentName = Literal[
    "teuwen-verify",
    "gfun-constants",
    "weak11-growth",
    "bound-sample",
    "spectral-identities",
]

CorpusName = Literal["eigenfunctions", "random", "super_gaussian", "vector", "mixed"]

SemigroupName = Literal["heat_A", "poisson_A", "poisson_A_minus_I", "heat_euclid", "poisson_euclid"]

BoundId = Literal["acot_deriv", "a2", "b", "c", "diferencia", "maximal_kernel"]

ALL_BOUNDS: tuple[str, ...] = ("acot_deriv", "a2", "b", "c", "diferencia", "maximal_kernel")


class ExpansionTerm(BaseModel):
    """One term of a serialized Hermite expansion."""
    k: List[int] = Field(..., min_length=1)
    c: List[float] = Field(..., min_length=1)


class HermiteExpansionDocument(BaseModel):
    """
    JSON document form of a HermiteExpansion: {n, m, terms: [{k, c}]}.
    Field order is fixed as declared.
    """
    n: int = Field(..., ge=1)
    m: int = Field(default=1, ge=1)
    terms: List[ExpansionTerm] = Field(default_factory=list)

    @model_validator(mode='after')
    def check_term_shapes(self) -> 'HermiteExpansionDocument':
        for term in self.terms:
            if len(term.k) != self.n:
                raise ValueError(f"Term index {term.k} does not have {self.n} entries.")
            if len(term.c) != self.m:
                raise ValueError(f"Term coefficient {term.c} does not have {self.m} components.")
            if any(v < 0 for v in term.k):
                raise ValueError(f"Term index {term.k} has negative entries.")
        return self


class BoundReport(BaseModel):
    """
    Sampled-inequality verification record.

    The fitted constant is the maximum sampled ratio lhs/rhs, so
    `violations_at_fitted` is zero by construction.
    """
    bound_id: str
    samples: int = Field(..., ge=1)
    fitted_constant: float
    half_sample_constant: float
    growth: float = Field(description="Relative change of the fitted constant from N/2 to N samples.")
    stable: bool
    violations_at_fitted: int = 0
    non_finite: int = 0
    max_ratio_location: Dict[str, Any] = Field(default_factory=dict)
    parameters: Dict[str, Any] = Field(default_factory=dict)

    def to_row(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {"bound_id": self.bound_id}
        row.update({f"param_{key}": value for key, value in sorted(self.parameters.items())})
        row.update({
            "samples": self.samples,
            "fitted_constant": self.fitted_constant,
            "half_sample_constant": self.half_sample_constant,
            "growth": self.growth,
            "stable": self.stable,
            "violations_at_fitted": self.violations_at_fitted,
            "non_finite": self.non_finite,
            "worst": ";".join(f"{key}={value}" for key, value in self.max_ratio_location.items()),
        })
        return row


class AssertionRecord(BaseModel):
    name: str
    passed: bool
    observed: Optional[float] = None
    target: Optional[float] = None
    detail: str = ""


class ExperimentConfig(BaseModel):
    """
    Validated experiment configuration. Built from the flattened YAML
    sections of a config file plus CLI overrides.
    """
    model_config = ConfigDict(extra="forbid")

    experiment: ExperimentName
    seed: int = Field(default=0, ge=0)
    output_dir: Optional[Path] = None
    threads: int = Field(default=1, ge=0, description="Worker threads; 0 selects the CPU count.")
    archive: bool = False

    # --- problem parameters ---
    dimensions: List[int] = Field(default_factory=lambda: [1], min_length=1)
    orders: List[int] = Field(default_factory=lambda: [1, 2, 3], min_length=1)
    k_degrees: List[int] = Field(default_factory=lambda: [0, 3], min_length=1)
    p_values: List[float] = Field(default_factory=lambda: [2.0], min_length=1)
    q_values: List[float] = Field(default_factory=lambda: [2.0], min_length=1)
    betas: List[float] = Field(default_factory=lambda: [1.0], min_length=1)
    norm_r: List[float] = Field(default_factory=lambda: [2.0], min_length=1)
    semigroups: List[SemigroupName] = Field(default_factory=lambda: ["heat_A"], min_length=1)
    vector_dims: List[int] = Field(default_factory=lambda: [1], min_length=1)
    nu: float = Field(default=1.0, gt=0)
    eta: float = 0.9
    delta: float = 0.6
    eta_sweep: List[float] = Field(default_factory=lambda: [3.0, 4.0, 5.0, 6.0, 7.0, 8.0])
    bounds: List[BoundId] = Field(default_factory=lambda: list(ALL_BOUNDS))

    # --- sizes ---
    samples: int = Field(default=1000, ge=2)
    fd_points: int = Field(default=200, ge=1)
    degree_cap: int = Field(default=24, ge=1)
    max_degree: int = Field(default=8, ge=0)
    identity_degree: int = Field(default=10, ge=0)
    time_points: Optional[int] = Field(default=None, ge=16)
    t_min: Optional[float] = Field(default=None, gt=0)
    t_max: Optional[float] = Field(default=None, gt=0)
    space_points: Optional[int] = Field(default=None, ge=2, le=200)

    # --- corpus ---
    corpus: CorpusName = "eigenfunctions"
    corpus_size: int = Field(default=6, ge=1)

    @model_validator(mode='after')
    def check_parameter_ranges(self) -> 'ExperimentConfig':
        if any(q <= 1 for q in self.q_values):
            raise ValueError("Every q must satisfy q > 1.")
        if any(p < 1 for p in self.p_values):
            raise ValueError("Every p must satisfy p >= 1.")
        if any(b <= 0 for b in self.betas):
            raise ValueError("Every beta must be positive.")
        if any(r < 1 for r in self.norm_r):
            raise ValueError("Every norm exponent r must satisfy r >= 1.")
        if any(n < 1 for n in self.dimensions) or any(m < 0 for m in self.orders):
            raise ValueError("Dimensions must be >= 1 and orders >= 0.")
        if any(m < 1 for m in self.vector_dims) or any(k < 0 for k in self.k_degrees):
            raise ValueError("Vector dimensions must be >= 1 and space degrees >= 0.")
        if not 0 < self.delta < self.eta < 1:
            raise ValueError("Parameters must satisfy 0 < delta < eta < 1.")
        if self.t_min is not None and self.t_max is not None and self.t_min >= self.t_max:
            raise ValueError("t_min must be smaller than t_max.")

        if self.experiment == "gfun-constants" and any(p == 1 for p in self.p_values):
            raise ValueError("p = 1 is rejected for gfun-constants: g(f) is not integrable in L^1(gamma_-1).")
        if self.experiment == "weak11-growth":
            if not self.eta_sweep:
                raise ValueError("weak11-growth needs a non-empty eta_sweep.")
            if any(e <= 0 for e in self.eta_sweep):
                raise ValueError("eta_sweep values must be positive.")
            if any(k > 4 for k in self.k_degrees):
                raise ValueError("weak11-growth supports space degrees |k| <= 4.")
        if self.experiment == "bound-sample":
            for p in self.p_values:
                if not self.eta - self.delta < 2.0 / p < self.eta + self.delta:
                    raise ValueError(
                        f"p = {p} violates eta - delta < 2/p < eta + delta "
                        f"with eta = {self.eta}, delta = {self.delta}."
                    )
        return self


class ExperimentReport(BaseModel):
    """
    Outcome of a single experiment run. `tables` are written as CSV files,
    the remaining fields form report.json.
    """
    experiment: str
    version: str
    seed: int
    config: Dict[str, Any]
    summary: Dict[str, Any] = Field(default_factory=dict)
    assertions: List[AssertionRecord] = Field(default_factory=list)
    tables: Dict[str, List[Dict[str, Any]]] = Field(default_factory=dict, exclude=True)
    fixtures: List[Dict[str, Any]] = Field(default_factory=list, exclude=True)
    started_at: datetime = Field(default_factory=datetime.now)
    wall_clock_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def add_assertion(self, name: str, passed: bool, observed: float | None = None,
                      target: float | None = None, detail: str = "") -> AssertionRecord:
        if observed is not None and not math.isfinite(observed):
            passed = False
        record = AssertionRecord(name=name, passed=bool(passed), observed=observed, target=target, detail=detail)
        self.assertions.append(record)
        return record


class ManifestEntry(BaseModel):
    path: str
    size: int
    sha256: str


class RunManifest(BaseModel):
    """Contents of MANIFEST.json at the root of a run archive."""
    root: str
    version: str
    experiment: Optional[str] = None
    passed: Optional[bool] = None
    files: List[ManifestEntry] = Field(default_factory=list)
