import logging
from typing import Dict, List

import numpy as np

from lpbox.analysis.special_functions import multiindices_up_to_degree
from lpbox.analysis.spectral import HermiteExpansion, expand
from lpbox.core.exceptions import ArgumentError, CapabilityError

logger = logging.getLogger(__name__)

EIGENFUNCTION_MAX_DEGREE = 8
RANDOM_MAX_DEGREE = 12
SUPER_GAUSSIAN_RATES = (1.5, 2.0, 3.0)
VECTOR_DIMS = (2, 4, 8)

Corpus = Dict[str, HermiteExpansion]


class CorpusService:
    """
    Builds the named test-function corpora. Every random draw goes through a
    generator seeded at construction, so a corpus is fixed by (seed, arguments).
    """

    def __init__(self, seed: int = 0, degree_cap: int = 24):
        self.seed = seed
        self.degree_cap = degree_cap

    def _rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])

    def _check_degree(self, degree: int) -> None:
        if degree > self.degree_cap:
            raise CapabilityError(f"Corpus degree {degree} exceeds the configured cap {self.degree_cap}.")

    def eigenfunctions(self, n: int, max_degree: int = EIGENFUNCTION_MAX_DEGREE, size: int | None = None) -> Corpus:
        """H~_k for |k| <= max_degree, lowest degrees first."""
        if max_degree > EIGENFUNCTION_MAX_DEGREE:
            raise CapabilityError(f"The eigenfunction corpus stops at |k| = {EIGENFUNCTION_MAX_DEGREE}.")
        self._check_degree(max_degree)
        indices = multiindices_up_to_degree(n, max_degree)
        if size is not None:
            indices = indices[:size]
        return {f"H~{k}": HermiteExpansion.eigenfunction(k) for k in indices}

    def random_expansions(self, n: int, size: int, max_degree: int = RANDOM_MAX_DEGREE) -> Corpus:
        """Finite expansions with standard normal coefficients on a random subset of |k| <= max_degree."""
        if max_degree > RANDOM_MAX_DEGREE:
            raise CapabilityError(f"Random expansions stop at degree {RANDOM_MAX_DEGREE}.")
        self._check_degree(max_degree)
        rng = self._rng(1)
        indices = multiindices_up_to_degree(n, max_degree)
        corpus: Corpus = {}
        for j in range(size):
            terms = int(rng.integers(1, min(len(indices), 6) + 1))
            chosen = rng.choice(len(indices), size=terms, replace=False)
            coefficients = rng.standard_normal(terms)
            corpus[f"random[{j}]"] = HermiteExpansion.from_terms(
                n, {indices[i]: c for i, c in zip(sorted(chosen), coefficients)}
            )
        return corpus

    def super_gaussians(self, n: int, max_degree: int) -> Corpus:
        """Truncated expansions of e^{-a|x|^2}, a in {1.5, 2, 3}."""
        self._check_degree(max_degree)
        corpus: Corpus = {}
        for a in SUPER_GAUSSIAN_RATES:
            corpus[f"super_gaussian[a={a}]"] = expand(
                lambda x, a=a: np.exp(-a * np.sum(x * x, axis=-1)), n, max_degree
            )
        return corpus

    def vector_corpus(self, n: int, size: int, vector_dims: List[int], max_degree: int) -> Corpus:
        """
        Vector-valued members whose components alternate between eigenfunctions
        and random expansions.
        """
        scalars = list(self.eigenfunctions(n, min(max_degree, EIGENFUNCTION_MAX_DEGREE)).values())
        count = max(size, 1) * max(vector_dims)
        randoms = list(self.random_expansions(n, count, min(max_degree, RANDOM_MAX_DEGREE)).values())
        pool = [f for pair in zip(scalars, randoms) for f in pair] + randoms[len(scalars):]
        corpus: Corpus = {}
        for m in vector_dims:
            for j in range(size):
                start = (j * m) % max(len(pool) - m + 1, 1)
                components = pool[start:start + m]
                if len(components) < m:
                    raise ArgumentError(f"Not enough scalar members to build a vector of {m} components.")
                corpus[f"vector[m={m}][{j}]"] = HermiteExpansion.stack(components)
        return corpus

    def build(self, name: str, n: int, size: int, max_degree: int, vector_dims: List[int] | None = None) -> Corpus:
        logger.info(f"Building corpus '{name}' (n={n}, size={size}, max degree {max_degree}).")
        if name == "eigenfunctions":
            return self.eigenfunctions(n, min(max_degree, EIGENFUNCTION_MAX_DEGREE), size)
        if name == "random":
            return self.random_expansions(n, size, min(max_degree, RANDOM_MAX_DEGREE))
        if name == "super_gaussian":
            return self.super_gaussians(n, max_degree)
        if name == "vector":
            return self.vector_corpus(n, size, list(vector_dims or VECTOR_DIMS), max_degree)
        if name == "mixed":
            corpus: Corpus = {}
            corpus.update(self.eigenfunctions(n, min(max_degree, EIGENFUNCTION_MAX_DEGREE), size))
            corpus.update(self.random_expansions(n, size, min(max_degree, RANDOM_MAX_DEGREE)))
            corpus.update(self.super_gaussians(n, max_degree))
            return corpus
        raise ArgumentError(f"Unknown corpus '{name}'.")
