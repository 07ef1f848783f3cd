import numpy as np
import pytest

from lpbox.core.exceptions import ArgumentError, CapabilityError
from lpbox.services.corpus_service import CorpusService


def test_eigenfunction_corpus_sizes():
    service = CorpusService()
    assert len(service.eigenfunctions(1, 3)) == 4
    assert len(service.eigenfunctions(2, 2)) == 6
    assert len(service.eigenfunctions(2, 2, size=3)) == 3
    first = next(iter(service.eigenfunctions(2, 2).values()))
    assert first.indices[0].entries == (0, 0)


def test_random_corpus_is_reproducible():
    a = CorpusService(seed=5).random_expansions(2, 4, 6)
    b = CorpusService(seed=5).random_expansions(2, 4, 6)
    c = CorpusService(seed=6).random_expansions(2, 4, 6)
    assert list(a) == [f"random[{j}]" for j in range(4)]
    assert all(a[name].max_coefficient_difference(b[name]) == 0.0 for name in a)
    assert any(
        a[name].indices != c[name].indices or a[name].max_coefficient_difference(c[name]) > 0 for name in a
    )
    assert all(max(k.degree() for k in f.indices) <= 6 for f in a.values())


def test_corpus_caps():
    service = CorpusService(degree_cap=4)
    with pytest.raises(CapabilityError):
        service.eigenfunctions(1, 9)
    with pytest.raises(CapabilityError):
        service.eigenfunctions(1, 5)
    with pytest.raises(CapabilityError):
        CorpusService().random_expansions(1, 2, 13)


def test_super_gaussians_are_close_to_the_target():
    corpus = CorpusService().super_gaussians(1, 12)
    assert len(corpus) == 3
    f = corpus["super_gaussian[a=1.5]"]
    x = np.array([[0.0], [0.5]])
    np.testing.assert_allclose(f(x), np.exp(-1.5 * x[:, 0] ** 2), rtol=1e-3)


def test_vector_corpus():
    corpus = CorpusService().vector_corpus(1, 2, [2, 3], 4)
    assert len(corpus) == 4
    assert {f.vector_dim for f in corpus.values()} == {2, 3}
    assert "vector[m=3][1]" in corpus


def test_build_dispatch():
    service = CorpusService()
    mixed = service.build("mixed", 1, 2, 6)
    assert any(name.startswith("H~") for name in mixed)
    assert any(name.startswith("random") for name in mixed)
    assert any(name.startswith("super_gaussian") for name in mixed)
    with pytest.raises(ArgumentError):
        service.build("fourier", 1, 2, 4)
