import pytest

from lpbox.models.data_models import ExperimentConfig
from lpbox.services.corpus_service import CorpusService
from lpbox.services.gfunction_service import GFunctionService, time_grid_for


def _config(**overrides):
    values = {
        "experiment": "gfun-constants",
        "dimensions": [1],
        "corpus": "eigenfunctions",
        "corpus_size": 3,
        "max_degree": 2,
        "orders": [1],
        "time_points": 512,
        "space_points": 40,
    }
    values.update(overrides)
    return ExperimentConfig(**values)


def test_time_grid_follows_config():
    tgrid = time_grid_for(_config(t_min=1e-4, t_max=10.0))
    assert (tgrid.t_min, tgrid.t_max, tgrid.points) == (1e-4, 10.0, 512)


def test_eigenfunction_run_passes_its_closed_form_checks():
    report = GFunctionService(CorpusService()).run(_config())
    assert report.passed, [a.name for a in report.assertions if not a.passed]
    names = [a.name for a in report.assertions]
    assert "eigen_closed_form" in names
    assert sum(name.startswith("eigen_upper_ratio") for name in names) == 3
    assert report.summary["members"] == 3
    assert report.summary["max_upper"] == pytest.approx(0.5, rel=1e-8)
    directions = [row["direction"] for row in report.tables["gfun_constants"]]
    assert directions == ["upper", "lower", "probe"]


def test_vector_corpus_is_consistent_with_components():
    config = _config(corpus="vector", vector_dims=[2], corpus_size=1, max_degree=3)
    report = GFunctionService(CorpusService()).run(config)
    vector = [a for a in report.assertions if a.name == "vector_consistency"]
    assert len(vector) == 1 and vector[0].passed
    assert "gfun_closed_form" not in report.tables


def test_beta_monotonicity_probe_runs_with_two_betas():
    report = GFunctionService(CorpusService()).run(_config(betas=[0.5, 1.0], semigroups=["poisson_A"]))
    probes = [row for row in report.tables["gfun_constants"] if row["direction"] == "probe"]
    assert [row["bound_id"] for row in probes] == ["beta_monotonicity", "subordination_transfer"]
    assert probes[0]["fitted_constant"] == pytest.approx(2**0.5, rel=1e-6)
