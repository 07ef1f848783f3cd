import pytest
from pydantic import ValidationError

from lpbox.models.data_models import BoundReport, ExperimentConfig, HermiteExpansionDocument


def test_config_defaults():
    config = ExperimentConfig(experiment="bound-sample")
    assert config.bounds == ["acot_deriv", "a2", "b", "c", "diferencia", "maximal_kernel"]
    assert config.threads == 1 and config.seed == 0


@pytest.mark.parametrize("overrides", [
    {"q_values": [1.0]},
    {"betas": [0.0]},
    {"norm_r": [0.5]},
    {"eta": 0.5, "delta": 0.6},
    {"t_min": 1.0, "t_max": 0.5},
    {"unknown_key": 1},
    {"semigroups": ["wave"]},
])
def test_config_rejections(overrides):
    with pytest.raises(ValidationError):
        ExperimentConfig(experiment="spectral-identities", **overrides)


def test_experiment_specific_rules():
    with pytest.raises(ValidationError, match="p = 1"):
        ExperimentConfig(experiment="gfun-constants", p_values=[1.0])
    with pytest.raises(ValidationError):
        ExperimentConfig(experiment="weak11-growth", k_degrees=[5])
    # 2/p must lie in (eta - delta, eta + delta) = (0.3, 1.5)
    with pytest.raises(ValidationError):
        ExperimentConfig(experiment="bound-sample", p_values=[8.0])
    assert ExperimentConfig(experiment="bound-sample", p_values=[1.5, 4.0]).p_values == [1.5, 4.0]


def test_expansion_document_checks_term_shapes():
    HermiteExpansionDocument(n=2, m=1, terms=[{"k": [1, 0], "c": [0.5]}])
    with pytest.raises(ValidationError):
        HermiteExpansionDocument(n=2, terms=[{"k": [1], "c": [0.5]}])
    with pytest.raises(ValidationError):
        HermiteExpansionDocument(n=1, m=2, terms=[{"k": [1], "c": [0.5]}])
    with pytest.raises(ValidationError):
        HermiteExpansionDocument(n=1, terms=[{"k": [-1], "c": [0.5]}])


def test_bound_report_row():
    report = BoundReport(
        bound_id="b", samples=10, fitted_constant=2.0, half_sample_constant=1.9, growth=0.05, stable=True,
        max_ratio_location={"x1": 0.1, "y1": 0.2}, parameters={"q": 2.0, "m": 1},
    )
    row = report.to_row()
    assert list(row)[:3] == ["bound_id", "param_m", "param_q"]
    assert row["worst"] == "x1=0.1;y1=0.2"
