import numpy as np

from lpbox.analysis.spectral import HermiteExpansion
from lpbox.models.data_models import ExperimentConfig
from lpbox.services.corpus_service import CorpusService
from lpbox.services.identity_service import ALGEBRAIC_TOLERANCE, WEYL_TOLERANCE, IdentityService


def _service():
    return IdentityService(CorpusService(seed=2))


def test_algebraic_rows_hold_to_rounding():
    f = HermiteExpansion.from_terms(2, {(0, 0): 0.5, (1, 2): -1.0, (3, 0): 2.0})
    rows = _service().algebraic_rows(f, "f")
    families = {row["identity"].split("[")[0] for row in rows}
    assert families == {"eigenrelation", "generator", "riesz", "intertwining"}
    assert len([r for r in rows if r["identity"].startswith("intertwining")]) == 2 * 3
    assert max(row["error"] for row in rows) <= ALGEBRAIC_TOLERANCE


def test_weyl_rows():
    rows = _service().weyl_rows()
    assert len(rows) == 4 * 10
    assert max(row["error"] for row in rows) <= WEYL_TOLERANCE


def test_quadrature_rows_record_fixtures():
    service = _service()
    f = HermiteExpansion.from_terms(1, {(1,): 1.0, (4,): 0.3})
    h = HermiteExpansion.from_terms(1, {(1,): 0.5, (2,): -0.2})
    rows = service.quadrature_rows(f, h, "f")
    assert [row["identity"] for row in rows] == ["polarization_spectral", "polarization_quadrature", "plancherel"]
    assert rows[0]["error"] < 1e-12
    assert rows[1]["error"] < 1e-6
    assert service.recorder.records[0]["operation"] == "inner_product"


def test_run_in_three_dimensions_skips_quadrature():
    config = ExperimentConfig(experiment="spectral-identities", dimensions=[3], corpus_size=2, identity_degree=3)
    report = _service().run(config)
    families = {row["identity"].split("[")[0] for row in report.tables["identities"]}
    assert families == {"eigenrelation", "generator", "riesz", "intertwining", "weyl"}
    assert report.passed, [a.name for a in report.assertions if not a.passed]
    assert all(row["passed"] for row in report.tables["identities"])


def test_every_family_has_a_tolerance():
    tolerances = IdentityService.tolerances()
    assert set(tolerances) >= {"eigenrelation", "polarization_quadrature", "kernel_heat", "composition", "weyl"}
    assert all(np.isfinite(v) and v > 0 for v in tolerances.values())
