import math

from lpbox.models.data_models import ExperimentConfig
from lpbox.services.weak11_service import Weak11Service, space_order


def test_space_order_puts_the_degree_on_the_first_coordinate():
    assert space_order(3, 2).entries == (2, 0, 0)


def test_proxy_row_is_finite():
    row = Weak11Service().proxy_row(1, 1, 3, 2.0, 3.0)
    assert math.isfinite(row["log_proxy"])
    assert row["proxy"] == math.exp(row["log_proxy"])
    assert row["z_norm"] == 3.0
    assert row["j_measure_ratio"] > 0.1


def test_run_labels_trends_by_degree():
    config = ExperimentConfig(
        experiment="weak11-growth", dimensions=[1], orders=[1], k_degrees=[2, 3], eta_sweep=[4.0, 3.0],
    )
    report = Weak11Service().run(config)
    trends = {row["k_degree"]: row for row in report.tables["weak11_trends"]}
    assert trends[2]["trend"] == "boundary" and trends[2]["passed"]
    assert trends[3]["trend"] == "increasing"
    assert [row["eta"] for row in report.tables["weak11_proxies"]][:2] == [3.0, 4.0]
    names = [a.name for a in report.assertions]
    assert "weak11_growth[n=1,m=1,|k|=3]" in names
    assert not any(name.startswith("weak11_growth[n=1,m=1,|k|=2]") for name in names)
    measure = next(a for a in report.assertions if a.name == "j_measure_lower_bound")
    assert measure.passed
    assert report.summary["etas"] == [3.0, 4.0]


def test_low_degrees_have_a_non_increasing_tail():
    config = ExperimentConfig(
        experiment="weak11-growth", dimensions=[1], orders=[1], k_degrees=[0, 1], eta_sweep=[5.0, 6.0, 7.0, 8.0],
    )
    report = Weak11Service().run(config)
    for degree in (0, 1):
        bounded = next(a for a in report.assertions if a.name == f"weak11_bounded[n=1,m=1,|k|={degree}]")
        assert bounded.passed
        proxies = [row["proxy"] for row in report.tables["weak11_proxies"] if row["k_degree"] == degree]
        assert len(proxies) == 4
        assert all(later <= earlier for earlier, later in zip(proxies, proxies[1:]))
    trends = {row["k_degree"]: row["trend"] for row in report.tables["weak11_trends"]}
    assert trends == {0: "non_increasing", 1: "non_increasing"}
