import json

import pytest

from lpbox.app import EXIT_ASSERTION_FAILED, EXIT_PASSED, VERBS, build_parser, main


def _write(tmp_path, text):
    path = tmp_path / "experiment.yaml"
    path.write_text(text, encoding="utf-8")
    return path


def test_parser_knows_every_verb():
    parser = build_parser()
    for verb in VERBS:
        args = parser.parse_args([verb, "--seed", "3", "--threads", "0"])
        assert args.experiment == verb and args.seed == 3 and args.threads == 0
    with pytest.raises(SystemExit):
        parser.parse_args(["calibrate"])


def test_config_for_another_experiment_is_a_config_error(tmp_path):
    path = _write(tmp_path, "experiment: weak11-growth\n")
    assert main(["teuwen-verify", "--config", str(path)]) == 3


def test_invalid_values_are_config_errors(tmp_path):
    path = _write(tmp_path, "parameters:\n  q_values: [0.5]\n")
    assert main(["gfun-constants", "--config", str(path)]) == 3
    assert main(["gfun-constants", "--config", str(tmp_path / "missing.yaml")]) == 3


def test_capability_errors_exit_with_four(tmp_path):
    path = _write(tmp_path, "parameters:\n  orders: [9]\n")
    assert main(["teuwen-verify", "--config", str(path), "--out", str(tmp_path / "out")]) == 4


def test_successful_run_writes_a_report(tmp_path, isolated_home):
    path = _write(
        tmp_path,
        "experiment: teuwen-verify\n"
        "parameters:\n  orders: [1, 2]\n  dimensions: [1]\n"
        "sizes:\n  fd_points: 4\n",
    )
    out = tmp_path / "out"
    code = main(["teuwen-verify", "--config", str(path), "--out", str(out), "--seed", "5", "--archive"])
    document = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert code == (EXIT_PASSED if document["passed"] else EXIT_ASSERTION_FAILED)
    assert document["seed"] == 5
    assert document["config"]["output_dir"] == str(out)
    assert (out / "teuwen_points.csv").exists()
    assert (out / "fixtures.json").exists()
    assert len(list((isolated_home / "archives").glob("*.tar.gz"))) == 1
