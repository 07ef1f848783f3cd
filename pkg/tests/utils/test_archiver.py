import json
import tarfile

from lpbox.utils.archiver import MANIFEST_NAME, archive_run_directory, build_manifest, read_manifest


def _run_dir(tmp_path, report=None):
    source = tmp_path / "run"
    source.mkdir()
    (source / "report.json").write_text(json.dumps(report or {"experiment": "teuwen-verify", "passed": True}),
                                        encoding="utf-8")
    (source / "teuwen_points.csv").write_text("# schema=1\nm,n\n1,1\n", encoding="utf-8")
    return source


def test_archive_carries_files_under_root_and_a_manifest(tmp_path):
    source = _run_dir(tmp_path)
    archive = tmp_path / "archives" / "run.tar.gz"
    manifest = archive_run_directory(source, archive, "lpbox_run", "0.1.0")
    assert manifest is not None
    with tarfile.open(archive) as tar:
        names = set(tar.getnames())
    assert {"lpbox_run/report.json", "lpbox_run/teuwen_points.csv", f"lpbox_run/{MANIFEST_NAME}"} <= names
    assert read_manifest(archive) == manifest


def test_manifest_lists_sizes_hashes_and_verdict(tmp_path):
    source = _run_dir(tmp_path, {"experiment": "weak11-growth", "passed": False})
    manifest = build_manifest(source, "root", "0.1.0")
    assert [e.path for e in manifest.files] == ["report.json", "teuwen_points.csv"]
    assert manifest.files[1].size == len("# schema=1\nm,n\n1,1\n")
    assert all(len(e.sha256) == 64 for e in manifest.files)
    assert manifest.experiment == "weak11-growth"
    assert manifest.passed is False


def test_manifest_without_a_readable_report(tmp_path):
    source = tmp_path / "run"
    source.mkdir()
    (source / "report.json").write_text("not json", encoding="utf-8")
    manifest = build_manifest(source, "root", "0.1.0")
    assert manifest.experiment is None and manifest.passed is None
    assert len(manifest.files) == 1


def test_missing_source_returns_none(tmp_path):
    assert archive_run_directory(tmp_path / "missing", tmp_path / "out.tar.gz", "root", "0.1.0") is None
    assert not (tmp_path / "out.tar.gz").exists()


def test_existing_manifest_is_not_shadowed(tmp_path):
    source = _run_dir(tmp_path)
    (source / MANIFEST_NAME).write_text("{}", encoding="utf-8")
    assert archive_run_directory(source, tmp_path / "out.tar.gz", "root", "0.1.0") is None
