"""
Run archives: a report directory packed as .tar.gz with a MANIFEST.json
listing every file, its size and its SHA-256.
"""

import hashlib
import io
import json
import logging
import tarfile
from pathlib import Path
from typing import Union

from lpbox.models.data_models import ManifestEntry, RunManifest

logger = logging.getLogger(__name__)

MANIFEST_NAME = "MANIFEST.json"


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for block in iter(lambda: handle.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def build_manifest(run_dir: Union[str, Path], root: str, version: str) -> RunManifest:
    """
    Lists the files of `run_dir` in sorted order. Experiment name and the
    overall verdict are taken from report.json when it is readable.
    """
    run_dir = Path(run_dir)
    files = [
        ManifestEntry(path=path.relative_to(run_dir).as_posix(), size=path.stat().st_size, sha256=_sha256(path))
        for path in sorted(p for p in run_dir.rglob("*") if p.is_file())
    ]
    manifest = RunManifest(root=root, version=version, files=files)
    report_path = run_dir / "report.json"
    if report_path.is_file():
        try:
            document = json.loads(report_path.read_text(encoding="utf-8"))
            manifest.experiment = document.get("experiment")
            manifest.passed = document.get("passed")
        except (OSError, ValueError, AttributeError) as e:
            logger.warning(f"report.json in {run_dir} is unreadable, manifest left without a verdict: {e}")
    return manifest


def archive_run_directory(
    run_dir: Union[str, Path],
    archive_path: Union[str, Path],
    root: str,
    version: str,
) -> RunManifest | None:
    """
    Packs `run_dir` under the folder `root` inside `archive_path`, with the
    manifest written as root/MANIFEST.json.

    Returns:
        The manifest on success, otherwise None.
    """
    run_dir = Path(run_dir)
    archive_path = Path(archive_path)

    if not run_dir.is_dir():
        logger.error(f"Run directory not found at '{run_dir}'")
        return None
    if (run_dir / MANIFEST_NAME).exists():
        logger.error(f"'{run_dir}' already holds a {MANIFEST_NAME}; refusing to shadow it")
        return None

    archive_path.parent.mkdir(parents=True, exist_ok=True)
    try:
        manifest = build_manifest(run_dir, root, version)
        payload = (manifest.model_dump_json(indent=2) + "\n").encode("utf-8")
        with tarfile.open(archive_path, "w:gz") as tar:
            for entry in manifest.files:
                tar.add(run_dir / entry.path, arcname=f"{root}/{entry.path}")
            info = tarfile.TarInfo(f"{root}/{MANIFEST_NAME}")
            info.size = len(payload)
            tar.addfile(info, io.BytesIO(payload))
        return manifest
    except (OSError, tarfile.TarError) as e:
        logger.error(f"Failed to create archive: {e}")
        return None


def read_manifest(archive_path: Union[str, Path]) -> RunManifest | None:
    """The manifest stored in a run archive, None when it has none."""
    with tarfile.open(archive_path, "r:gz") as tar:
        for member in tar.getmembers():
            if member.name.endswith(f"/{MANIFEST_NAME}"):
                return RunManifest.model_validate_json(tar.extractfile(member).read())
    return None
