import numpy as np
import pytest

from lpbox.core.config import settings


@pytest.fixture(autouse=True)
def isolated_home(tmp_path, monkeypatch):
    """Keep run and archive directories out of the user's home."""
    monkeypatch.setenv("LPBOX_HOME", str(tmp_path))
    monkeypatch.setattr(settings, "APP_HOME", tmp_path)
    monkeypatch.setattr(settings, "runs_dir", tmp_path / "runs")
    monkeypatch.setattr(settings, "archive_dir", tmp_path / "archives")
    return tmp_path


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)
