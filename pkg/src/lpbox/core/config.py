"""
Handles loading application-wide configuration settings.

Runtime defaults come from the environment (and an optional .env file).
Experiment-specific parameters live in YAML config files and are validated
by `lpbox.models.data_models.ExperimentConfig`.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

_APP_HOME_DIR_NAME = ".lpbox"


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    return int(raw) if raw not in (None, "") else default


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    return float(raw) if raw not in (None, "") else default


def _env_path(name: str, home: Path, default: Path) -> Path:
    raw = os.getenv(name)
    if raw and Path(raw).is_absolute():
        return Path(raw)
    if raw:
        return home / raw  # relative to LPBOX_HOME
    return default


class Settings:
    def __init__(self):
        home_env = os.getenv("LPBOX_HOME")
        self.APP_HOME: Path = Path(home_env).expanduser() if home_env else Path.home() / _APP_HOME_DIR_NAME

        # --- Output Directories ---
        self.runs_dir: Path = _env_path("LPBOX_RUNS_DIR", self.APP_HOME, self.APP_HOME / "runs")
        self.archive_dir: Path = _env_path("LPBOX_ARCHIVE_DIR", self.APP_HOME, self.APP_HOME / "archives")

        # --- Logging ---
        self.log_level: str = (os.getenv("LPBOX_LOG_LEVEL") or "INFO").upper()

        # --- Numerical Caps ---
        self.max_hermite_degree: int = _env_int("LPBOX_MAX_HERMITE_DEGREE", 64)
        self.degree_cap: int = _env_int("LPBOX_DEGREE_CAP", 24)

        # --- Default Grids ---
        self.time_points: int = _env_int("LPBOX_TIME_POINTS", 4096)
        self.t_min: float = _env_float("LPBOX_T_MIN", 1e-8)
        self.t_max: float = _env_float("LPBOX_T_MAX", 64.0)
        self.space_points: int = _env_int("LPBOX_SPACE_POINTS", 80)
        self.subordination_step: float = _env_float("LPBOX_SUBORDINATION_STEP", 0.2)

    def create_directories(self):
        self.APP_HOME.mkdir(exist_ok=True, parents=True)
        self.runs_dir.mkdir(exist_ok=True, parents=True)
        self.archive_dir.mkdir(exist_ok=True, parents=True)


settings = Settings()
