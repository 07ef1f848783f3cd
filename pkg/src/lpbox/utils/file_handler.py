"""
Config-file loading and text output for experiment runs.
"""

from pathlib import Path
from typing import Any, Dict

import yaml  # type: ignore

from lpbox.core.exceptions import ConfigError


class ConfigFileError(ConfigError):
    """The experiment configuration file could not be read or parsed."""
    pass


def load_config_file(file_path: str | Path) -> Dict[str, Any]:
    """
    Reads a YAML experiment file and flattens its sections.

    Top-level mappings are section headers (`run:`, `parameters:`, ...)
    whose keys are merged into one flat dictionary; top-level scalars are
    kept as they are. A key defined in two sections is an error.
    """
    try:
        with open(file_path, 'r', encoding='utf-8') as f:
            content = f.read()
    except FileNotFoundError:
        raise ConfigFileError(f"Config file not found: {file_path}")
    except OSError as e:
        raise ConfigFileError(f"Could not read config file at {file_path}: {e}")

    try:
        document = yaml.safe_load(content)
    except yaml.YAMLError as e:
        raise ConfigFileError(f"Error parsing YAML in {file_path}: {e}")

    if document is None:
        return {}
    if not isinstance(document, dict):
        raise ConfigFileError("Config file did not parse as a mapping of sections.")

    flat: Dict[str, Any] = {}
    for key, value in document.items():
        entries = value.items() if isinstance(value, dict) else [(key, value)]
        for name, item in entries:
            if name in flat:
                raise ConfigFileError(f"Key '{name}' is defined more than once in {file_path}.")
            flat[str(name)] = item
    return flat


def save_text_file(filename: str, content: str, directory: Path | str) -> Path:
    """Writes `content` to directory/filename, creating the directory."""
    save_dir = Path(directory)
    save_dir.mkdir(parents=True, exist_ok=True)
    file_path = save_dir / filename
    with open(file_path, 'w', encoding='utf-8', newline='') as f:
        f.write(content)
    return file_path
