"""
Loading of flat `.strobosam.yml` config files.
"""
from __future__ import annotations

from pathlib import Path
from typing import Any

import yaml
from pydantic import ValidationError

from strobosam.core.config_models import ExperimentConfig
from strobosam.core.errors import ConfigError
from strobosam.core.log import log


# Looked up in the working directory when no --config is given
DEFAULT_CONFIG_PATHS = [
    Path(".strobosam.yml"),
    Path(".strobosam.yaml"),
]


def read_flat_config(path: Path) -> dict[str, Any]:
    """
    Read a flat key-value YAML mapping.

    Raises ConfigError for unreadable files, invalid YAML, nested values other
    than the `alphas` list, or a top level that is not a mapping.
    """
    try:
        content_text = path.read_text(encoding="utf-8")
    except OSError as read_error:
        raise ConfigError(f"Cannot read config {path}: {read_error}") from read_error

    try:
        yaml_data = yaml.safe_load(content_text)
    except yaml.YAMLError as yaml_error:
        raise ConfigError(f"Invalid YAML in {path}: {yaml_error}") from yaml_error

    if yaml_data is None:
        log(f"⚠️ Config file {path} is empty, using defaults")
        return {}
    if not isinstance(yaml_data, dict):
        raise ConfigError(f"Config {path} must be a flat key: value mapping")

    for key, value in yaml_data.items():
        if isinstance(value, dict) or (isinstance(value, list) and key != "alphas"):
            raise ConfigError(f"Config key {key!r} in {path} must be a scalar")

    return {str(key): value for key, value in yaml_data.items()}


def load_experiment_config(
    path: Path | None = None,
    overrides: dict[str, Any] | None = None,
) -> ExperimentConfig:
    """
    Build the effective ExperimentConfig.

    Precedence (highest first): overrides (CLI flags) > config file > defaults.
    With `path=None` the default locations are tried; a missing default file
    is not an error, a missing explicit file is.
    """
    flat: dict[str, Any] = {}

    if path is not None:
        flat = read_flat_config(path)
        log(f"📋 Loaded config from {path}")
    else:
        for candidate in DEFAULT_CONFIG_PATHS:
            if candidate.is_file():
                flat = read_flat_config(candidate)
                log(f"📋 Loaded config from {candidate}")
                break

    merged = {**flat, **{key: value for key, value in (overrides or {}).items() if value is not None}}

    try:
        return ExperimentConfig.from_flat(merged)
    except ValidationError as validation_error:
        raise ConfigError(f"Invalid configuration: {validation_error}") from validation_error
