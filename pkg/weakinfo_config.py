"""Preset and run-configuration loading.

``weakinfo_presets.json`` ships with the repository; an optional
``weakinfo_presets.local.json`` next to it is deep-merged on top. The merged
result is cached for the process; ``reset_cache()`` forces a reload.
"""
from __future__ import annotations

import copy
import json
import os
from pathlib import Path
from typing import Any, Dict, Optional

from weakinfo_errors import ConfigError
from weakinfo_log import _log_debug

PRESETS_FILE = Path(__file__).with_name("weakinfo_presets.json")
PRESETS_ENV = "WEAKINFO_PRESETS"

RUN_CONFIG_KEYS = frozenset(
    {
        "prior",
        "tau",
        "gamma",
        "time",
        "k",
        "n",
        "avg",
        "posterior",
        "preset",
        "grid",
        "tau_range",
        "trials",
        "seed",
        "workers",
        "format",
        "out",
        "tolerance",
    }
)

_PRESET_CACHE: Optional[Dict[str, Any]] = None


def _presets_path() -> Path:
    override = os.environ.get(PRESETS_ENV)
    if override:
        return Path(override)
    return PRESETS_FILE


def _local_path(path: Path) -> Path:
    return path.with_name(f"{path.stem}.local{path.suffix}")


def _read_json(path: Path) -> Any:
    try:
        with path.open("r", encoding="utf-8-sig") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path.name} contains invalid JSON: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if key in merged and isinstance(merged[key], dict) and isinstance(value, dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_presets() -> Dict[str, Any]:
    global _PRESET_CACHE
    if _PRESET_CACHE is not None:
        return _PRESET_CACHE

    path = _presets_path()
    if not path.exists():
        raise ConfigError(f"presets file not found: {path}")
    data = _read_json(path)
    if not isinstance(data, dict):
        raise ConfigError(f"{path.name} must hold a JSON object")

    local = _local_path(path)
    if local.exists():
        override = _read_json(local)
        if not isinstance(override, dict):
            raise ConfigError(f"{local.name} must hold a JSON object")
        data = _deep_merge(data, override)
        _log_debug("Merged local presets.", path=str(local))

    for section in ("defaults", "presets", "verify"):
        if not isinstance(data.get(section), dict):
            raise ConfigError(f"{path.name}: section '{section}' is missing or not an object")

    _PRESET_CACHE = data
    return data


def reset_cache() -> None:
    global _PRESET_CACHE
    _PRESET_CACHE = None


def get_defaults() -> Dict[str, Any]:
    return copy.deepcopy(load_presets()["defaults"])


def get_preset(name: str) -> Dict[str, Any]:
    presets = load_presets()["presets"]
    if name not in presets:
        known = ", ".join(sorted(presets))
        raise ConfigError(f"unknown preset '{name}' (known: {known})")
    return copy.deepcopy(presets[name])


def get_verify_matrix() -> Dict[str, Any]:
    return copy.deepcopy(load_presets()["verify"])


def load_run_config_file(path: str) -> Dict[str, Any]:
    """Read a ``--config`` JSON object; every key must be a run-config key."""

    data = _read_json(Path(path))
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: configuration must be a JSON object")
    unknown = sorted(set(data) - RUN_CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"{path}: unknown configuration keys: {', '.join(unknown)}")
    return data
