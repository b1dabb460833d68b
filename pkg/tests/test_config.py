from __future__ import annotations

import json
from pathlib import Path

import pytest

import weakinfo_config
from weakinfo_errors import ConfigError


def _write_presets(path: Path, payload: dict) -> Path:
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


@pytest.fixture
def presets_dir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    base = {
        "defaults": {"seed": 42, "trials": 1000000, "format": "json"},
        "presets": {"demo": {"prior": [1, 1], "k": 0, "grid": {"tau_start": 0.0, "tau_stop": 4.0}}},
        "verify": {"priors": [[1, 1]]},
    }
    target = _write_presets(tmp_path / "presets.json", base)
    monkeypatch.setenv(weakinfo_config.PRESETS_ENV, str(target))
    weakinfo_config.reset_cache()
    return tmp_path


def test_bundled_presets_cover_figures() -> None:
    for name in ("fig1a", "fig1b", "fig1c", "fig1d", "fig2k0", "fig2k1", "fig2k2", "fig2k3"):
        preset = weakinfo_config.get_preset(name)
        assert "prior" in preset and "grid" in preset

    assert weakinfo_config.get_preset("fig2k3")["k"] == 3
    assert weakinfo_config.get_preset("fig1c")["prior"] == [0.5, 0.3, 0.2]
    assert weakinfo_config.get_defaults()["seed"] == 42


def test_unknown_preset_lists_known_names() -> None:
    with pytest.raises(ConfigError, match="fig1a"):
        weakinfo_config.get_preset("fig9")


def test_verify_matrix_spans_dimensions() -> None:
    matrix = weakinfo_config.get_verify_matrix()
    dims = {len(prior) for prior in matrix["priors"]}

    assert len(matrix["priors"]) >= 20
    assert min(dims) == 2 and max(dims) == 8
    assert matrix["oracle"]["sigmas"] == 4


def test_returned_sections_are_copies() -> None:
    preset = weakinfo_config.get_preset("fig1a")
    preset["prior"].append(99)

    assert weakinfo_config.get_preset("fig1a")["prior"] == [1, 1, 1]


def test_local_file_deep_merges(presets_dir: Path) -> None:
    _write_presets(
        presets_dir / "presets.local.json",
        {"defaults": {"seed": 7}, "presets": {"demo": {"grid": {"tau_stop": 9.0}}}},
    )

    defaults = weakinfo_config.get_defaults()
    demo = weakinfo_config.get_preset("demo")

    assert defaults == {"seed": 7, "trials": 1000000, "format": "json"}
    assert demo["grid"] == {"tau_start": 0.0, "tau_stop": 9.0}
    assert demo["prior"] == [1, 1]


def test_presets_are_cached_until_reset(presets_dir: Path) -> None:
    assert weakinfo_config.get_defaults()["seed"] == 42
    _write_presets(presets_dir / "presets.local.json", {"defaults": {"seed": 11}})

    assert weakinfo_config.get_defaults()["seed"] == 42
    weakinfo_config.reset_cache()
    assert weakinfo_config.get_defaults()["seed"] == 11


def test_invalid_json_is_a_config_error(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    monkeypatch.setenv(weakinfo_config.PRESETS_ENV, str(broken))

    with pytest.raises(ConfigError, match="invalid JSON"):
        weakinfo_config.load_presets()


def test_missing_section_is_a_config_error(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    partial = _write_presets(tmp_path / "partial.json", {"defaults": {}, "presets": {}})
    monkeypatch.setenv(weakinfo_config.PRESETS_ENV, str(partial))

    with pytest.raises(ConfigError, match="verify"):
        weakinfo_config.load_presets()


def test_missing_presets_file(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv(weakinfo_config.PRESETS_ENV, str(tmp_path / "absent.json"))

    with pytest.raises(ConfigError, match="not found"):
        weakinfo_config.load_presets()


def test_run_config_file_accepts_known_keys(tmp_path: Path) -> None:
    path = _write_presets(tmp_path / "run.json", {"prior": [1, 1, 1], "tau": 0.5, "seed": 3})

    assert weakinfo_config.load_run_config_file(str(path)) == {"prior": [1, 1, 1], "tau": 0.5, "seed": 3}


def test_run_config_file_rejects_unknown_keys(tmp_path: Path) -> None:
    path = _write_presets(tmp_path / "run.json", {"prior": [1, 1], "colour": "blue"})

    with pytest.raises(ConfigError, match="colour"):
        weakinfo_config.load_run_config_file(str(path))


def test_run_config_file_must_be_an_object(tmp_path: Path) -> None:
    path = tmp_path / "run.json"
    path.write_text("[1, 2, 3]", encoding="utf-8")

    with pytest.raises(ConfigError):
        weakinfo_config.load_run_config_file(str(path))
