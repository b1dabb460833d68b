from __future__ import annotations

import pytest

import weakinfo_config
from verification import FAMILIES, VerifySettings, run_verification
from weakinfo_errors import ConfigError, TooFewTrials


def _settings(matrix: dict, trials: int = 20_000, seed: int = 42) -> VerifySettings:
    return VerifySettings.from_config(matrix, trials=trials, seed=seed)


def test_small_matrix_passes(small_verify_matrix: dict) -> None:
    report = run_verification(_settings(small_verify_matrix))

    assert report.passed, report.to_dict()["failed"]
    assert [family.name for family in report.families] == list(FAMILIES)
    assert all(family.checks > 0 for family in report.families)
    assert report.failed_families() == ()


def test_decay_sign_fault_breaks_conservation(small_verify_matrix: dict) -> None:
    report = run_verification(_settings(small_verify_matrix), fault="decay_sign")
    failed = set(report.failed_families())

    assert not report.passed
    assert {"conservation_null", "conservation_null_avg", "conservation_kclick"} <= failed
    assert "normalization" not in failed
    assert report.fault == "decay_sign"
    conservation = next(family for family in report.families if family.name == "conservation_null")
    assert conservation.examples


def test_unknown_fault_is_rejected(small_verify_matrix: dict) -> None:
    with pytest.raises(ConfigError):
        run_verification(_settings(small_verify_matrix), fault="flip_everything")


def test_too_few_trials(small_verify_matrix: dict) -> None:
    with pytest.raises(TooFewTrials):
        run_verification(_settings(small_verify_matrix, trials=10))


def test_reports_are_deterministic(small_verify_matrix: dict) -> None:
    first = run_verification(_settings(small_verify_matrix, seed=9)).to_dict()
    second = run_verification(_settings(small_verify_matrix, seed=9)).to_dict()

    assert first == second


def test_incomplete_matrix_is_a_config_error(small_verify_matrix: dict) -> None:
    del small_verify_matrix["oracle"]

    with pytest.raises(ConfigError):
        _settings(small_verify_matrix)


def test_summary_records_run_settings(small_verify_matrix: dict) -> None:
    settings = _settings(small_verify_matrix, trials=30_000, seed=3)
    summary = settings.summary()

    assert summary["trials"] == 30_000
    assert summary["seed"] == 3
    assert summary["priors"] == len(small_verify_matrix["priors"])


@pytest.mark.slow
def test_bundled_matrix_passes_at_full_trials() -> None:
    settings = VerifySettings.from_config(
        weakinfo_config.get_verify_matrix(), trials=1_000_000, seed=42, workers=2
    )
    report = run_verification(settings)

    assert report.passed, report.to_dict()["failed"]


def test_matrix_with_zero_time_reports_families(small_verify_matrix: dict) -> None:
    small_verify_matrix["taus"] = [0.0, 1.0]
    report = run_verification(_settings(small_verify_matrix))
    saturation = next(family for family in report.families if family.name == "saturation")

    assert report.passed, report.to_dict()["failed"]
    assert saturation.skipped >= 1
