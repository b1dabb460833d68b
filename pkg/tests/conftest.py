"""Test configuration for path adjustments and shared fixtures."""

from __future__ import annotations

import math
import sys
from pathlib import Path

ROOT_DIR = Path(__file__).resolve().parents[1]
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))

import pytest

import weakinfo_config
from fock_state import PriorState, make_prior

LN2 = math.log(2.0)


@pytest.fixture(autouse=True)
def _fresh_presets(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv(weakinfo_config.PRESETS_ENV, raising=False)
    weakinfo_config.reset_cache()
    try:
        yield
    finally:
        weakinfo_config.reset_cache()


@pytest.fixture
def uniform_qutrit() -> PriorState:
    return make_prior([1, 1, 1])


@pytest.fixture
def uniform_four() -> PriorState:
    return make_prior([1, 1, 1, 1])


@pytest.fixture
def figure_priors() -> list[PriorState]:
    return [
        make_prior(weights)
        for weights in ([1, 1, 1], [0.2, 0.4, 0.4], [0.5, 0.3, 0.2], [0.2, 0.2, 0.6])
    ]


@pytest.fixture
def small_verify_matrix() -> dict[str, object]:
    return {
        "priors": [[1, 1, 1], [0.5, 0.5], [0.2, 0.8], [0.1, 0.2, 0.3, 0.4]],
        "taus": [0.1, LN2, 2.0],
        "kclick_max_dim": 4,
        "kclick_taus": [0.5, 2.0],
        "small_time_priors": [[0.5, 0.5], [0.9, 0.1]],
        "saturation_tau": 20.0,
        "peak_priors": [[0.5, 0.5]],
        "peak_grid": {"tau_start": 0.0, "tau_stop": 8.0, "points": 200, "spacing": "linear"},
        "oracle": {
            "taus": [0.5],
            "max_level": 3,
            "priors": [[1, 1, 1]],
            "sigmas": 4.0,
            "chisquare_min_pvalue": 1e-4,
        },
    }
