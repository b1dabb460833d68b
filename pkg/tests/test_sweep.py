from __future__ import annotations

import math

import numpy as np
import pytest

import weakinfo_config
from fock_state import PriorState, make_prior
from infotheory import (
    DECAY_TERM,
    DELTA_I,
    LHS_NAME,
    MULTIPLICITY_TERM,
    RELATIVE_ENTROPY,
)
from sweep import (
    GridSpec,
    asymptote,
    decay_term_value,
    find_decay_term_peak,
    peak_condition_root,
    sweep_kclick_avg,
    sweep_null_avg,
    sweep_pointwise,
)
from weakinfo_errors import (
    GroundStateUnsupported,
    ImpossibleOutcome,
    InvalidGrid,
    NoInteriorPeak,
    NotAQubit,
)

LOG2_3 = math.log2(3.0)
PEAK_GRID = GridSpec(0.0, 8.0, 400)


@pytest.mark.parametrize(
    ("start", "stop", "points", "spacing"),
    [
        (-1.0, 5.0, 10, "linear"),
        (5.0, 5.0, 10, "linear"),
        (0.0, 5.0, 1, "linear"),
        (0.0, float("inf"), 10, "linear"),
        (0.0, 5.0, 10, "cubic"),
        (0.0, 5.0, 10, "log"),
    ],
)
def test_grid_rejects_bad_specs(start: float, stop: float, points: int, spacing: str) -> None:
    with pytest.raises(InvalidGrid):
        GridSpec(start, stop, points, spacing)


def test_grid_endpoints_are_exact() -> None:
    linear = GridSpec(0.0, 8.0, 400).taus()
    logarithmic = GridSpec(0.01, 20.0, 50, "log").taus()

    assert len(linear) == 400
    assert linear[0] == 0.0 and linear[-1] == 8.0
    assert logarithmic[0] == 0.01 and logarithmic[-1] == 20.0
    assert np.all(np.diff(logarithmic) > 0.0)


def test_null_sweep_saturates_for_uniform_qutrit(uniform_qutrit: PriorState) -> None:
    series = sweep_null_avg(uniform_qutrit, GridSpec(0.0, 20.0, 400))
    lhs = series.values(LHS_NAME)

    assert len(series) == 400
    assert lhs[0] == 0.0
    assert abs(lhs[-1] - LOG2_3) <= 1e-3
    assert np.all(np.diff(lhs) >= -1e-15)
    assert np.all(series.values(RELATIVE_ENTROPY) <= lhs + 1e-9)
    assert np.all(np.abs(series.values("residual")) <= 1e-9)


def test_null_sweep_reaches_ground_level_content() -> None:
    series = sweep_null_avg(make_prior([0.5, 0.3, 0.2]), GridSpec(0.0, 20.0, 200))

    assert abs(series.values(LHS_NAME)[-1] - 1.0) <= 1e-3


def test_trivial_prior_sweep_is_zero() -> None:
    series = sweep_null_avg(make_prior([1, 0, 0]), GridSpec(0.0, 8.0, 50))

    for column in (LHS_NAME, RELATIVE_ENTROPY, DECAY_TERM, "residual"):
        assert np.all(np.abs(series.values(column)) <= 1e-15)


def test_three_clicks_on_four_levels_sweep(uniform_four: PriorState) -> None:
    series = sweep_kclick_avg(uniform_four, GridSpec(0.01, 8.0, 100), 3)

    np.testing.assert_allclose(series.values(RELATIVE_ENTROPY), 2.0, rtol=0, atol=1e-12)
    assert np.all(series.values(MULTIPLICITY_TERM) == 0.0)
    assert series.metadata["k"] == 3


def test_click_sweep_from_zero_time_is_impossible(uniform_four: PriorState) -> None:
    with pytest.raises(ImpossibleOutcome):
        sweep_kclick_avg(uniform_four, GridSpec(0.0, 8.0, 20), 1)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_click_sweeps_settle_at_two_bits(uniform_four: PriorState, k: int) -> None:
    series = sweep_kclick_avg(uniform_four, GridSpec(0.01, 20.0, 200), k)

    assert abs(series.values(LHS_NAME)[-1] - 2.0) <= 1e-3
    assert np.all(np.abs(series.values("residual")) <= 1e-9)


def test_single_click_information_drops_at_small_time(uniform_four: PriorState) -> None:
    lhs = sweep_kclick_avg(uniform_four, GridSpec(0.01, 0.2, 20), 1).values(LHS_NAME)

    assert np.all(np.diff(lhs) < 0.0)


def test_parallel_sweep_matches_serial(figure_priors: list[PriorState]) -> None:
    grid = GridSpec(0.0, 8.0, 120)
    for prior in figure_priors:
        serial = sweep_null_avg(prior, grid, workers=1).to_rows()
        parallel = sweep_null_avg(prior, grid, workers=4).to_rows()
        assert serial == parallel


def test_pointwise_sweep_columns(uniform_qutrit: PriorState) -> None:
    series = sweep_pointwise(uniform_qutrit, GridSpec(0.0, 4.0, 10), k=0, n=2)
    rows = series.to_rows()

    assert series.columns()[2] == DELTA_I
    assert series.metadata["averaged"] is False
    assert series.metadata["n"] == 2
    assert rows[0]["multiplicity_term"] is None
    assert all(abs(row["residual"]) <= 1e-9 for row in rows)


def test_averaged_sweep_columns(uniform_qutrit: PriorState) -> None:
    series = sweep_null_avg(uniform_qutrit, GridSpec(0.0, 4.0, 10))

    assert series.columns() == [
        "tau",
        LHS_NAME,
        RELATIVE_ENTROPY,
        DECAY_TERM,
        "no_decay_term",
        MULTIPLICITY_TERM,
        "residual",
    ]
    assert series.metadata["grid"]["points"] == 10


def test_qubit_peak_matches_condition_root() -> None:
    prior = make_prior([0.5, 0.5])
    report = find_decay_term_peak(prior, PEAK_GRID)
    root = peak_condition_root(prior)

    assert root == pytest.approx(1.27846, abs=1e-5)
    assert abs(report.tau_star - root) <= 1e-4
    assert report.unimodal
    assert report.consistency_gap <= 1e-4
    assert report.value_at_peak == pytest.approx(decay_term_value(prior, report.tau_star))


@pytest.mark.parametrize("weights", [[1, 1, 1], [1, 1, 1, 1]])
def test_peak_satisfies_mean_over_variance_condition(weights: list[int]) -> None:
    report = find_decay_term_peak(make_prior(weights), PEAK_GRID)

    assert 0.0 < report.tau_star < 8.0
    assert report.consistency_gap <= 1e-4


def test_peak_requires_excited_support() -> None:
    with pytest.raises(NoInteriorPeak):
        find_decay_term_peak(make_prior([1, 0]), PEAK_GRID)


def test_peak_on_boundary_is_reported() -> None:
    with pytest.raises(NoInteriorPeak):
        find_decay_term_peak(make_prior([0.5, 0.5]), GridSpec(0.0, 0.5, 20))


def test_condition_root_needs_a_mixed_qubit() -> None:
    with pytest.raises(NotAQubit):
        peak_condition_root(make_prior([1, 1, 1]))
    with pytest.raises(NoInteriorPeak):
        peak_condition_root(make_prior([0, 1]))


def test_asymptote_values(figure_priors: list[PriorState]) -> None:
    expected = [LOG2_3, math.log2(5.0), 1.0, math.log2(5.0)]
    for prior, value in zip(figure_priors, expected):
        assert asymptote(prior) == pytest.approx(value, abs=1e-12)
    with pytest.raises(GroundStateUnsupported):
        asymptote(make_prior([0, 0.5, 0.5]))


@pytest.mark.parametrize("preset", ["fig2k1", "fig2k2"])
def test_click_divergence_dips_then_rises(preset: str) -> None:
    config = weakinfo_config.get_preset(preset)
    series = sweep_kclick_avg(make_prior(config["prior"]), GridSpec(**config["grid"]), config["k"])
    divergence = series.values(RELATIVE_ENTROPY)
    low = int(np.argmin(divergence))

    assert 0 < low < len(divergence) - 1
    assert divergence[0] - divergence[low] >= 0.05
    assert divergence[1] < divergence[0]
    assert divergence[-1] > divergence[0]
