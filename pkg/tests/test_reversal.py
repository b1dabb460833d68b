from __future__ import annotations

import math

import numpy as np
import pytest
from loguru import logger

from detection import DetectionContext, posterior
from fock_state import PriorState, make_prior
from infotheory import DECAY_TERM, info_from_log, null_ledger, pointwise_gain
from reversal import (
    LEVEL_RATIO,
    decay_split_ledger,
    gain_split_ledger,
    level_balance_ledger,
    level_ratio_ledger,
    level_recursion_ledger,
    lowest_levels_ledger,
    mean_gain_ledger,
    reversal_identity_suite,
    reversal_info,
    reversal_ledger,
    reversal_ledger_avg,
    reversal_prob,
)
from weakinfo_errors import DegenerateMean, DegenerateRatio, InvalidInput, UnsupportedLevel

LN2 = math.log(2.0)

MATRIX = [
    [0.5, 0.5],
    [0.9, 0.1],
    [1, 1, 1],
    [0.2, 0.4, 0.4],
    [0.5, 0.3, 0.2],
    [0.2, 0.2, 0.6],
    [0.1, 0.2, 0.3, 0.4],
    [1, 1, 1, 1, 1, 1, 1, 1],
]


def test_reversal_probability_worked_example(uniform_qutrit: PriorState) -> None:
    ctx = DetectionContext(tau=LN2)

    assert reversal_prob(uniform_qutrit, ctx) == pytest.approx(3.0 / 7.0, abs=1e-13)
    assert reversal_info(uniform_qutrit, ctx) == pytest.approx(math.log2(7.0 / 3.0), abs=1e-13)


def test_reversal_is_certain_at_zero_time() -> None:
    ctx = DetectionContext(tau=0.0)
    prior = make_prior([1, 1])

    assert reversal_prob(prior, ctx) == 1.0
    assert reversal_info(prior, ctx) == 0.0
    report = reversal_identity_suite(prior, ctx)
    assert report.max_abs_residual <= 1e-12
    assert any(label.startswith(LEVEL_RATIO) for label, _ in report.skipped)


def test_reversal_probability_decreases(uniform_qutrit: PriorState) -> None:
    taus = np.linspace(0.0, 20.0, 41)
    values = [reversal_prob(uniform_qutrit, DetectionContext(tau=float(tau))) for tau in taus]

    assert all(later <= earlier for earlier, later in zip(values, values[1:]))
    assert values[-1] < 1e-8


@pytest.mark.parametrize("weights", MATRIX)
@pytest.mark.parametrize("tau", [0.01, 0.1, LN2, 1.0, 2.0, 5.0, 10.0, 30.0])
def test_identity_suite_residuals(weights: list[float], tau: float) -> None:
    prior = make_prior(weights)
    ctx = DetectionContext(tau=tau)
    report = reversal_identity_suite(prior, ctx)

    assert report.max_abs_residual <= 1e-9
    assert all(ledger.holds(1e-9) for ledger in report.ledgers)
    assert reversal_ledger_avg(prior, ctx).holds(1e-9)


def test_level_balance_is_constant_across_levels(figure_priors: list[PriorState]) -> None:
    ctx = DetectionContext(tau=1.7)
    for prior in figure_priors:
        values = [level_balance_ledger(prior, ctx, n).lhs.bits for n in range(prior.top_level)]
        assert max(values) - min(values) == 0.0
        assert all(level_balance_ledger(prior, ctx, n).holds(1e-9) for n in range(prior.top_level))


def test_level_balance_excludes_top_level(uniform_qutrit: PriorState) -> None:
    with pytest.raises(InvalidInput):
        level_balance_ledger(uniform_qutrit, DetectionContext(tau=1.0), 2)


def test_level_ratio_undefined_at_zero_time(uniform_qutrit: PriorState) -> None:
    with pytest.raises(DegenerateRatio):
        level_ratio_ledger(uniform_qutrit, DetectionContext(tau=0.0), 1)


def test_lowest_levels_need_levels_zero_and_one() -> None:
    prior = make_prior([0.5, 0.0, 0.5])
    ctx = DetectionContext(tau=1.0)

    with pytest.raises(UnsupportedLevel):
        lowest_levels_ledger(prior, ctx)
    report = reversal_identity_suite(prior, ctx)
    assert report.max_abs_residual <= 1e-9
    assert report.skipped


def test_recursion_reproduces_pointwise_gain(uniform_four: PriorState) -> None:
    ctx = DetectionContext(tau=0.9)
    post = posterior(uniform_four, 0, ctx)
    for n in range(4):
        ledger = level_recursion_ledger(uniform_four, ctx, n)
        rebuilt = math.fsum(value for _, value in ledger.terms)
        assert rebuilt == pytest.approx(pointwise_gain(uniform_four, post, n), abs=1e-9)


def test_decay_split_closes_with_null_ledger(figure_priors: list[PriorState]) -> None:
    ctx = DetectionContext(tau=2.5)
    for prior in figure_priors:
        split = decay_split_ledger(prior, ctx)
        ground = null_ledger(prior, ctx, 0)
        balance = reversal_ledger(prior, ctx)
        # I(y_0) = Delta I(x_0|y_0) at n = 0, then N I(decay) = I(rev) + I(y_0).
        drift = split.lhs.bits - reversal_info(prior, ctx) - ground.lhs.bits
        assert abs(drift) <= 1e-9
        assert balance.term(DECAY_TERM) == pytest.approx(split.lhs.bits, abs=1e-12)


def test_gain_split_and_mean_gain(uniform_four: PriorState) -> None:
    ctx = DetectionContext(tau=1.2)
    for n in range(4):
        assert gain_split_ledger(uniform_four, ctx, n).holds(1e-9)
    assert mean_gain_ledger(uniform_four, ctx).holds(1e-9)


def test_convex_balance_degenerate_when_all_mass_on_top() -> None:
    with pytest.raises(DegenerateMean):
        reversal_ledger_avg(make_prior([0, 0, 1]), DetectionContext(tau=1.0))


def test_zero_top_level_weight_logs_warning() -> None:
    messages: list[str] = []
    handler_id = logger.add(lambda message: messages.append(str(message)), level="WARNING")
    try:
        value = reversal_prob(make_prior([0.5, 0.5, 0.0]), DetectionContext(tau=1.0))
    finally:
        logger.remove(handler_id)

    assert 0.0 < value < 1.0
    assert any("Top level carries no prior mass" in message for message in messages)


def test_report_serializes(uniform_qutrit: PriorState) -> None:
    payload = reversal_identity_suite(uniform_qutrit, DetectionContext(tau=LN2)).to_dict()

    assert payload["p_rev"] == pytest.approx(3.0 / 7.0, abs=1e-13)
    assert {"p_rev", "I_rev", "max_abs_residual", "ledgers", "skipped"} <= set(payload)
    assert info_from_log(math.log(payload["p_rev"])).bits == pytest.approx(payload["I_rev"], abs=1e-12)
