"""Reversal success probability after a null result and its information identities.

p(rev) = [p(decay)]^N / p(y_0), with N the top level index of the configured
state vector. Only the probability and its information content
I(rev) = -log2 p(rev) are used; the reversal operation itself is not simulated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

from detection import DetectionContext, log_outcome_prob, posterior
from fock_state import PriorState, support
from infotheory import (
    DECAY_TERM,
    DELTA_I,
    LN2,
    RELATIVE_ENTROPY,
    REVERSAL_TERM,
    InfoLedger,
    InfoValue,
    decay_info,
    info_from_log,
    mean_excitation,
    null_gain,
    relative_entropy,
)
from weakinfo_errors import DegenerateMean, DegenerateRatio, InvalidInput, UnsupportedLevel
from weakinfo_log import _log_warning

REVERSAL_BALANCE = "reversal_balance"
LEVEL_BALANCE = "reversal_level_balance"
DECAY_SPLIT = "reversal_decay_split"
GAIN_SPLIT = "reversal_gain_split"
LEVEL_RATIO = "reversal_level_ratio"
LOWEST_LEVELS = "reversal_lowest_levels"
LEVEL_RECURSION = "reversal_level_recursion"
MEAN_GAIN = "reversal_mean_gain"
CONVEX_BALANCE = "reversal_convex_balance"

DELTA_I_X0 = "delta_I_x0"
DELTA_I_X1 = "delta_I_x1"


@dataclass(frozen=True)
class ReversalReport:
    p_rev: float
    info_rev: float
    ledgers: Tuple[InfoLedger, ...]
    max_abs_residual: float
    skipped: Tuple[Tuple[str, str], ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p_rev": self.p_rev,
            "I_rev": self.info_rev,
            "max_abs_residual": self.max_abs_residual,
            "ledgers": [ledger.to_dict() for ledger in self.ledgers],
            "skipped": [{"identity": name, "reason": reason} for name, reason in self.skipped],
        }


def _log_reversal_prob(prior: PriorState, ctx: DetectionContext) -> float:
    value = -prior.top_level * ctx.tau - log_outcome_prob(prior, 0, ctx)
    return min(value, 0.0)


def reversal_prob(prior: PriorState, ctx: DetectionContext) -> float:
    if prior.probs[prior.top_level] == 0.0:
        _log_warning(
            "Top level carries no prior mass; p(rev) still uses N of the configured vector.",
            top_level=prior.top_level,
            tau=ctx.tau,
        )
    return math.exp(_log_reversal_prob(prior, ctx))


def reversal_info(prior: PriorState, ctx: DetectionContext) -> float:
    return -_log_reversal_prob(prior, ctx) / LN2 + 0.0


def _require_levels(prior: PriorState, *levels: int) -> None:
    for level in levels:
        if prior.probs[level] <= 0.0:
            raise UnsupportedLevel(f"level {level} has zero prior probability")


def _context(ctx: DetectionContext, **extra: Any) -> Tuple[Tuple[str, Any], ...]:
    return (("tau", ctx.tau), ("k", 0), *extra.items())


def reversal_ledger(prior: PriorState, ctx: DetectionContext) -> InfoLedger:
    """I(y_0) = N I(decay) - I(rev)."""

    top = prior.top_level
    return InfoLedger(
        identity_name=REVERSAL_BALANCE,
        lhs=info_from_log(log_outcome_prob(prior, 0, ctx)),
        terms=(
            (DECAY_TERM, top * decay_info(ctx)),
            (REVERSAL_TERM, -reversal_info(prior, ctx)),
        ),
        context=_context(ctx),
    )


def level_balance_ledger(prior: PriorState, ctx: DetectionContext, n: int) -> InfoLedger:
    """I(y_0) = [N Delta I(x_n|y_0) + n I(rev)] / (N - n), for n < N."""

    top = prior.top_level
    gain = null_gain(prior, ctx, n)
    if n >= top:
        raise InvalidInput(f"level {n} must lie below the top level {top}")
    return InfoLedger(
        identity_name=LEVEL_BALANCE,
        lhs=info_from_log(log_outcome_prob(prior, 0, ctx)),
        terms=(
            (DELTA_I, top * gain / (top - n)),
            (REVERSAL_TERM, n * reversal_info(prior, ctx) / (top - n)),
        ),
        context=_context(ctx, n=n),
    )


def decay_split_ledger(prior: PriorState, ctx: DetectionContext) -> InfoLedger:
    """N I(decay) = I(rev) + Delta I(x_0|y_0)."""

    _require_levels(prior, 0)
    top = prior.top_level
    return InfoLedger(
        identity_name=DECAY_SPLIT,
        lhs=InfoValue(top * decay_info(ctx)),
        lhs_name=DECAY_TERM,
        terms=(
            (REVERSAL_TERM, reversal_info(prior, ctx)),
            (DELTA_I_X0, null_gain(prior, ctx, 0)),
        ),
        context=_context(ctx),
    )


def gain_split_ledger(prior: PriorState, ctx: DetectionContext, n: int) -> InfoLedger:
    """Delta I(x_n|y_0) = (N-n)/N Delta I(x_0|y_0) - (n/N) I(rev)."""

    _require_levels(prior, 0)
    top = prior.top_level
    return InfoLedger(
        identity_name=GAIN_SPLIT,
        lhs=InfoValue(null_gain(prior, ctx, n)),
        lhs_name=DELTA_I,
        terms=(
            (DELTA_I_X0, (top - n) / top * null_gain(prior, ctx, 0)),
            (REVERSAL_TERM, -n / top * reversal_info(prior, ctx)),
        ),
        context=_context(ctx, n=n),
    )


def level_ratio_ledger(prior: PriorState, ctx: DetectionContext, n: int) -> InfoLedger:
    """n/N = [Delta I(x_0|y_0) - Delta I(x_n|y_0)] / [I(rev) + Delta I(x_0|y_0)], t > 0.

    Both sides are dimensionless; the ledger reuses the bits slot for them.
    """

    if ctx.tau == 0.0:
        raise DegenerateRatio("the level-ratio identity needs tau > 0")
    _require_levels(prior, 0)
    top = prior.top_level
    gain_0 = null_gain(prior, ctx, 0)
    gain_n = null_gain(prior, ctx, n)
    return InfoLedger(
        identity_name=LEVEL_RATIO,
        lhs=InfoValue(n / top),
        lhs_name="level_ratio",
        terms=(("info_ratio", (gain_0 - gain_n) / (reversal_info(prior, ctx) + gain_0)),),
        context=_context(ctx, n=n),
    )


def lowest_levels_ledger(prior: PriorState, ctx: DetectionContext) -> InfoLedger:
    """I(rev) = (N-1) Delta I(x_0|y_0) - N Delta I(x_1|y_0)."""

    _require_levels(prior, 0, 1)
    top = prior.top_level
    return InfoLedger(
        identity_name=LOWEST_LEVELS,
        lhs=InfoValue(reversal_info(prior, ctx)),
        lhs_name="I_rev",
        terms=(
            (DELTA_I_X0, (top - 1) * null_gain(prior, ctx, 0)),
            (DELTA_I_X1, -top * null_gain(prior, ctx, 1)),
        ),
        context=_context(ctx),
    )


def level_recursion_ledger(prior: PriorState, ctx: DetectionContext, n: int) -> InfoLedger:
    """Delta I(x_n|y_0) = n Delta I(x_1|y_0) - (n-1) Delta I(x_0|y_0)."""

    _require_levels(prior, 0, 1)
    return InfoLedger(
        identity_name=LEVEL_RECURSION,
        lhs=InfoValue(null_gain(prior, ctx, n)),
        lhs_name=DELTA_I,
        terms=(
            (DELTA_I_X1, n * null_gain(prior, ctx, 1)),
            (DELTA_I_X0, -(n - 1) * null_gain(prior, ctx, 0)),
        ),
        context=_context(ctx, n=n),
    )


def mean_gain_ledger(prior: PriorState, ctx: DetectionContext) -> InfoLedger:
    """<Delta I(x_n|y_0)> = (N-<n>)/N Delta I(x_0|y_0) - (<n>/N) I(rev)."""

    _require_levels(prior, 0)
    top = prior.top_level
    post = posterior(prior, 0, ctx)
    mean_n = mean_excitation(post)
    return InfoLedger(
        identity_name=MEAN_GAIN,
        lhs=InfoValue(relative_entropy(post, prior)),
        lhs_name="mean_delta_I",
        terms=(
            (DELTA_I_X0, (top - mean_n) / top * null_gain(prior, ctx, 0)),
            (REVERSAL_TERM, -mean_n / top * reversal_info(prior, ctx)),
        ),
        context=_context(ctx),
    )


def reversal_ledger_avg(prior: PriorState, ctx: DetectionContext) -> InfoLedger:
    """I(y_0) = N/(N-<n>) D + <n>/(N-<n>) I(rev)."""

    top = prior.top_level
    post = posterior(prior, 0, ctx)
    mean_n = mean_excitation(post)
    if mean_n >= top * (1.0 - 1e-12):
        raise DegenerateMean(f"<n> = {mean_n!r} equals the top level N = {top}")
    gap = top - mean_n
    return InfoLedger(
        identity_name=CONVEX_BALANCE,
        lhs=info_from_log(log_outcome_prob(prior, 0, ctx)),
        terms=(
            (RELATIVE_ENTROPY, top / gap * relative_entropy(post, prior)),
            (REVERSAL_TERM, mean_n / gap * reversal_info(prior, ctx)),
        ),
        context=_context(ctx),
    )


def reversal_identity_suite(prior: PriorState, ctx: DetectionContext) -> ReversalReport:
    """Evaluate every reversal identity that applies to this prior and time.

    Identities outside their domain (n = N in the level balance, tau = 0 in the
    level ratio, unsupported levels 0 or 1) are recorded in ``skipped``.
    """

    top = prior.top_level
    levels = sorted(support(prior))
    ledgers: List[InfoLedger] = [reversal_ledger(prior, ctx)]
    skipped: List[Tuple[str, str]] = []

    def attempt(name: str, build: Any, *args: Any) -> None:
        try:
            ledgers.append(build(prior, ctx, *args))
        except (UnsupportedLevel, DegenerateRatio) as exc:
            label = name if not args else f"{name}[n={args[0]}]"
            skipped.append((label, f"{type(exc).__name__}: {exc}"))

    for n in levels:
        if n < top:
            attempt(LEVEL_BALANCE, level_balance_ledger, n)
    attempt(DECAY_SPLIT, decay_split_ledger)
    for n in levels:
        attempt(GAIN_SPLIT, gain_split_ledger, n)
    for n in levels:
        attempt(LEVEL_RATIO, level_ratio_ledger, n)
    attempt(LOWEST_LEVELS, lowest_levels_ledger)
    for n in levels:
        attempt(LEVEL_RECURSION, level_recursion_ledger, n)
    attempt(MEAN_GAIN, mean_gain_ledger)

    residuals = [abs(ledger.residual) for ledger in ledgers if ledger.residual is not None]
    return ReversalReport(
        p_rev=reversal_prob(prior, ctx),
        info_rev=reversal_info(prior, ctx),
        ledgers=tuple(ledgers),
        max_abs_residual=max(residuals) if residuals else 0.0,
        skipped=tuple(skipped),
    )
