"""Information functionals and the conservation ledgers for null and k-click outcomes.

All information is in bits. A ledger holds one instance of an identity

    lhs = sum(terms)

together with its residual, which is the quantity the test-suite checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy.special import rel_entr

from detection import (
    DetectionContext,
    Distribution,
    log_binomial,
    log_escape,
    log_outcome_likelihoods,
    log_outcome_prob,
    posterior,
)
from fock_state import PriorState
from weakinfo_errors import (
    ImpossibleOutcome,
    InvalidContext,
    InvalidInput,
    LevelBelowClicks,
    NotAQubit,
    OutOfRange,
    SupportViolation,
    UnsupportedLevel,
)

LN2 = math.log(2.0)
RESIDUAL_TOLERANCE = 1e-9

LHS_NAME = "I_outcome"
DELTA_I = "delta_I"
DECAY_TERM = "decay_term"
NO_DECAY_TERM = "no_decay_term"
MULTIPLICITY_TERM = "multiplicity_term"
RELATIVE_ENTROPY = "relative_entropy"
REVERSAL_TERM = "reversal_term"

NULL_POINTWISE = "null_pointwise"
NULL_AVERAGED = "null_averaged"
KCLICK_POINTWISE = "kclick_pointwise"
KCLICK_AVERAGED = "kclick_averaged"


@dataclass(frozen=True)
class InfoValue:
    """Information content in bits; +inf only for zero-probability events."""

    bits: float

    @property
    def finite(self) -> bool:
        return math.isfinite(self.bits)

    def __float__(self) -> float:
        return self.bits


@dataclass(frozen=True)
class InfoLedger:
    identity_name: str
    lhs: InfoValue
    terms: Tuple[Tuple[str, float], ...]
    lhs_name: str = LHS_NAME
    context: Tuple[Tuple[str, Any], ...] = ()

    @property
    def residual(self) -> Optional[float]:
        """lhs - sum(terms), or None when any entry is non-finite."""

        values = [self.lhs.bits] + [value for _, value in self.terms]
        if not all(math.isfinite(value) for value in values):
            return None
        return self.lhs.bits - math.fsum(value for _, value in self.terms)

    def holds(self, tolerance: float = RESIDUAL_TOLERANCE) -> bool:
        residual = self.residual
        return residual is not None and abs(residual) <= tolerance

    def term(self, name: str) -> float:
        for term_name, value in self.terms:
            if term_name == name:
                return value
        raise KeyError(name)

    def term_names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.terms)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "identity": self.identity_name,
            **dict(self.context),
            "lhs_name": self.lhs_name,
            "lhs": self.lhs.bits,
            "terms": [[name, value] for name, value in self.terms],
            "residual": self.residual,
        }


@dataclass(frozen=True)
class LedgerRow:
    """One sample point of a time series."""

    tau: float
    ledger: InfoLedger


def _bits(value: float) -> float:
    # -0.0 -> 0.0
    return value + 0.0


def info_content(p: float) -> InfoValue:
    p = float(p)
    if not (0.0 <= p <= 1.0):
        raise OutOfRange(f"probability must lie in [0, 1], got {p!r}")
    if p == 0.0:
        return InfoValue(math.inf)
    return InfoValue(_bits(-math.log2(p)))


def info_from_log(log_p: float) -> InfoValue:
    """I = -log2 p from a natural-log probability."""

    return InfoValue(_bits(-log_p / LN2))


def decay_info(ctx: DetectionContext) -> float:
    """I(decay) = -log2 e^-tau, taken from tau directly."""

    return ctx.tau / LN2


def no_decay_info(ctx: DetectionContext) -> float:
    """I(no decay) = -log2(1 - e^-tau); +inf at tau = 0."""

    return _bits(-log_escape(ctx) / LN2)


def _check_level(n: int, dim: int) -> int:
    if isinstance(n, bool) or int(n) != n or not 0 <= n < dim:
        raise InvalidInput(f"level must be an integer in [0, {dim - 1}], got {n!r}")
    return int(n)


def _supported_level(prior: PriorState, n: int) -> int:
    n = _check_level(n, prior.dim)
    if prior.probs[n] <= 0.0:
        raise UnsupportedLevel(f"level {n} has zero prior probability")
    return n


def _check_same_dim(post: Distribution, prior: PriorState) -> None:
    if post.dim != prior.dim:
        raise InvalidInput(f"dimension mismatch: posterior {post.dim}, prior {prior.dim}")


def pointwise_gain(prior: PriorState, post: Distribution, n: int) -> float:
    """Delta I(x_n|y) = log2 p(x_n|y)/p(x_n), signed bits."""

    _check_same_dim(post, prior)
    n = _supported_level(prior, n)
    if post.probs[n] == 0.0:
        return -math.inf
    return _bits(math.log2(float(post.probs[n]) / float(prior.probs[n])))


def relative_entropy(post: Distribution, prior: PriorState) -> float:
    """D(post || prior) in bits with 0 log 0 = 0."""

    _check_same_dim(post, prior)
    if np.any((post.probs > 0.0) & (prior.probs == 0.0)):
        raise SupportViolation("posterior puts mass outside the prior support")
    value = math.fsum(rel_entr(post.probs, prior.probs)) / LN2
    # Gibbs: exact value is >= 0
    return max(value, 0.0)


def mean_excitation(post: Distribution) -> float:
    levels = np.arange(post.dim, dtype=float)
    return math.fsum(levels * post.probs)


def excitation_variance(post: Distribution) -> float:
    levels = np.arange(post.dim, dtype=float)
    mean = mean_excitation(post)
    return math.fsum((levels - mean) ** 2 * post.probs)


def mean_multiplicity_info(post: Distribution, k: int) -> float:
    """<I(W)> = sum_n log2 C(n, k) p(x_n|y_k)."""

    if int(k) != k or k < 0:
        raise InvalidInput(f"click count must be a nonnegative integer, got {k!r}")
    k = int(k)
    if np.any(post.probs[: min(k, post.dim)] > 0.0):
        raise SupportViolation(f"distribution has mass on levels below k={k}")
    if k >= post.dim:
        return 0.0
    levels = np.arange(k, post.dim)
    weights = log_binomial(levels, k) / LN2
    return _bits(math.fsum(weights * post.probs[k:]))


def _null_gain(prior: PriorState, ctx: DetectionContext, n: int, log_evidence: float) -> float:
    log_likelihood = log_outcome_likelihoods(prior.dim, 0, ctx)[n]
    return _bits((log_likelihood - log_evidence) / LN2)


def null_gain(prior: PriorState, ctx: DetectionContext, n: int) -> float:
    """Delta I(x_n|y_0) evaluated in log domain as log2 p(y_0|x_n)/p(y_0)."""

    n = _supported_level(prior, n)
    return _null_gain(prior, ctx, n, log_outcome_prob(prior, 0, ctx))


def null_ledger(prior: PriorState, ctx: DetectionContext, n: int) -> InfoLedger:
    """I(y_0) = Delta I(x_n|y_0) + n I(decay)."""

    n = _supported_level(prior, n)
    log_evidence = log_outcome_prob(prior, 0, ctx)
    return InfoLedger(
        identity_name=NULL_POINTWISE,
        lhs=info_from_log(log_evidence),
        terms=(
            (DELTA_I, _null_gain(prior, ctx, n, log_evidence)),
            (DECAY_TERM, _bits(n * decay_info(ctx))),
        ),
        context=(("tau", ctx.tau), ("k", 0), ("n", n)),
    )


def null_ledger_avg(prior: PriorState, ctx: DetectionContext) -> InfoLedger:
    """I(y_0) = D(p(x_n|y_0) || p(x_n)) + <n> I(decay)."""

    log_evidence = log_outcome_prob(prior, 0, ctx)
    post = posterior(prior, 0, ctx)
    return InfoLedger(
        identity_name=NULL_AVERAGED,
        lhs=info_from_log(log_evidence),
        terms=(
            (RELATIVE_ENTROPY, relative_entropy(post, prior)),
            (DECAY_TERM, _bits(mean_excitation(post) * decay_info(ctx))),
        ),
        context=(("tau", ctx.tau), ("k", 0)),
    )


def _no_decay_term(k: int, ctx: DetectionContext) -> float:
    # 0 * inf at tau = 0 is 0 for the null outcome
    if k == 0:
        return 0.0
    return k * no_decay_info(ctx)


def kclick_ledger(prior: PriorState, ctx: DetectionContext, k: int, n: int) -> InfoLedger:
    """I(y_k) = Delta I(x_n|y_k) + (n-k) I(decay) + k I(no decay) - I(W)."""

    if int(k) != k or k < 0:
        raise InvalidInput(f"click count must be a nonnegative integer, got {k!r}")
    k = int(k)
    n = _supported_level(prior, n)
    if n < k:
        raise LevelBelowClicks(f"level {n} cannot emit {k} photons")
    log_evidence = log_outcome_prob(prior, k, ctx)
    if log_evidence == -math.inf:
        raise ImpossibleOutcome(f"p(y_{k}) = 0 at tau={ctx.tau!r}")
    log_likelihood = log_outcome_likelihoods(prior.dim, k, ctx)[n]
    return InfoLedger(
        identity_name=KCLICK_POINTWISE,
        lhs=info_from_log(log_evidence),
        terms=(
            (DELTA_I, _bits((log_likelihood - log_evidence) / LN2)),
            (DECAY_TERM, _bits((n - k) * decay_info(ctx))),
            (NO_DECAY_TERM, _no_decay_term(k, ctx)),
            (MULTIPLICITY_TERM, _bits(-float(log_binomial(np.array([n]), k)[0]) / LN2)),
        ),
        context=(("tau", ctx.tau), ("k", k), ("n", n)),
    )


def kclick_ledger_avg(prior: PriorState, ctx: DetectionContext, k: int) -> InfoLedger:
    """I(y_k) = D + (<n>-k) I(decay) + k I(no decay) - <I(W)>."""

    if int(k) != k or k < 0:
        raise InvalidInput(f"click count must be a nonnegative integer, got {k!r}")
    k = int(k)
    post = posterior(prior, k, ctx)
    log_evidence = log_outcome_prob(prior, k, ctx)
    return InfoLedger(
        identity_name=KCLICK_AVERAGED,
        lhs=info_from_log(log_evidence),
        terms=(
            (RELATIVE_ENTROPY, relative_entropy(post, prior)),
            (DECAY_TERM, _bits((mean_excitation(post) - k) * decay_info(ctx))),
            (NO_DECAY_TERM, _no_decay_term(k, ctx)),
            (MULTIPLICITY_TERM, _bits(-mean_multiplicity_info(post, k))),
        ),
        context=(("tau", ctx.tau), ("k", k)),
    )


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma <= 0.0:
        raise InvalidContext(f"gamma must be finite and > 0, got {gamma!r}")
    return gamma


def small_time_rate(prior_qubit: PriorState, gamma: float) -> float:
    """d/dt Delta I(x_0|y_0) at t = 0 for a qubit: 2 gamma |c_1|^2 / ln 2 bits/s."""

    if prior_qubit.dim != 2:
        raise NotAQubit(f"expected a 2-level prior, got {prior_qubit.dim} levels")
    return 2.0 * _check_gamma(gamma) * float(prior_qubit.probs[1]) / LN2


def initial_gain_rate(prior: PriorState, gamma: float, n: int) -> float:
    """d/dt Delta I(x_n|y_0) at t = 0 = 2 gamma (<n>_prior - n) / ln 2 bits/s."""

    n = _supported_level(prior, n)
    levels = np.arange(prior.dim, dtype=float)
    prior_mean = math.fsum(levels * prior.probs)
    return 2.0 * _check_gamma(gamma) * (prior_mean - n) / LN2


def small_time_slope(prior: PriorState, gamma: float, n: int = 0, h: float = 1e-3) -> float:
    """Richardson-extrapolated slope of Delta I(x_n|y_0) at t = 0, bits/s."""

    n = _supported_level(prior, n)
    gamma = _check_gamma(gamma)

    def quotient(step: float) -> float:
        ctx = DetectionContext(tau=step, gamma=gamma)
        return _null_gain(prior, ctx, n, log_outcome_prob(prior, 0, ctx)) / step

    per_tau = 2.0 * quotient(h / 2.0) - quotient(h)
    return 2.0 * gamma * per_tau


def log_derivative_mean(prior: PriorState, ctx: DetectionContext, h: float = 1e-5) -> float:
    """-(1/2 gamma) d/dt ln p(y_0) = -d/dtau ln p(y_0), by finite differences."""

    def log_evidence(tau: float) -> float:
        return log_outcome_prob(prior, 0, DetectionContext(tau=tau, gamma=ctx.gamma))

    tau = ctx.tau
    if tau >= h:
        slope = (log_evidence(tau + h) - log_evidence(tau - h)) / (2.0 * h)
    else:
        slope = (
            -3.0 * log_evidence(tau) + 4.0 * log_evidence(tau + h) - log_evidence(tau + 2.0 * h)
        ) / (2.0 * h)
    return _bits(-slope)
