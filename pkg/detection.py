"""Likelihoods, outcome probabilities and posteriors for the click operators M_k.

All quantities are evaluated in log domain:

    log p(y_k|x_n) = log C(n, k) + k log(1 - e^-tau) - (n - k) tau

and the evidence p(y_k) is a log-sum-exp over the prior support. Direct-domain
values are obtained by exponentiation. ``tau = 2 gamma t`` is the canonical
time variable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Union

import numpy as np
from scipy.special import gammaln, logsumexp

from fock_state import AmplitudeVector, PriorState, check_probability_vector
from weakinfo_errors import ImpossibleOutcome, InvalidContext, InvalidInput


@dataclass(frozen=True)
class DetectionContext:
    """Decay rate gamma (1/s) and rescaled time tau = 2 gamma t."""

    tau: float
    gamma: float = 0.5

    def __post_init__(self) -> None:
        tau = float(self.tau)
        gamma = float(self.gamma)
        if not math.isfinite(gamma) or gamma <= 0.0:
            raise InvalidContext(f"gamma must be finite and > 0, got {gamma!r}")
        if not math.isfinite(tau) or tau < 0.0:
            raise InvalidContext(f"tau must be finite and >= 0, got {tau!r}")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "gamma", gamma)

    @classmethod
    def from_time(cls, gamma: float, t: float) -> "DetectionContext":
        gamma = float(gamma)
        t = float(t)
        if not math.isfinite(t) or t < 0.0:
            raise InvalidContext(f"t must be finite and >= 0, got {t!r}")
        if not math.isfinite(gamma) or gamma <= 0.0:
            raise InvalidContext(f"gamma must be finite and > 0, got {gamma!r}")
        return cls(tau=2.0 * gamma * t, gamma=gamma)

    @property
    def t(self) -> float:
        return self.tau / (2.0 * self.gamma)


@dataclass(frozen=True)
class Outcome:
    """Number of detector clicks registered in [0, t]."""

    k: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "k", _clicks(self.k))


ClickCount = Union[int, Outcome]


@dataclass(frozen=True, eq=False)
class Distribution:
    """Validated probability vector over levels 0..N (posterior or prior)."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "probs", check_probability_vector(self.probs, "distribution"))

    @property
    def dim(self) -> int:
        return int(self.probs.size)

    def as_list(self) -> List[float]:
        return [float(value) for value in self.probs]


def _clicks(k: ClickCount) -> int:
    if isinstance(k, Outcome):
        return k.k
    if isinstance(k, bool) or int(k) != k:
        raise InvalidInput(f"click count must be an integer, got {k!r}")
    if k < 0:
        raise InvalidInput(f"click count must be >= 0, got {k!r}")
    return int(k)


def survival_prob(ctx: DetectionContext) -> float:
    """p(decay) = e^-tau: one excitation has not escaped by time t."""

    return math.exp(-ctx.tau)


def log_survival(ctx: DetectionContext) -> float:
    return -ctx.tau


def escape_prob(ctx: DetectionContext) -> float:
    """p(no decay) = 1 - e^-tau, evaluated with expm1."""

    return -math.expm1(-ctx.tau)


def log_escape(ctx: DetectionContext) -> float:
    if ctx.tau == 0.0:
        return -math.inf
    return math.log(-math.expm1(-ctx.tau))


def log_binomial(n: np.ndarray, k: int) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def log_outcome_likelihoods(dim: int, k: ClickCount, ctx: DetectionContext) -> np.ndarray:
    """log p(y_k|x_n) for n = 0..dim-1; -inf where n < k."""

    k = _clicks(k)
    levels = np.arange(dim, dtype=float)
    out = np.full(dim, -np.inf)
    allowed = levels >= k
    if not allowed.any():
        return out
    n = levels[allowed]
    escape_part = k * log_escape(ctx) if k > 0 else 0.0
    out[allowed] = log_binomial(n, k) + escape_part - (n - k) * ctx.tau
    return out


def log_outcome_likelihood(n: int, k: ClickCount, ctx: DetectionContext) -> float:
    if int(n) != n or n < 0:
        raise InvalidInput(f"level must be a nonnegative integer, got {n!r}")
    return float(log_outcome_likelihoods(int(n) + 1, k, ctx)[int(n)])


def outcome_likelihood(n: int, k: ClickCount, ctx: DetectionContext) -> float:
    return math.exp(log_outcome_likelihood(n, k, ctx))


def outcome_likelihood_direct(n: int, k: ClickCount, ctx: DetectionContext) -> float:
    """Reference path without logarithms: C(n,k) (1-e^-tau)^k (e^-tau)^(n-k)."""

    k = _clicks(k)
    if k > n:
        return 0.0
    return math.comb(n, k) * escape_prob(ctx) ** k * survival_prob(ctx) ** (n - k)


def log_joint(prior: PriorState, k: ClickCount, ctx: DetectionContext) -> np.ndarray:
    """log p(x_n) + log p(y_k|x_n); -inf off the prior support."""

    with np.errstate(divide="ignore"):
        log_prior = np.log(prior.probs)
    return log_prior + log_outcome_likelihoods(prior.dim, k, ctx)


def log_outcome_prob(prior: PriorState, k: ClickCount, ctx: DetectionContext) -> float:
    k = _clicks(k)
    if k == 0 and ctx.tau == 0.0:
        return 0.0
    joint = log_joint(prior, k, ctx)
    finite = np.isfinite(joint)
    if not finite.any():
        return -math.inf
    return min(float(logsumexp(joint[finite])), 0.0)


def outcome_prob(prior: PriorState, k: ClickCount, ctx: DetectionContext) -> float:
    return math.exp(log_outcome_prob(prior, k, ctx))


def outcome_prob_direct(prior: PriorState, k: ClickCount, ctx: DetectionContext) -> float:
    return math.fsum(
        float(prior.probs[n]) * outcome_likelihood_direct(n, k, ctx) for n in range(prior.dim)
    )


def outcome_pmf(prior: PriorState, ctx: DetectionContext) -> np.ndarray:
    """p(y_k) for k = 0..N."""

    return np.array([outcome_prob(prior, k, ctx) for k in range(prior.dim)])


def log_posterior(prior: PriorState, k: ClickCount, ctx: DetectionContext) -> np.ndarray:
    k = _clicks(k)
    log_evidence = log_outcome_prob(prior, k, ctx)
    if log_evidence == -math.inf:
        raise ImpossibleOutcome(
            f"p(y_{k}) = 0 for a {prior.dim}-level prior at tau={ctx.tau!r}"
        )
    return log_joint(prior, k, ctx) - log_evidence


def posterior(prior: PriorState, k: ClickCount, ctx: DetectionContext) -> Distribution:
    return Distribution(np.exp(log_posterior(prior, k, ctx)))


def post_measurement_amplitudes(
    amplitudes: AmplitudeVector, k: ClickCount, ctx: DetectionContext
) -> AmplitudeVector:
    """Magnitudes after outcome k: |c_n| sqrt(p(y_k|x_n)), renormalized."""

    k = _clicks(k)
    with np.errstate(divide="ignore"):
        log_mags = np.log(amplitudes.mags) + 0.5 * log_outcome_likelihoods(amplitudes.dim, k, ctx)
    finite = np.isfinite(log_mags)
    if not finite.any():
        raise ImpossibleOutcome(f"M_{k} annihilates this state at tau={ctx.tau!r}")
    log_norm = 0.5 * float(logsumexp(2.0 * log_mags[finite]))
    return AmplitudeVector(np.exp(log_mags - log_norm))
