"""Controlled exceptions raised by the weak-measurement toolkit.

Every class carries the process exit code the CLI reports for it:
0 success, 2 configuration/input error, 3 impossible outcome,
4 invariant failure.
"""
from __future__ import annotations

from typing import Iterable, Tuple


class WeakInfoError(RuntimeError):
    """Base controlled exception."""

    exit_code = 2


class ConfigError(WeakInfoError):
    """Unreadable or inconsistent run configuration."""


class InvalidInput(WeakInfoError):
    """An argument violates the domain of an operation."""


class EmptyOrSingleLevel(InvalidInput):
    """A prior needs at least two levels."""


class NegativeWeight(InvalidInput):
    """Prior weights must be finite and nonnegative."""


class AllZero(InvalidInput):
    """Prior weights sum to zero."""


class InvalidAmplitude(InvalidInput):
    """Amplitude magnitudes are complex, negative, non-finite or not normalized."""


class InvalidContext(InvalidInput):
    """Decay rate or elapsed time outside their domain."""


class OutOfRange(InvalidInput):
    """A probability outside [0, 1]."""


class UnsupportedLevel(InvalidInput):
    """The level has zero prior probability."""


class SupportViolation(InvalidInput):
    """A distribution puts mass where it is not allowed to."""


class LevelBelowClicks(InvalidInput):
    """Level n cannot emit k > n photons."""


class NotAQubit(InvalidInput):
    """The operation is defined for two-level priors only."""


class DegenerateRatio(InvalidInput):
    """The level-ratio identity is undefined at tau = 0."""


class DegenerateMean(InvalidInput):
    """The convex reversal identity is undefined when <n> equals N."""


class TooFewTrials(InvalidInput):
    """Monte Carlo estimates need at least 10^4 trials."""


class OutcomeTooRare(InvalidInput):
    """Too few samples of the conditioning outcome."""


class NoInteriorPeak(InvalidInput):
    """The decay term has no interior maximum on the grid."""


class GroundStateUnsupported(InvalidInput):
    """The long-time limit is infinite when p(x_0) = 0."""


class InvalidGrid(InvalidInput):
    """Malformed time grid."""


class ImpossibleOutcome(WeakInfoError):
    """The requested click count has zero probability."""

    exit_code = 3


class InvariantFailure(WeakInfoError):
    """One or more verification families failed."""

    exit_code = 4

    def __init__(self, families: Iterable[str]) -> None:
        self.families: Tuple[str, ...] = tuple(families)
        super().__init__("failed families: " + ", ".join(self.families))
