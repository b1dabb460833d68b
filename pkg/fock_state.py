"""Fock-state priors p(x_n) = |c_n|^2 and amplitude magnitudes |c_n|.

Level indices run n = 0..N, so a vector of length L describes a system whose
top level is N = L - 1. Phases never enter any information quantity, hence
only magnitudes are stored and complex input is rejected here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, FrozenSet, List, Sequence, Type

import numpy as np

from weakinfo_errors import (
    AllZero,
    EmptyOrSingleLevel,
    InvalidAmplitude,
    InvalidInput,
    NegativeWeight,
)

NORMALIZATION_TOLERANCE = 1e-12


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


def real_vector(values: Any, error_cls: Type[InvalidInput], label: str) -> np.ndarray:
    """Coerce *values* to a finite, nonnegative float vector with at least two levels."""

    try:
        raw = np.asarray(values)
    except Exception as exc:  # pragma: no cover
        raise error_cls(f"{label}: cannot read values ({exc})") from exc
    if np.iscomplexobj(raw):
        raise error_cls(f"{label}: complex entries are not accepted, pass magnitudes")
    try:
        arr = raw.astype(float).ravel()
    except (TypeError, ValueError) as exc:
        raise error_cls(f"{label}: entries must be real numbers") from exc
    if arr.size < 2:
        raise EmptyOrSingleLevel(f"{label}: need at least 2 levels, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise error_cls(f"{label}: entries must be finite")
    if np.any(arr < 0):
        raise error_cls(f"{label}: entries must be nonnegative")
    return arr


def check_probability_vector(values: Any, label: str) -> np.ndarray:
    arr = real_vector(values, NegativeWeight, label)
    total = math.fsum(arr)
    if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
        raise InvalidInput(f"{label}: entries sum to {total!r}, expected 1")
    return _frozen(arr)


@dataclass(frozen=True, eq=False)
class PriorState:
    """Prior weights over the Fock levels 0..N."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "probs", check_probability_vector(self.probs, "prior"))

    @property
    def dim(self) -> int:
        return int(self.probs.size)

    @property
    def top_level(self) -> int:
        return self.dim - 1

    def as_list(self) -> List[float]:
        return [float(value) for value in self.probs]

    def __len__(self) -> int:
        return self.dim


@dataclass(frozen=True, eq=False)
class AmplitudeVector:
    """Magnitudes |c_n| of a pure single-mode state."""

    mags: np.ndarray

    def __post_init__(self) -> None:
        arr = real_vector(self.mags, InvalidAmplitude, "amplitudes")
        norm = math.fsum(arr * arr)
        if abs(norm - 1.0) > NORMALIZATION_TOLERANCE:
            raise InvalidAmplitude(f"amplitudes: squared magnitudes sum to {norm!r}, expected 1")
        object.__setattr__(self, "mags", _frozen(arr))

    @classmethod
    def from_prior(cls, prior: PriorState) -> "AmplitudeVector":
        return cls(np.sqrt(prior.probs))

    @property
    def dim(self) -> int:
        return int(self.mags.size)


def make_prior(weights: Sequence[float]) -> PriorState:
    arr = real_vector(weights, NegativeWeight, "weights")
    peak = float(arr.max())
    if peak <= 0.0:
        raise AllZero("weights: all entries are zero")
    # max 1 keeps fsum finite near the float limit
    scaled = arr / peak
    return PriorState(scaled / math.fsum(scaled))


def prior_from_amplitudes(amplitudes: AmplitudeVector) -> PriorState:
    return PriorState(amplitudes.mags * amplitudes.mags)


def support(prior: PriorState) -> FrozenSet[int]:
    return frozenset(int(n) for n in np.flatnonzero(prior.probs > 0.0))
