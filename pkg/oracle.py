"""Monte Carlo photon-escape oracle for the closed-form detection probabilities.

Every excitation escapes on its own with probability 1 - e^-tau and each escape
is one click, so click counts are drawn photon by photon. Nothing here calls the
closed forms in ``detection``.

Random streams: numpy ``Generator`` over the PCG64 bit generator. A run with
seed ``s`` split over ``W`` workers gives worker ``w`` the stream
``SeedSequence(s, spawn_key=(w,))``; worker ``w`` handles ``trials // W`` trials
plus one more when ``w < trials % W``. Per-worker counts are summed, so results
are bit-reproducible for a fixed (seed, workers) pair.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from detection import DetectionContext, Distribution
from fock_state import PriorState
from weakinfo_errors import InvalidInput, OutcomeTooRare, TooFewTrials
from weakinfo_log import _log_debug

MIN_TRIALS = 10_000
MIN_CONDITIONING_COUNT = 100
_CHUNK = 1 << 16


@dataclass(frozen=True)
class OracleEstimate:
    value: float
    stderr: float
    trials: int
    seed: int
    count: int

    @classmethod
    def from_counts(cls, count: int, trials: int, seed: int) -> "OracleEstimate":
        value = count / trials
        return cls(
            value=value,
            stderr=math.sqrt(value * (1.0 - value) / trials),
            trials=trials,
            seed=seed,
            count=int(count),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "stderr": self.stderr,
            "trials": self.trials,
            "seed": self.seed,
            "count": self.count,
        }


@dataclass(frozen=True)
class PosteriorEstimate:
    """Conditional level frequencies given an observed click count."""

    distribution: Distribution
    stderr: Tuple[float, ...]
    conditioning_count: int
    trials: int
    seed: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "probs": self.distribution.as_list(),
            "stderr": list(self.stderr),
            "conditioning_count": self.conditioning_count,
            "trials": self.trials,
            "seed": self.seed,
        }


def oracle_escape_prob(ctx: DetectionContext) -> float:
    return float(-np.expm1(-ctx.tau))


def derive_seed_sequence(seed: int, worker_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(worker_index,))


def _generator(seed: int, worker_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed_sequence(seed, worker_index)))


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed < 2**64:
        raise InvalidInput(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return int(seed)


def _check_trials(trials: int) -> int:
    if int(trials) != trials or trials < MIN_TRIALS:
        raise TooFewTrials(f"need at least {MIN_TRIALS} trials, got {trials!r}")
    return int(trials)


def _check_workers(workers: int) -> int:
    if int(workers) != workers or workers < 1:
        raise InvalidInput(f"workers must be a positive integer, got {workers!r}")
    return int(workers)


def _worker_sizes(trials: int, workers: int) -> List[int]:
    base, extra = divmod(trials, workers)
    return [base + (1 if index < extra else 0) for index in range(workers)]


def _escaped_photons(levels: np.ndarray, p_escape: float, rng: np.random.Generator) -> np.ndarray:
    top = int(levels.max()) if levels.size else 0
    if top == 0:
        return np.zeros(levels.size, dtype=np.int64)
    uniforms = rng.random((levels.size, top))
    present = np.arange(top) < levels[:, None]
    return np.count_nonzero((uniforms < p_escape) & present, axis=1)


def sample_click_count(n: int, ctx: DetectionContext, rng: np.random.Generator) -> int:
    """Clicks from one run of level n: each photon escapes independently."""

    if int(n) != n or n < 0:
        raise InvalidInput(f"level must be a nonnegative integer, got {n!r}")
    return int(np.count_nonzero(rng.random(int(n)) < oracle_escape_prob(ctx)))


def _run_partitioned(
    trials: int,
    seed: int,
    workers: int,
    work: Callable[[int, np.random.Generator], np.ndarray],
) -> np.ndarray:
    sizes = _worker_sizes(trials, workers)

    def run(index: int) -> np.ndarray:
        rng = _generator(seed, index)
        total = None
        remaining = sizes[index]
        while remaining > 0:
            size = min(_CHUNK, remaining)
            counts = work(size, rng)
            total = counts if total is None else total + counts
            remaining -= size
        return total

    if workers == 1:
        results = [run(0)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(workers)))
    merged = results[0]
    for counts in results[1:]:
        merged = merged + counts
    return merged


def click_counts(n: int, ctx: DetectionContext, trials: int, seed: int, workers: int = 1) -> np.ndarray:
    """Histogram of click counts k = 0..n over ``trials`` runs of level n."""

    if int(n) != n or n < 0:
        raise InvalidInput(f"level must be a nonnegative integer, got {n!r}")
    n = int(n)
    trials = _check_trials(trials)
    seed = _check_seed(seed)
    workers = _check_workers(workers)
    p_escape = oracle_escape_prob(ctx)
    _log_debug("Sampling click counts.", n=n, tau=ctx.tau, trials=trials, seed=seed, workers=workers)

    def work(size: int, rng: np.random.Generator) -> np.ndarray:
        clicks = _escaped_photons(np.full(size, n, dtype=np.int64), p_escape, rng)
        return np.bincount(clicks, minlength=n + 1)

    return _run_partitioned(trials, seed, workers, work)


def joint_counts(
    prior: PriorState, ctx: DetectionContext, trials: int, seed: int, workers: int = 1
) -> np.ndarray:
    """counts[n, k]: level drawn from the prior, then clicks photon by photon."""

    trials = _check_trials(trials)
    seed = _check_seed(seed)
    workers = _check_workers(workers)
    dim = prior.dim
    p_escape = oracle_escape_prob(ctx)
    weights = np.asarray(prior.probs, dtype=float)
    _log_debug("Sampling levels and clicks.", dim=dim, tau=ctx.tau, trials=trials, seed=seed, workers=workers)

    def work(size: int, rng: np.random.Generator) -> np.ndarray:
        levels = rng.choice(dim, size=size, p=weights)
        clicks = _escaped_photons(levels, p_escape, rng)
        return np.bincount(levels * dim + clicks, minlength=dim * dim)

    return _run_partitioned(trials, seed, workers, work).reshape(dim, dim)


def estimate_click_pmf(
    n: int, ctx: DetectionContext, trials: int, seed: int, workers: int = 1
) -> Tuple[OracleEstimate, ...]:
    counts = click_counts(n, ctx, trials, seed, workers)
    return tuple(OracleEstimate.from_counts(int(count), trials, seed) for count in counts)


def estimate_likelihood(
    n: int, k: int, ctx: DetectionContext, trials: int, seed: int, workers: int = 1
) -> OracleEstimate:
    if int(k) != k or k < 0:
        raise InvalidInput(f"click count must be a nonnegative integer, got {k!r}")
    pmf = estimate_click_pmf(n, ctx, trials, seed, workers)
    if k >= len(pmf):
        return OracleEstimate.from_counts(0, int(trials), int(seed))
    return pmf[int(k)]


def estimate_outcome_prob(
    prior: PriorState, k: int, ctx: DetectionContext, trials: int, seed: int, workers: int = 1
) -> OracleEstimate:
    if int(k) != k or k < 0:
        raise InvalidInput(f"click count must be a nonnegative integer, got {k!r}")
    counts = joint_counts(prior, ctx, trials, seed, workers)
    hits = int(counts[:, int(k)].sum()) if k < prior.dim else 0
    return OracleEstimate.from_counts(hits, int(trials), int(seed))


def estimate_posterior(
    prior: PriorState, k: int, ctx: DetectionContext, trials: int, seed: int, workers: int = 1
) -> PosteriorEstimate:
    """Frequencies of each level among the runs that produced k clicks."""

    if int(k) != k or k < 0:
        raise InvalidInput(f"click count must be a nonnegative integer, got {k!r}")
    counts = joint_counts(prior, ctx, trials, seed, workers)
    column = counts[:, int(k)] if k < prior.dim else np.zeros(prior.dim, dtype=np.int64)
    observed = int(column.sum())
    if observed < MIN_CONDITIONING_COUNT:
        raise OutcomeTooRare(
            f"outcome k={k} seen {observed} times in {trials} trials, need {MIN_CONDITIONING_COUNT}"
        )
    freqs = column / observed
    stderr = tuple(float(math.sqrt(f * (1.0 - f) / observed)) for f in freqs)
    return PosteriorEstimate(
        distribution=Distribution(freqs),
        stderr=stderr,
        conditioning_count=observed,
        trials=int(trials),
        seed=int(seed),
    )
