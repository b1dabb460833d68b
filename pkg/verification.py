"""Invariant suite behind ``verify``: identity residuals, bounds and oracle agreement.

Each family collects many checks and passes only if all of them pass. The
report carries no timestamps, so repeated runs with the same settings and seed
serialize identically.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import chisquare

from detection import (
    DetectionContext,
    log_outcome_prob,
    outcome_likelihood,
    outcome_likelihood_direct,
    outcome_pmf,
    outcome_prob,
    outcome_prob_direct,
    post_measurement_amplitudes,
    posterior,
)
from fock_state import AmplitudeVector, PriorState, make_prior, support
from infotheory import (
    DECAY_TERM,
    DELTA_I,
    MULTIPLICITY_TERM,
    NO_DECAY_TERM,
    RELATIVE_ENTROPY,
    RESIDUAL_TOLERANCE,
    InfoLedger,
    initial_gain_rate,
    kclick_ledger,
    kclick_ledger_avg,
    log_derivative_mean,
    mean_excitation,
    null_gain,
    null_ledger,
    null_ledger_avg,
    small_time_rate,
    small_time_slope,
)
from oracle import MIN_TRIALS, click_counts, joint_counts
from reversal import reversal_identity_suite, reversal_ledger_avg
from sweep import GridSpec, asymptote, find_decay_term_peak, peak_condition_root
from weakinfo_errors import ConfigError, DegenerateMean, TooFewTrials
from weakinfo_log import _log_debug, _log_error

FAMILIES = (
    "normalization",
    "bayes_consistency",
    "log_direct_agreement",
    "conservation_null",
    "conservation_null_avg",
    "relative_entropy_bound",
    "qubit_sign_structure",
    "null_monotonicity",
    "conservation_kclick",
    "kclick_reduces_to_null",
    "reversal_identities",
    "log_derivative",
    "small_time",
    "saturation",
    "peak_condition",
    "oracle_likelihood",
    "oracle_outcome_prob",
    "oracle_posterior",
    "oracle_chisquare",
)
FAULTS = ("decay_sign",)

EXACT_TOLERANCE = 1e-12
DERIVATIVE_RTOL = 1e-6
DERIVATIVE_ATOL = 1e-9
SATURATION_TOLERANCE = 1e-3
DECAY_TAIL_BOUND = 1e-6
PEAK_TOLERANCE = 1e-4
_MAX_EXAMPLES = 5


@dataclass(frozen=True)
class VerifySettings:
    priors: Tuple[PriorState, ...]
    taus: Tuple[float, ...]
    kclick_max_dim: int
    kclick_taus: Tuple[float, ...]
    small_time_priors: Tuple[PriorState, ...]
    saturation_tau: float
    peak_priors: Tuple[PriorState, ...]
    peak_grid: GridSpec
    oracle_taus: Tuple[float, ...]
    oracle_max_level: int
    oracle_priors: Tuple[PriorState, ...]
    sigmas: float
    chisquare_min_pvalue: float
    trials: int
    seed: int
    workers: int = 1
    tolerance: float = RESIDUAL_TOLERANCE
    gamma: float = 0.5

    @classmethod
    def from_config(
        cls,
        matrix: Dict[str, Any],
        trials: int,
        seed: int,
        workers: int = 1,
        tolerance: float = RESIDUAL_TOLERANCE,
        gamma: float = 0.5,
    ) -> "VerifySettings":
        try:
            oracle_cfg = matrix["oracle"]
            return cls(
                priors=tuple(make_prior(weights) for weights in matrix["priors"]),
                taus=tuple(float(tau) for tau in matrix["taus"]),
                kclick_max_dim=int(matrix["kclick_max_dim"]),
                kclick_taus=tuple(float(tau) for tau in matrix["kclick_taus"]),
                small_time_priors=tuple(make_prior(w) for w in matrix["small_time_priors"]),
                saturation_tau=float(matrix["saturation_tau"]),
                peak_priors=tuple(make_prior(w) for w in matrix["peak_priors"]),
                peak_grid=GridSpec(**matrix["peak_grid"]),
                oracle_taus=tuple(float(tau) for tau in oracle_cfg["taus"]),
                oracle_max_level=int(oracle_cfg["max_level"]),
                oracle_priors=tuple(make_prior(w) for w in oracle_cfg["priors"]),
                sigmas=float(oracle_cfg["sigmas"]),
                chisquare_min_pvalue=float(oracle_cfg["chisquare_min_pvalue"]),
                trials=int(trials),
                seed=int(seed),
                workers=int(workers),
                tolerance=float(tolerance),
                gamma=float(gamma),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"verify matrix is incomplete: {exc!r}") from exc

    def summary(self) -> Dict[str, Any]:
        return {
            "priors": len(self.priors),
            "taus": list(self.taus),
            "kclick_taus": list(self.kclick_taus),
            "oracle_taus": list(self.oracle_taus),
            "trials": self.trials,
            "seed": self.seed,
            "workers": self.workers,
            "tolerance": self.tolerance,
        }


@dataclass
class FamilyResult:
    name: str
    checks: int = 0
    failures: int = 0
    skipped: int = 0
    max_deviation: float = 0.0
    examples: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.checks > 0

    def check(self, ok: bool, deviation: float, label: str) -> None:
        self.checks += 1
        if math.isfinite(deviation):
            self.max_deviation = max(self.max_deviation, abs(deviation))
        if not ok:
            self.failures += 1
            if len(self.examples) < _MAX_EXAMPLES:
                self.examples.append(label)

    def skip(self) -> None:
        self.skipped += 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": self.checks,
            "failures": self.failures,
            "skipped": self.skipped,
            "max_deviation": self.max_deviation,
            "examples": list(self.examples),
        }


@dataclass(frozen=True)
class VerificationReport:
    families: Tuple[FamilyResult, ...]
    settings: Dict[str, Any]
    fault: Optional[str] = None

    @property
    def passed(self) -> bool:
        return all(family.passed for family in self.families)

    def failed_families(self) -> Tuple[str, ...]:
        return tuple(family.name for family in self.families if not family.passed)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "failed": list(self.failed_families()),
            "fault": self.fault,
            "settings": self.settings,
            "families": [family.to_dict() for family in self.families],
        }


def _label(prior: PriorState, tau: float, **extra: Any) -> str:
    parts = [f"prior={prior.as_list()}", f"tau={tau!r}"]
    parts.extend(f"{key}={value!r}" for key, value in extra.items())
    return " ".join(parts)


def _inject(ledger: InfoLedger, fault: Optional[str]) -> InfoLedger:
    if fault != "decay_sign" or DECAY_TERM not in ledger.term_names():
        return ledger
    terms = tuple(
        (name, -value if name == DECAY_TERM else value) for name, value in ledger.terms
    )
    return dataclasses.replace(ledger, terms=terms)


def _check_ledger(family: FamilyResult, ledger: InfoLedger, tolerance: float, label: str) -> None:
    residual = ledger.residual
    if residual is None:
        family.check(False, math.inf, f"{ledger.identity_name} non-finite {label}")
        return
    family.check(abs(residual) <= tolerance, residual, f"{ledger.identity_name} {label}")


def _ctx(tau: float, settings: VerifySettings) -> DetectionContext:
    return DetectionContext(tau=tau, gamma=settings.gamma)


def _possible(prior: PriorState, k: int, ctx: DetectionContext) -> bool:
    return log_outcome_prob(prior, k, ctx) != -math.inf


def _normalization(settings: VerifySettings, family: FamilyResult) -> None:
    for prior in settings.priors:
        for tau in settings.taus:
            ctx = _ctx(tau, settings)
            total = math.fsum(outcome_pmf(prior, ctx))
            family.check(abs(total - 1.0) <= 1e-10, total - 1.0, _label(prior, tau, what="pmf"))
            for n in range(prior.dim):
                row = math.fsum(outcome_likelihood(n, k, ctx) for k in range(n + 1))
                family.check(
                    abs(row - 1.0) <= EXACT_TOLERANCE, row - 1.0, _label(prior, tau, n=n)
                )


def _bayes_consistency(settings: VerifySettings, family: FamilyResult) -> None:
    for prior in settings.priors:
        amplitudes = AmplitudeVector.from_prior(prior)
        for tau in settings.taus:
            ctx = _ctx(tau, settings)
            for k in range(prior.dim):
                if not _possible(prior, k, ctx):
                    family.skip()
                    continue
                post = posterior(prior, k, ctx)
                evidence = outcome_prob(prior, k, ctx)
                for n in range(prior.dim):
                    expected = float(prior.probs[n]) * outcome_likelihood(n, k, ctx) / evidence
                    gap = abs(float(post.probs[n]) - expected)
                    family.check(gap <= EXACT_TOLERANCE, gap, _label(prior, tau, k=k, n=n))
                squared = post_measurement_amplitudes(amplitudes, k, ctx).mags ** 2
                gap = float(np.max(np.abs(squared - post.probs)))
                family.check(gap <= EXACT_TOLERANCE, gap, _label(prior, tau, k=k, what="amplitudes"))


def _log_direct_agreement(settings: VerifySettings, family: FamilyResult) -> None:
    for prior in settings.priors:
        for tau in settings.taus:
            ctx = _ctx(tau, settings)
            for k in range(prior.dim):
                logged = outcome_prob(prior, k, ctx)
                direct = outcome_prob_direct(prior, k, ctx)
                ok = math.isclose(logged, direct, rel_tol=EXACT_TOLERANCE, abs_tol=0.0)
                deviation = abs(logged - direct) / direct if direct > 0.0 else abs(logged)
                family.check(ok, deviation, _label(prior, tau, k=k))
        ctx = _ctx(settings.taus[len(settings.taus) // 2], settings)
        for n in range(prior.dim):
            for k in range(n + 1):
                logged = outcome_likelihood(n, k, ctx)
                direct = outcome_likelihood_direct(n, k, ctx)
                ok = math.isclose(logged, direct, rel_tol=EXACT_TOLERANCE, abs_tol=0.0)
                family.check(ok, abs(logged - direct), f"likelihood n={n} k={k} tau={ctx.tau!r}")


def _conservation_null(settings: VerifySettings, family: FamilyResult, fault: Optional[str]) -> None:
    for prior in settings.priors:
        for tau in settings.taus:
            ctx = _ctx(tau, settings)
            lhs_values = set()
            for n in sorted(support(prior)):
                ledger = null_ledger(prior, ctx, n)
                lhs_values.add(ledger.lhs.bits)
                _check_ledger(family, _inject(ledger, fault), settings.tolerance, _label(prior, tau, n=n))
            family.check(len(lhs_values) == 1, 0.0, _label(prior, tau, what="lhs depends on n"))


def _conservation_null_avg(
    settings: VerifySettings, family: FamilyResult, fault: Optional[str]
) -> None:
    for prior in settings.priors:
        for tau in settings.taus:
            ledger = _inject(null_ledger_avg(prior, _ctx(tau, settings)), fault)
            _check_ledger(family, ledger, settings.tolerance, _label(prior, tau))


def _relative_entropy_bound(settings: VerifySettings, family: FamilyResult) -> None:
    for prior in settings.priors:
        for tau in settings.taus:
            ledger = null_ledger_avg(prior, _ctx(tau, settings))
            divergence = ledger.term(RELATIVE_ENTROPY)
            excess = divergence - ledger.lhs.bits
            ok = divergence >= 0.0 and excess <= settings.tolerance
            family.check(ok, max(excess, 0.0), _label(prior, tau, D=divergence))


def _qubit_sign_structure(settings: VerifySettings, family: FamilyResult) -> None:
    for prior in settings.priors:
        if prior.dim != 2 or len(support(prior)) != 2:
            continue
        for tau in (0.0,) + settings.taus:
            ctx = _ctx(tau, settings)
            gain_0 = null_gain(prior, ctx, 0)
            gain_1 = null_gain(prior, ctx, 1)
            family.check(gain_0 >= 0.0, min(gain_0, 0.0), _label(prior, tau, level=0, gain=gain_0))
            family.check(gain_1 <= 0.0, max(gain_1, 0.0), _label(prior, tau, level=1, gain=gain_1))


def _null_monotonicity(settings: VerifySettings, family: FamilyResult) -> None:
    taus = sorted(set((0.0,) + settings.taus))
    for prior in settings.priors:
        ledgers = [null_ledger_avg(prior, _ctx(tau, settings)) for tau in taus]
        evidences = [outcome_prob(prior, 0, _ctx(tau, settings)) for tau in taus]
        for index in range(1, len(taus)):
            before, after = ledgers[index - 1], ledgers[index]
            drop = before.lhs.bits - after.lhs.bits
            family.check(drop <= settings.tolerance, max(drop, 0.0), _label(prior, taus[index], what="I(y_0)"))
            drop = before.term(RELATIVE_ENTROPY) - after.term(RELATIVE_ENTROPY)
            family.check(drop <= settings.tolerance, max(drop, 0.0), _label(prior, taus[index], what="D"))
            rise = evidences[index] - evidences[index - 1]
            family.check(rise <= EXACT_TOLERANCE, max(rise, 0.0), _label(prior, taus[index], what="p(y_0)"))


def _conservation_kclick(
    settings: VerifySettings, family: FamilyResult, fault: Optional[str]
) -> None:
    for prior in settings.priors:
        if prior.dim > settings.kclick_max_dim:
            continue
        for tau in settings.kclick_taus:
            ctx = _ctx(tau, settings)
            for k in range(prior.dim):
                if not _possible(prior, k, ctx):
                    family.skip()
                    continue
                for n in sorted(support(prior)):
                    if n < k:
                        continue
                    ledger = _inject(kclick_ledger(prior, ctx, k, n), fault)
                    _check_ledger(family, ledger, settings.tolerance, _label(prior, tau, k=k, n=n))
                ledger = _inject(kclick_ledger_avg(prior, ctx, k), fault)
                _check_ledger(family, ledger, settings.tolerance, _label(prior, tau, k=k, what="avg"))


def _kclick_reduces_to_null(settings: VerifySettings, family: FamilyResult) -> None:
    def compare(left: InfoLedger, right: InfoLedger, names: Sequence[str], label: str) -> None:
        gaps = [abs(left.lhs.bits - right.lhs.bits)]
        gaps.extend(abs(left.term(name) - right.term(name)) for name in names)
        gaps.append(abs(left.term(NO_DECAY_TERM)))
        gaps.append(abs(left.term(MULTIPLICITY_TERM)))
        worst = max(gaps)
        family.check(worst <= EXACT_TOLERANCE, worst, label)

    for prior in settings.priors:
        if prior.dim > settings.kclick_max_dim:
            continue
        for tau in settings.kclick_taus:
            ctx = _ctx(tau, settings)
            for n in sorted(support(prior)):
                compare(
                    kclick_ledger(prior, ctx, 0, n),
                    null_ledger(prior, ctx, n),
                    (DELTA_I, DECAY_TERM),
                    _label(prior, tau, n=n),
                )
            compare(
                kclick_ledger_avg(prior, ctx, 0),
                null_ledger_avg(prior, ctx),
                (RELATIVE_ENTROPY, DECAY_TERM),
                _label(prior, tau, what="avg"),
            )


def _reversal_identities(
    settings: VerifySettings, family: FamilyResult, fault: Optional[str]
) -> None:
    for prior in settings.priors:
        for tau in settings.taus:
            ctx = _ctx(tau, settings)
            report = reversal_identity_suite(prior, ctx)
            for ledger in report.ledgers:
                _check_ledger(family, _inject(ledger, fault), settings.tolerance, _label(prior, tau))
            for _ in report.skipped:
                family.skip()
            try:
                ledger = reversal_ledger_avg(prior, ctx)
            except DegenerateMean:
                family.skip()
                continue
            _check_ledger(family, _inject(ledger, fault), settings.tolerance, _label(prior, tau, what="avg"))


def _log_derivative(settings: VerifySettings, family: FamilyResult) -> None:
    for prior in settings.priors:
        for tau in settings.taus:
            ctx = _ctx(tau, settings)
            estimate = log_derivative_mean(prior, ctx)
            exact = mean_excitation(posterior(prior, 0, ctx))
            ok = math.isclose(estimate, exact, rel_tol=DERIVATIVE_RTOL, abs_tol=DERIVATIVE_ATOL)
            family.check(ok, abs(estimate - exact), _label(prior, tau, mean=exact))


def _small_time(settings: VerifySettings, family: FamilyResult) -> None:
    gamma = settings.gamma
    for prior in settings.small_time_priors:
        rate = small_time_rate(prior, gamma)
        expected = 2.0 * gamma * float(prior.probs[1]) / math.log(2.0)
        family.check(math.isclose(rate, expected, rel_tol=1e-15), abs(rate - expected), f"rate prior={prior.as_list()}")
        if prior.probs[0] == 0.0:
            family.skip()
            continue
        slope = small_time_slope(prior, gamma, n=0)
        ok = math.isclose(slope, rate, rel_tol=DERIVATIVE_RTOL, abs_tol=DERIVATIVE_ATOL)
        family.check(ok, abs(slope - rate), f"slope n=0 prior={prior.as_list()}")
        if prior.probs[1] > 0.0:
            slope = small_time_slope(prior, gamma, n=1)
            target = initial_gain_rate(prior, gamma, 1)
            ok = math.isclose(slope, target, rel_tol=DERIVATIVE_RTOL, abs_tol=DERIVATIVE_ATOL)
            family.check(ok, abs(slope - target), f"slope n=1 prior={prior.as_list()}")


def _saturation(settings: VerifySettings, family: FamilyResult) -> None:
    ctx = _ctx(settings.saturation_tau, settings)
    tail = _ctx(30.0, settings)
    for prior in settings.priors:
        if prior.probs[0] > 0.0:
            value = null_ledger_avg(prior, ctx).lhs.bits
            gap = abs(value - asymptote(prior))
            family.check(gap <= SATURATION_TOLERANCE, gap, _label(prior, ctx.tau, what="I(y_0) limit"))
        if len(support(prior)) == prior.dim:
            decay = null_ledger_avg(prior, tail).term(DECAY_TERM)
            family.check(0.0 <= decay <= DECAY_TAIL_BOUND, decay, _label(prior, tail.tau, what="decay tail"))

    uniform = make_prior([1.0] * 4)
    top = uniform.top_level
    for tau in settings.taus:
        if tau == 0.0:
            family.skip()
            continue
        ledger = kclick_ledger_avg(uniform, _ctx(tau, settings), top)
        gap = abs(ledger.term(RELATIVE_ENTROPY) - 2.0)
        family.check(gap <= settings.tolerance, gap, _label(uniform, tau, k=top, what="D constant"))
        multiplicity = ledger.term(MULTIPLICITY_TERM)
        family.check(multiplicity == 0.0, abs(multiplicity), _label(uniform, tau, k=top, what="<I(W)>"))


def _peak_condition(settings: VerifySettings, family: FamilyResult) -> None:
    for prior in settings.peak_priors:
        report = find_decay_term_peak(prior, settings.peak_grid)
        family.check(
            report.consistency_gap <= PEAK_TOLERANCE,
            report.consistency_gap,
            f"peak gap prior={prior.as_list()} tau*={report.tau_star!r}",
        )
        if prior.dim == 2:
            root = peak_condition_root(prior)
            gap = abs(report.tau_star - root)
            family.check(gap <= PEAK_TOLERANCE, gap, f"peak root prior={prior.as_list()} root={root!r}")


def _band(family: FamilyResult, observed: float, expected: float, count: int, sigmas: float, label: str) -> None:
    stderr = math.sqrt(expected * (1.0 - expected) / count)
    if stderr == 0.0:
        family.check(observed == expected, abs(observed - expected), label)
        return
    z = (observed - expected) / stderr
    family.check(abs(z) <= sigmas, z, label)


def _chisquare(counts: np.ndarray, probs: np.ndarray, trials: int) -> Optional[float]:
    expected = trials * probs
    keep = expected >= 5.0
    observed_bins = list(counts[keep])
    expected_bins = list(expected[keep])
    rest = float(expected[~keep].sum())
    if rest > 0.0:
        observed_bins.append(counts[~keep].sum())
        expected_bins.append(rest)
    if len(expected_bins) < 2:
        return None
    observed_arr = np.asarray(observed_bins, dtype=float)
    expected_arr = np.asarray(expected_bins, dtype=float)
    expected_arr *= observed_arr.sum() / expected_arr.sum()
    return float(chisquare(observed_arr, expected_arr).pvalue)


def _oracle_likelihood(
    settings: VerifySettings, likelihood: FamilyResult, goodness: FamilyResult
) -> None:
    for tau in settings.oracle_taus:
        ctx = _ctx(tau, settings)
        for n in range(settings.oracle_max_level + 1):
            counts = click_counts(n, ctx, settings.trials, settings.seed, settings.workers)
            probs = np.array([outcome_likelihood(n, k, ctx) for k in range(n + 1)])
            for k in range(n + 1):
                _band(
                    likelihood,
                    counts[k] / settings.trials,
                    float(probs[k]),
                    settings.trials,
                    settings.sigmas,
                    f"p(y_{k}|x_{n}) tau={tau!r}",
                )
            pvalue = _chisquare(counts, probs, settings.trials)
            if pvalue is None:
                goodness.skip()
                continue
            goodness.check(
                pvalue >= settings.chisquare_min_pvalue, 0.0, f"chi-square n={n} tau={tau!r} p={pvalue!r}"
            )


def _oracle_joint(settings: VerifySettings, outcome: FamilyResult, post_family: FamilyResult) -> None:
    for prior in settings.oracle_priors:
        for tau in settings.oracle_taus:
            ctx = _ctx(tau, settings)
            counts = joint_counts(prior, ctx, settings.trials, settings.seed, settings.workers)
            for k in range(prior.dim):
                column = counts[:, k]
                _band(
                    outcome,
                    column.sum() / settings.trials,
                    outcome_prob(prior, k, ctx),
                    settings.trials,
                    settings.sigmas,
                    _label(prior, tau, k=k),
                )
                observed = int(column.sum())
                if observed < 100:
                    post_family.skip()
                    continue
                post = posterior(prior, k, ctx)
                for n in range(prior.dim):
                    _band(
                        post_family,
                        column[n] / observed,
                        float(post.probs[n]),
                        observed,
                        settings.sigmas,
                        _label(prior, tau, k=k, n=n),
                    )


def run_verification(settings: VerifySettings, fault: Optional[str] = None) -> VerificationReport:
    if fault is not None and fault not in FAULTS:
        raise ConfigError(f"unknown fault '{fault}' (known: {', '.join(FAULTS)})")
    if settings.trials < MIN_TRIALS:
        raise TooFewTrials(f"need at least {MIN_TRIALS} trials, got {settings.trials}")

    families = {name: FamilyResult(name) for name in FAMILIES}
    steps: List[Tuple[str, Callable[[], None]]] = [
        ("normalization", lambda: _normalization(settings, families["normalization"])),
        ("bayes_consistency", lambda: _bayes_consistency(settings, families["bayes_consistency"])),
        ("log_direct_agreement", lambda: _log_direct_agreement(settings, families["log_direct_agreement"])),
        ("conservation_null", lambda: _conservation_null(settings, families["conservation_null"], fault)),
        ("conservation_null_avg", lambda: _conservation_null_avg(settings, families["conservation_null_avg"], fault)),
        ("relative_entropy_bound", lambda: _relative_entropy_bound(settings, families["relative_entropy_bound"])),
        ("qubit_sign_structure", lambda: _qubit_sign_structure(settings, families["qubit_sign_structure"])),
        ("null_monotonicity", lambda: _null_monotonicity(settings, families["null_monotonicity"])),
        ("conservation_kclick", lambda: _conservation_kclick(settings, families["conservation_kclick"], fault)),
        ("kclick_reduces_to_null", lambda: _kclick_reduces_to_null(settings, families["kclick_reduces_to_null"])),
        ("reversal_identities", lambda: _reversal_identities(settings, families["reversal_identities"], fault)),
        ("log_derivative", lambda: _log_derivative(settings, families["log_derivative"])),
        ("small_time", lambda: _small_time(settings, families["small_time"])),
        ("saturation", lambda: _saturation(settings, families["saturation"])),
        ("peak_condition", lambda: _peak_condition(settings, families["peak_condition"])),
        (
            "oracle_likelihood",
            lambda: _oracle_likelihood(settings, families["oracle_likelihood"], families["oracle_chisquare"]),
        ),
        (
            "oracle_outcome_prob",
            lambda: _oracle_joint(settings, families["oracle_outcome_prob"], families["oracle_posterior"]),
        ),
    ]
    for name, step in steps:
        _log_debug("Running verification family.", family=name)
        step()

    report = VerificationReport(
        families=tuple(families[name] for name in FAMILIES),
        settings=settings.summary(),
        fault=fault,
    )
    for family in report.families:
        if not family.passed:
            _log_error(
                "Verification family failed.",
                family=family.name,
                failures=family.failures,
                checks=family.checks,
                examples=family.examples,
            )
    return report
