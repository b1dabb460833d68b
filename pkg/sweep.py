"""Ledger time series over a rescaled-time grid, decay-term peak and asymptotes."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from detection import DetectionContext, posterior
from fock_state import PriorState
from infotheory import (
    DECAY_TERM,
    DELTA_I,
    LHS_NAME,
    MULTIPLICITY_TERM,
    NO_DECAY_TERM,
    RELATIVE_ENTROPY,
    InfoLedger,
    LedgerRow,
    decay_info,
    excitation_variance,
    info_content,
    kclick_ledger,
    kclick_ledger_avg,
    mean_excitation,
    null_ledger,
    null_ledger_avg,
)
from weakinfo_errors import GroundStateUnsupported, InvalidGrid, NoInteriorPeak, NotAQubit
from weakinfo_log import _log_debug, _log_warning

SPACINGS = ("linear", "log")
PEAK_XTOL = 1e-10
_DENSE_FACTOR = 20


@dataclass(frozen=True)
class GridSpec:
    tau_start: float
    tau_stop: float
    points: int
    spacing: str = "linear"

    def __post_init__(self) -> None:
        start = float(self.tau_start)
        stop = float(self.tau_stop)
        if not (math.isfinite(start) and math.isfinite(stop)):
            raise InvalidGrid("grid bounds must be finite")
        if not 0.0 <= start < stop:
            raise InvalidGrid(f"need 0 <= tau_start < tau_stop, got {start!r}, {stop!r}")
        if isinstance(self.points, bool) or int(self.points) != self.points or self.points < 2:
            raise InvalidGrid(f"points must be an integer >= 2, got {self.points!r}")
        if self.spacing not in SPACINGS:
            raise InvalidGrid(f"spacing must be one of {SPACINGS}, got {self.spacing!r}")
        if self.spacing == "log" and start == 0.0:
            raise InvalidGrid("logarithmic spacing needs tau_start > 0")
        object.__setattr__(self, "tau_start", start)
        object.__setattr__(self, "tau_stop", stop)
        object.__setattr__(self, "points", int(self.points))

    def taus(self) -> np.ndarray:
        if self.spacing == "log":
            grid = np.geomspace(self.tau_start, self.tau_stop, self.points)
        else:
            grid = np.linspace(self.tau_start, self.tau_stop, self.points)
        grid[0] = self.tau_start
        grid[-1] = self.tau_stop
        return grid

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tau_start": self.tau_start,
            "tau_stop": self.tau_stop,
            "points": self.points,
            "spacing": self.spacing,
        }


@dataclass(frozen=True)
class TimeSeries:
    rows: Tuple[LedgerRow, ...]
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.rows)

    def columns(self) -> List[str]:
        gain = RELATIVE_ENTROPY if self.metadata.get("averaged", True) else DELTA_I
        return ["tau", LHS_NAME, gain, DECAY_TERM, NO_DECAY_TERM, MULTIPLICITY_TERM, "residual"]

    def to_rows(self) -> List[Dict[str, Optional[float]]]:
        """One dict per grid point keyed by ``columns()``; absent terms are None."""

        names = self.columns()
        out: List[Dict[str, Optional[float]]] = []
        for row in self.rows:
            record: Dict[str, Optional[float]] = {name: None for name in names}
            record["tau"] = row.tau
            record[LHS_NAME] = row.ledger.lhs.bits
            for term_name, value in row.ledger.terms:
                if term_name in record:
                    record[term_name] = value
            record["residual"] = row.ledger.residual
            out.append(record)
        return out

    def values(self, column: str) -> np.ndarray:
        return np.array([record[column] for record in self.to_rows()], dtype=float)


@dataclass(frozen=True)
class PeakReport:
    tau_star: float
    value_at_peak: float
    consistency_gap: float
    unimodal: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tau_star": self.tau_star,
            "value_at_peak": self.value_at_peak,
            "consistency_gap": self.consistency_gap,
            "unimodal": self.unimodal,
        }


def _evaluate(
    grid: GridSpec,
    gamma: float,
    build: Callable[[DetectionContext], InfoLedger],
    workers: int,
) -> Tuple[LedgerRow, ...]:
    taus = [float(tau) for tau in grid.taus()]

    def row(tau: float) -> LedgerRow:
        return LedgerRow(tau=tau, ledger=build(DetectionContext(tau=tau, gamma=gamma)))

    if workers <= 1:
        return tuple(row(tau) for tau in taus)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return tuple(pool.map(row, taus))


def _metadata(prior: PriorState, grid: GridSpec, identity: str, **extra: Any) -> Dict[str, Any]:
    return {"prior": prior.as_list(), "identity": identity, "grid": grid.to_dict(), **extra}


def sweep_null_avg(
    prior: PriorState, grid: GridSpec, gamma: float = 0.5, workers: int = 1
) -> TimeSeries:
    rows = _evaluate(grid, gamma, lambda ctx: null_ledger_avg(prior, ctx), workers)
    return TimeSeries(
        rows=rows,
        metadata=_metadata(prior, grid, rows[0].ledger.identity_name, k=0, averaged=True),
    )


def sweep_kclick_avg(
    prior: PriorState, grid: GridSpec, k: int, gamma: float = 0.5, workers: int = 1
) -> TimeSeries:
    rows = _evaluate(grid, gamma, lambda ctx: kclick_ledger_avg(prior, ctx, k), workers)
    return TimeSeries(
        rows=rows,
        metadata=_metadata(prior, grid, rows[0].ledger.identity_name, k=int(k), averaged=True),
    )


def sweep_pointwise(
    prior: PriorState, grid: GridSpec, k: int, n: int, gamma: float = 0.5, workers: int = 1
) -> TimeSeries:
    """Pointwise ledgers for a fixed level n; the null ledger is used at k = 0."""

    if k == 0:
        build = lambda ctx: null_ledger(prior, ctx, n)  # noqa: E731
    else:
        build = lambda ctx: kclick_ledger(prior, ctx, k, n)  # noqa: E731
    rows = _evaluate(grid, gamma, build, workers)
    return TimeSeries(
        rows=rows,
        metadata=_metadata(
            prior, grid, rows[0].ledger.identity_name, k=int(k), n=int(n), averaged=False
        ),
    )


def decay_term_value(prior: PriorState, tau: float) -> float:
    """<n>_{y_0} I(decay) in bits at rescaled time tau."""

    ctx = DetectionContext(tau=tau)
    return mean_excitation(posterior(prior, 0, ctx)) * decay_info(ctx)


def _peak_condition_gap(prior: PriorState, tau: float) -> float:
    post = posterior(prior, 0, DetectionContext(tau=tau))
    variance = excitation_variance(post)
    if variance == 0.0:
        return math.inf
    return abs(tau - mean_excitation(post) / variance)


def _is_unimodal(values: np.ndarray, peak: int) -> bool:
    steps = np.diff(values)
    return bool(np.all(steps[:peak] >= 0.0) and np.all(steps[peak:] <= 0.0))


def _dense_argmax(prior: PriorState, grid: GridSpec) -> float:
    dense = GridSpec(grid.tau_start, grid.tau_stop, grid.points * _DENSE_FACTOR, grid.spacing).taus()
    values = np.array([decay_term_value(prior, float(tau)) for tau in dense])
    return float(dense[int(np.argmax(values))])


def find_decay_term_peak(prior: PriorState, grid: GridSpec) -> PeakReport:
    """Maximize <n> I(decay) by grid scan plus golden-section refinement.

    A scan that is not unimodal falls back to the argmax of a denser grid and
    the report is flagged ``unimodal=False``.
    """

    if not np.any(prior.probs[1:] > 0.0):
        raise NoInteriorPeak("prior has no support above level 0; the decay term is identically 0")
    taus = grid.taus()
    values = np.array([decay_term_value(prior, float(tau)) for tau in taus])
    peak = int(np.argmax(values))
    if peak == 0 or peak == len(taus) - 1 or values[peak] <= 0.0:
        raise NoInteriorPeak(
            f"decay term maximum lies on the grid boundary tau={float(taus[peak])!r}"
        )

    unimodal = _is_unimodal(values, peak)
    left, middle, right = float(taus[peak - 1]), float(taus[peak]), float(taus[peak + 1])
    tau_star: Optional[float] = None
    if unimodal and values[peak] > values[peak - 1] and values[peak] > values[peak + 1]:
        result = minimize_scalar(
            lambda tau: -decay_term_value(prior, tau),
            bracket=(left, middle, right),
            method="golden",
            options={"xtol": PEAK_XTOL},
        )
        if left <= float(result.x) <= right:
            tau_star = float(result.x)
    if tau_star is None:
        _log_warning(
            "Decay-term scan is not unimodal; using dense-grid argmax.",
            prior=prior.as_list(),
            grid_peak=middle,
        )
        unimodal = False
        tau_star = _dense_argmax(prior, grid)

    report = PeakReport(
        tau_star=tau_star,
        value_at_peak=decay_term_value(prior, tau_star),
        consistency_gap=_peak_condition_gap(prior, tau_star),
        unimodal=unimodal,
    )
    _log_debug("Decay-term peak located.", **report.to_dict())
    return report


def peak_condition_root(prior_qubit: PriorState) -> float:
    """Root of tau = <n>/Var(n) for a qubit, i.e. tau = 1 + (p1/p0) e^-tau."""

    if prior_qubit.dim != 2:
        raise NotAQubit(f"expected a 2-level prior, got {prior_qubit.dim} levels")
    p0, p1 = (float(value) for value in prior_qubit.probs)
    if p0 == 0.0 or p1 == 0.0:
        raise NoInteriorPeak("a qubit with a single supported level has no interior peak")
    ratio = p1 / p0
    return float(brentq(lambda tau: tau - 1.0 - ratio * math.exp(-tau), 1.0, 1.0 + ratio, xtol=1e-14))


def asymptote(prior: PriorState) -> float:
    """Long-time limit of I(y_0): the information content of the ground level."""

    if prior.probs[0] == 0.0:
        raise GroundStateUnsupported("p(x_0) = 0: I(y_0) grows without bound")
    return info_content(float(prior.probs[0])).bits
