"""Command-line front end: ledger, sweep, reversal, verify and oracle subcommands.

Results go to stdout (or ``--out``) as JSON or CSV; logs and error messages go
to stderr. Exit codes: 0 success, 2 configuration/input error, 3 impossible
outcome, 4 invariant failure.

CSV floats use the shortest round-trip representation (``repr``), non-finite
values are written as ``inf``/``-inf`` and absent terms as empty fields.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from detection import DetectionContext, outcome_likelihood, outcome_prob, posterior
from fock_state import PriorState, make_prior
from infotheory import (
    RESIDUAL_TOLERANCE,
    InfoLedger,
    kclick_ledger,
    kclick_ledger_avg,
    null_ledger,
    null_ledger_avg,
)
from oracle import estimate_click_pmf, estimate_outcome_prob, estimate_posterior
from reversal import reversal_identity_suite, reversal_ledger_avg
from sweep import GridSpec, TimeSeries, sweep_kclick_avg, sweep_null_avg, sweep_pointwise
from verification import VerifySettings, run_verification
from weakinfo_config import get_defaults, get_preset, get_verify_matrix, load_run_config_file
from weakinfo_errors import ConfigError, InvariantFailure, WeakInfoError
from weakinfo_log import _log_info

__version__ = "1.0.0"

FORMATS = ("json", "csv")
LEDGER_COLUMNS_AVG = [
    "tau",
    "I_outcome",
    "relative_entropy",
    "decay_term",
    "no_decay_term",
    "multiplicity_term",
    "residual",
]
LEDGER_COLUMNS_POINTWISE = ["tau", "I_outcome", "delta_I"] + LEDGER_COLUMNS_AVG[3:]
REVERSAL_COLUMNS = [
    "identity",
    "n",
    "lhs_name",
    "lhs",
    "terms",
    "residual",
    "p_rev",
    "I_rev",
    "max_abs_residual",
]
VERIFY_COLUMNS = ["name", "passed", "checks", "failures", "skipped", "max_deviation"]
ORACLE_COLUMNS = ["quantity", "n", "k", "value", "stderr", "exact", "count", "trials", "seed"]


@dataclass(frozen=True)
class RunConfig:
    command: str
    prior: Optional[PriorState]
    prior_weights: Optional[List[float]]
    tau: Optional[float]
    gamma: float
    time: Optional[float]
    k: int
    n: Optional[int]
    avg: bool
    posterior: bool
    grid: Optional[GridSpec]
    trials: int
    seed: int
    workers: int
    format: str
    out: Optional[str]
    tolerance: float
    preset: Optional[str] = None
    fault: Optional[str] = None

    def context(self) -> DetectionContext:
        if self.tau is not None and self.time is not None:
            raise ConfigError("give either --tau or --gamma/--time, not both")
        if self.tau is not None:
            return DetectionContext(tau=self.tau, gamma=self.gamma)
        if self.time is not None:
            return DetectionContext.from_time(self.gamma, self.time)
        raise ConfigError("a time is required: --tau or --gamma with --time")

    def require_prior(self) -> PriorState:
        if self.prior is None:
            raise ConfigError("a prior is required: --prior or --preset")
        return self.prior

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "preset": self.preset,
            "prior": self.prior.as_list() if self.prior is not None else None,
            "prior_weights": self.prior_weights,
            "tau": self.tau,
            "gamma": self.gamma,
            "time": self.time,
            "k": self.k,
            "n": self.n,
            "avg": self.avg,
            "grid": self.grid.to_dict() if self.grid is not None else None,
            "trials": self.trials,
            "seed": self.seed,
            "workers": self.workers,
            "format": self.format,
            "tolerance": self.tolerance,
        }


def parse_prior(value: Any) -> List[float]:
    """Weights from "1,1,1", "1/3,1/3,1/3" or a JSON list."""

    if isinstance(value, str):
        tokens: Iterable[Any] = [token.strip() for token in value.split(",")]
    elif isinstance(value, (list, tuple)):
        tokens = value
    else:
        raise ConfigError(f"prior must be a list or comma-separated string, got {value!r}")
    weights: List[float] = []
    for token in tokens:
        try:
            weights.append(float(Fraction(str(token))))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"cannot read prior weight {token!r}") from exc
    return weights


def parse_tau_range(value: str) -> GridSpec:
    """"start:stop:points" with an optional ":log" or ":linear" suffix."""

    parts = str(value).split(":")
    if len(parts) not in (3, 4):
        raise ConfigError(f"--tau-range expects start:stop:points[:log], got {value!r}")
    spacing = parts[3] if len(parts) == 4 else "linear"
    try:
        start, stop, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"--tau-range expects numbers, got {value!r}") from exc
    return GridSpec(start, stop, points, spacing)


def _grid_from(merged: Dict[str, Any]) -> Optional[GridSpec]:
    if merged.get("tau_range"):
        return parse_tau_range(merged["tau_range"])
    grid = merged.get("grid")
    if grid is None:
        return None
    if isinstance(grid, str):
        return parse_tau_range(grid)
    if not isinstance(grid, dict):
        raise ConfigError(f"grid must be an object or a start:stop:points string, got {grid!r}")
    try:
        return GridSpec(**grid)
    except TypeError as exc:
        raise ConfigError(f"invalid grid object: {exc}") from exc


def _optional_int(value: Any, name: str) -> Optional[int]:
    if value is None:
        return None
    if isinstance(value, bool) or int(value) != value:
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    return int(value)


def _optional_float(value: Any, name: str) -> Optional[float]:
    if value is None:
        return None
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a number, got {value!r}") from exc


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then preset, then ``--config`` file, then explicit flags."""

    merged: Dict[str, Any] = get_defaults()
    file_cfg = load_run_config_file(args.config) if args.config else {}
    preset_name = args.preset or file_cfg.get("preset")
    if preset_name:
        merged.update(get_preset(preset_name))
    merged.update(file_cfg)
    flags = {
        key: value
        for key, value in vars(args).items()
        if value is not None and key not in ("command", "config", "inject_fault")
    }
    merged.update(flags)

    fmt = merged.get("format", "json")
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}, got {fmt!r}")

    weights = parse_prior(merged["prior"]) if merged.get("prior") is not None else None
    prior = make_prior(weights) if weights is not None else None
    try:
        return RunConfig(
            command=args.command,
            prior=prior,
            prior_weights=weights,
            tau=_optional_float(merged.get("tau"), "tau"),
            gamma=float(merged.get("gamma", 0.5)),
            time=_optional_float(merged.get("time"), "time"),
            k=_optional_int(merged.get("k", 0), "k") or 0,
            n=_optional_int(merged.get("n"), "n"),
            avg=bool(merged.get("avg", False)),
            posterior=bool(merged.get("posterior", False)),
            grid=_grid_from(merged),
            trials=int(merged.get("trials", 1_000_000)),
            seed=int(merged.get("seed", 42)),
            workers=int(merged.get("workers", 1)),
            format=fmt,
            out=merged.get("out"),
            tolerance=float(merged.get("tolerance", RESIDUAL_TOLERANCE)),
            preset=preset_name,
            fault=getattr(args, "inject_fault", None),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration value: {exc}") from exc


def _plain(value: Any) -> Any:
    """JSON-safe copy: numpy scalars unwrapped, -0.0 folded, non-finite as strings."""

    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return [_plain(item) for item in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        number = float(value)
        if math.isnan(number):
            return "nan"
        if math.isinf(number):
            return "inf" if number > 0 else "-inf"
        return number + 0.0
    return value


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        number = float(value)
        if math.isinf(number):
            return "inf" if number > 0 else "-inf"
        return repr(number + 0.0)
    return str(value)


def render_json(config: RunConfig, rows: List[Dict[str, Any]], **meta: Any) -> str:
    payload = {
        "config": config.to_dict(),
        "rows": rows,
        "meta": {"version": __version__, "tolerance": config.tolerance, **meta},
    }
    return json.dumps(_plain(payload), indent=2, allow_nan=False) + "\n"


def render_csv(columns: Sequence[str], rows: List[Dict[str, Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row.get(column)) for column in columns])
    return buffer.getvalue()


def emit(config: RunConfig, text: str) -> None:
    if config.out:
        try:
            with open(config.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise ConfigError(f"cannot write {config.out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _ledger_row(ledger: InfoLedger) -> Dict[str, Any]:
    record: Dict[str, Any] = {"tau": dict(ledger.context).get("tau"), "I_outcome": ledger.lhs.bits}
    record.update(dict(ledger.terms))
    record["residual"] = ledger.residual
    return record


def _ledger_check(ledgers: Iterable[InfoLedger], tolerance: float) -> None:
    failed = sorted({ledger.identity_name for ledger in ledgers if not ledger.holds(tolerance)})
    if failed:
        raise InvariantFailure(failed)


def cmd_ledger(config: RunConfig) -> int:
    prior = config.require_prior()
    ctx = config.context()
    averaged = config.avg or config.n is None
    if averaged:
        if config.k == 0:
            ledger = null_ledger_avg(prior, ctx)
        else:
            ledger = kclick_ledger_avg(prior, ctx, config.k)
    elif config.k == 0:
        ledger = null_ledger(prior, ctx, config.n)
    else:
        ledger = kclick_ledger(prior, ctx, config.k, config.n)

    if config.format == "csv":
        columns = LEDGER_COLUMNS_AVG if averaged else LEDGER_COLUMNS_POINTWISE
        emit(config, render_csv(columns, [_ledger_row(ledger)]))
    else:
        emit(config, render_json(config, [ledger.to_dict()]))
    _ledger_check([ledger], config.tolerance)
    return 0


def _run_sweep(config: RunConfig) -> TimeSeries:
    prior = config.require_prior()
    if config.grid is None:
        raise ConfigError("sweep needs a grid: --tau-range or --preset")
    if config.n is not None and not config.avg:
        return sweep_pointwise(prior, config.grid, config.k, config.n, config.gamma, config.workers)
    if config.k == 0:
        return sweep_null_avg(prior, config.grid, config.gamma, config.workers)
    return sweep_kclick_avg(prior, config.grid, config.k, config.gamma, config.workers)


def cmd_sweep(config: RunConfig) -> int:
    series = _run_sweep(config)
    rows = series.to_rows()
    if config.format == "csv":
        emit(config, render_csv(series.columns(), rows))
    else:
        emit(config, render_json(config, rows, series=series.metadata))
    _ledger_check((row.ledger for row in series.rows), config.tolerance)
    return 0


def _reversal_row(ledger: InfoLedger) -> Dict[str, Any]:
    return {
        "identity": ledger.identity_name,
        "n": dict(ledger.context).get("n"),
        "lhs_name": ledger.lhs_name,
        "lhs": ledger.lhs.bits,
        "terms": "|".join(f"{name}:{_csv_cell(value)}" for name, value in ledger.terms),
        "residual": ledger.residual,
    }


def cmd_reversal(config: RunConfig) -> int:
    prior = config.require_prior()
    ctx = config.context()
    report = reversal_identity_suite(prior, ctx)
    ledgers = list(report.ledgers) + [reversal_ledger_avg(prior, ctx)]
    residuals = [abs(ledger.residual) for ledger in ledgers if ledger.residual is not None]
    max_abs_residual = max(residuals) if residuals else 0.0

    if config.format == "csv":
        totals = {"p_rev": report.p_rev, "I_rev": report.info_rev, "max_abs_residual": max_abs_residual}
        rows = [{**_reversal_row(ledger), **totals} for ledger in ledgers]
        emit(config, render_csv(REVERSAL_COLUMNS, rows))
    else:
        summary = report.to_dict()
        summary["ledgers"] = [ledger.to_dict() for ledger in ledgers]
        summary["max_abs_residual"] = max_abs_residual
        emit(config, render_json(config, [summary]))
    _ledger_check(ledgers, config.tolerance)
    return 0


def cmd_verify(config: RunConfig) -> int:
    settings = VerifySettings.from_config(
        get_verify_matrix(),
        trials=config.trials,
        seed=config.seed,
        workers=config.workers,
        tolerance=config.tolerance,
        gamma=config.gamma,
    )
    report = run_verification(settings, fault=config.fault)
    rows = [family.to_dict() for family in report.families]
    if config.format == "csv":
        emit(config, render_csv(VERIFY_COLUMNS, rows))
    else:
        emit(
            config,
            render_json(
                config,
                rows,
                passed=report.passed,
                failed=list(report.failed_families()),
                settings=report.settings,
                fault=report.fault,
            ),
        )
    if not report.passed:
        raise InvariantFailure(report.failed_families())
    return 0


def cmd_oracle(config: RunConfig) -> int:
    ctx = config.context()
    rows: List[Dict[str, Any]] = []
    common = {"trials": config.trials, "seed": config.seed}
    if config.posterior:
        prior = config.require_prior()
        estimate = estimate_posterior(prior, config.k, ctx, config.trials, config.seed, config.workers)
        exact = posterior(prior, config.k, ctx)
        for level, (value, stderr) in enumerate(zip(estimate.distribution.probs, estimate.stderr)):
            rows.append(
                {
                    "quantity": "posterior",
                    "n": level,
                    "k": config.k,
                    "value": value,
                    "stderr": stderr,
                    "exact": exact.probs[level],
                    "count": estimate.conditioning_count,
                    **common,
                }
            )
    elif config.n is not None:
        for k, estimate in enumerate(
            estimate_click_pmf(config.n, ctx, config.trials, config.seed, config.workers)
        ):
            rows.append(
                {
                    "quantity": "likelihood",
                    "n": config.n,
                    "k": k,
                    "value": estimate.value,
                    "stderr": estimate.stderr,
                    "exact": outcome_likelihood(config.n, k, ctx),
                    "count": estimate.count,
                    **common,
                }
            )
    else:
        prior = config.require_prior()
        estimate = estimate_outcome_prob(prior, config.k, ctx, config.trials, config.seed, config.workers)
        rows.append(
            {
                "quantity": "outcome_prob",
                "n": None,
                "k": config.k,
                "value": estimate.value,
                "stderr": estimate.stderr,
                "exact": outcome_prob(prior, config.k, ctx),
                "count": estimate.count,
                **common,
            }
        )

    if config.format == "csv":
        emit(config, render_csv(ORACLE_COLUMNS, rows))
    else:
        emit(config, render_json(config, rows))
    return 0


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "ledger": cmd_ledger,
    "sweep": cmd_sweep,
    "reversal": cmd_reversal,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prior", help="Weights over levels 0..N, e.g. 1,1,1 or 1/3,1/3,1/3")
    common.add_argument("--tau", type=float, help="Rescaled time 2*gamma*t")
    common.add_argument("--gamma", type=float, help="Decay rate gamma (default 0.5)")
    common.add_argument("--time", type=float, help="Elapsed time t, used with --gamma")
    common.add_argument("--k", type=int, help="Number of detector clicks (default 0)")
    common.add_argument("--n", type=int, help="Level for pointwise ledgers and oracle likelihoods")
    common.add_argument("--avg", action="store_true", default=None, help="Use the averaged identity")
    common.add_argument(
        "--posterior",
        action="store_true",
        default=None,
        help="oracle: estimate conditional level frequencies",
    )
    common.add_argument("--preset", help="Named preset from weakinfo_presets.json")
    common.add_argument("--tau-range", dest="tau_range", help="start:stop:points[:log]")
    common.add_argument("--trials", type=int, help="Monte Carlo trials")
    common.add_argument("--seed", type=int, help="Monte Carlo seed")
    common.add_argument("--workers", type=int, help="Parallel workers for sweeps and sampling")
    common.add_argument("--tolerance", type=float, help="Residual tolerance in bits")
    common.add_argument("--format", choices=FORMATS, help="Output format (default json)")
    common.add_argument("--out", help="Write output to this path instead of stdout")
    common.add_argument("--config", help="JSON file with run settings; flags take precedence")
    common.add_argument("--inject-fault", dest="inject_fault", help=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="weakinfo",
        description="Information balance of photon-detection weak measurements.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ledger", parents=[common], help="One conservation ledger")
    sub.add_parser("sweep", parents=[common], help="Ledger time series over a tau grid")
    sub.add_parser("reversal", parents=[common], help="Reversal probability and its identities")
    sub.add_parser("verify", parents=[common], help="Run the invariant and oracle suite")
    sub.add_parser("oracle", parents=[common], help="Monte Carlo estimates")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        config = build_run_config(args)
        _log_info("Running command.", command=config.command, preset=config.preset)
        return COMMANDS[config.command](config)
    except WeakInfoError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
