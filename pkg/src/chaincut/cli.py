"""Command-line entry point: spectrum, fidelity, optimize, sweep, landscape, table1.

Exit codes: 0 success, 1 model failure (degeneracy, tolerance breach), 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .control import Task, format_schedule, parse_schedule
from .errors import DegenerateGroundStateError, DomainError, LineSearchError
from .evolve import EvolutionConfig, transform_fidelity
from .operators import SpinChainSpec
from .optimize import (
    DEFAULT_AXES,
    Axis,
    BFGSOptions,
    FidelityObjective,
    default_workers,
    landscape_scan,
    optimize_schedule,
    sweep_horizon,
)
from .spectral import DEFAULT_GAP_TOLERANCE, gap_scan
from .table1 import format_table1, reproduce_table1


class UsageError(Exception):
    pass


def num(x: float) -> float:
    """Round to 12 significant digits so text output is stable."""
    return float(format(float(x), ".12g"))


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating, int, np.integer)):
        return format(float(v), ".12g") if isinstance(v, (float, np.floating)) else str(v)
    if isinstance(v, (list, tuple)):
        return ";".join(_cell(x) for x in v)
    if v is None:
        return ""
    return str(v)


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if rows:
        writer.writerow(list(rows[0]))
        for row in rows:
            writer.writerow([_cell(v) for v in row.values()])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        return num(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def to_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def _emit(text: str, output: str) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(output).write_text(text, encoding="utf-8", newline="\n")


def _render(records, fmt: str) -> str:
    if fmt == "json":
        return to_json(records)
    return to_csv(records if isinstance(records, list) else [records])


def _spec(args) -> SpinChainSpec:
    return SpinChainSpec(args.n, args.field)


def _config(args) -> EvolutionConfig:
    return EvolutionConfig(args.M, args.scale_steps)


def _options(args) -> BFGSOptions:
    return BFGSOptions(gtol=args.gtol, max_iter=args.max_iter)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(",", ";").split(";") if v.strip()]
    except ValueError:
        raise UsageError(f"expected numbers separated by ';', got {text!r}") from None


def _axis(text: str, name: str) -> Axis:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"axis must be lo:hi:step, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
        return Axis(name, lo, hi, step)
    except (ValueError, DomainError) as exc:
        raise UsageError(f"bad axis {text!r}: {exc}") from None


# -- commands ---------------------------------------------------------------


def cmd_spectrum(args) -> int:
    if args.points < 1:
        raise UsageError("--points must be >= 1")
    g = np.linspace(args.g_min, args.g_max, args.points)
    scan = gap_scan(_spec(args), g)
    rows = [{"g": a, "E0": b, "E1": c} for a, b, c in scan.rows()]
    _emit(_render(rows, args.format or "csv"), args.output)
    print(f"min gap: {scan.min_gap:.12g} at g = {scan.argmin:.12g}", file=sys.stderr)
    if scan.min_gap < args.gap_tolerance:
        print(
            f"error: levels are degenerate (min gap {scan.min_gap:.3e} < {args.gap_tolerance:g})",
            file=sys.stderr,
        )
        return 1
    return 0


def cmd_fidelity(args) -> int:
    try:
        schedule = parse_schedule(args.schedule)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    config = _config(args)
    report = transform_fidelity(_spec(args), schedule, config, args.gap_tolerance)
    record = {
        "fidelity": report.fidelity,
        "baseline_overlap": report.initial_overlap,
        "params": list(schedule.parameters),
        "T": schedule.horizon,
        "M": config.steps_for(schedule.horizon),
        "task": schedule.task.value,
        "schedule": format_schedule(schedule),
    }
    _emit(_render(record, args.format or "json"), args.output)
    return 0


def _objective(args, horizon: float) -> FidelityObjective:
    return FidelityObjective(
        _spec(args), args.task, args.ansatz, horizon, _config(args), args.k, args.gap_tolerance
    )


def _outcome_record(out) -> dict:
    return {
        "params": list(out.parameters),
        "fidelity": out.fidelity,
        "baseline": out.baseline,
        "iterations": out.iterations,
        "converged": out.converged,
        "admissible": out.admissible,
    }


def cmd_optimize(args) -> int:
    f = _objective(args, args.T)
    x0 = _floats(args.x0) if args.x0 else None
    if x0 is not None and len(x0) != f.n_params:
        raise UsageError(f"--x0 needs {f.n_params} values")
    out = optimize_schedule(f, x0, _options(args))
    record = {"T": args.T, "task": args.task, "ansatz": args.ansatz, **_outcome_record(out)}
    _emit(_render(record, args.format or "json"), args.output)
    return 0


def cmd_sweep(args) -> int:
    horizons = _floats(args.T_list)
    if not horizons:
        raise UsageError("--T-list is empty")
    outs = sweep_horizon(
        _spec(args), args.task, args.ansatz, horizons, _config(args), args.k, _options(args)
    )
    rows = [{"T": o.horizon, **_outcome_record(o)} for o in outs]
    _emit(_render(rows, args.format or "csv"), args.output)
    return 0


def cmd_landscape(args) -> int:
    if args.ansatz == "pulse" and args.k != 2:
        raise UsageError("landscapes need --k 2")
    defaults = DEFAULT_AXES[args.ansatz]
    axes = (
        _axis(args.axis1, defaults[0].name) if args.axis1 else defaults[0],
        _axis(args.axis2, defaults[1].name) if args.axis2 else defaults[1],
    )
    workers = args.workers if args.workers is not None else default_workers()
    grid = landscape_scan(
        _spec(args), args.task, args.ansatz, args.T, _config(args), axes, workers, args.k
    )
    rows = [{"p1": a, "p2": b, "fidelity": c} for a, b, c in grid.rows()]
    _emit(_render(rows, args.format or "csv"), args.output)
    side = {
        "axes": [
            {"name": ax.name, "min": ax.lo, "max": ax.hi, "step": ax.step} for ax in axes
        ],
        "best": {"params": list(grid.best[0]), "fidelity": grid.best[1]},
        "reference": {"params": list(grid.reference[0]), "fidelity": grid.reference[1]},
    }
    sidecar = args.sidecar
    if sidecar is None and args.output not in (None, "-"):
        sidecar = str(args.output) + ".json"
    if sidecar is None:
        sys.stderr.write(to_json(side))
    else:
        Path(sidecar).write_text(to_json(side), encoding="utf-8", newline="\n")
    return 0


def cmd_table1(args) -> int:
    horizons = _floats(args.T_list)
    entries = reproduce_table1(_spec(args), horizons, _config(args), _options(args))
    text = format_table1(entries)
    mode = "scaled with T" if args.scale_steps else "fixed"
    text += f"N={args.n} B={args.field:g} M={args.M} ({mode})\n"
    _emit(text, args.output)
    return 0 if not any(any(e.deviations()) for e in entries) else 1


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=5, help="number of spins (default 5)")
    common.add_argument("--field", type=float, default=0.5, help="transverse field B (default 0.5)")
    common.add_argument("--M", "--trotter-steps", dest="M", type=int, default=300,
                        help="Trotter slices (default 300)")
    common.add_argument("--scale-steps", action="store_true",
                        help="use M slices per unit time instead of M in total")
    common.add_argument("--gap-tolerance", type=float, default=DEFAULT_GAP_TOLERANCE)
    common.add_argument("-o", "--output", default="-", help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=None)

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--ansatz", choices=("poly", "pulse"), default="poly")
    search.add_argument("--k", type=int, default=2, help="number of pulses")
    search.add_argument("--task", choices=[t.value for t in Task], default="cut")

    bfgs = argparse.ArgumentParser(add_help=False)
    bfgs.add_argument("--gtol", type=float, default=BFGSOptions.gtol)
    bfgs.add_argument("--max-iter", type=int, default=BFGSOptions.max_iter)

    parser = argparse.ArgumentParser(
        prog="chaincut",
        description="Boundary-link control of a transverse-field Ising ring.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="two lowest levels versus g")
    p.add_argument("--g-min", type=float, default=0.0)
    p.add_argument("--g-max", type=float, default=1.0)
    p.add_argument("--points", type=int, default=101)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("fidelity", parents=[common], help="transfer fidelity of one schedule")
    p.add_argument("--schedule", required=True,
                   help="poly:a1=..,a2=..,T=..,task=.. | pulse:b=v1;v2,T=..,task=.. | linear:T=..,task=..")
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("optimize", parents=[common, search, bfgs], help="BFGS search at one horizon")
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--x0", default=None, help="start point 'v1;v2' (default: unoptimized schedule)")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", parents=[common, search, bfgs], help="warm-started optimization over horizons")
    p.add_argument("--T-list", required=True, help="ascending horizons 'T1;T2;...'")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("landscape", parents=[common, search], help="brute-force fidelity grid")
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--axis1", default=None, help="lo:hi:step for the first parameter (write --axis1=-1:2:0.02 for negative lo)")
    p.add_argument("--axis2", default=None, help="lo:hi:step for the second parameter")
    p.add_argument("--workers", type=int, default=None, help="worker processes (default $CHAIN_WORKERS or 1)")
    p.add_argument("--sidecar", default=None, help="path for the {best, reference} JSON")
    p.set_defaults(func=cmd_landscape)

    p = sub.add_parser("table1", parents=[common, bfgs], help="K=2 pulse cut/stitch table")
    p.add_argument("--T-list", default="1;2;3;4")
    p.set_defaults(func=cmd_table1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except DegenerateGroundStateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except LineSearchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
