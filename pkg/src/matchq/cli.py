"""Command-line front end.

Model files are JSON objects::

    {
      "map_a": {"c": [[...]], "d": [[...]]} | {"poisson": 5.0} | {"erlang": [2, 2.0]},
      "map_b": ...,
      "theta1": 0.25,
      "theta2": 1.0,
      "solver": {"epsilon": 1e-20, "schedule_step": 10, "series_tol": 1e-14}   # optional
    }

Exit codes: 0 success, 1 usage or parse error, 2 invalid model, 3 model not
positive recurrent, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures as cf
import csv
import json
import os
import sys
from dataclasses import replace
from importlib import metadata

import numpy as np

from . import maps
from .errors import (
    InvalidMAPError,
    MatchQError,
    NonConvergentError,
    NotStableError,
    ScheduleExhaustedError,
    SingularMatrixError,
)
from .model import QueueModel
from .performance import FIELDS, report
from .qbd import SolverConfig, solve
from .simulator import SimConfig, simulate
from .sojourn import build_bound
from .stability import classify_model

SCHEMA_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_MODEL, EXIT_UNSTABLE, EXIT_NUMERIC = 0, 1, 2, 3, 4
SWEEP_COLUMNS = ("theta1", "theta2") + FIELDS + ("mean_xi", "k_star", "tail_mass", "error")


class ParseError(Exception):
    """Malformed model file; the message names the line or field."""


class ModelError(Exception):
    """Well-formed file describing an invalid model."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- model files

def _map_from_spec(spec, where: str):
    if not isinstance(spec, dict):
        raise ParseError(f"{where}: expected an object")
    try:
        if "poisson" in spec:
            return maps.poisson(float(spec["poisson"]))
        if "erlang" in spec:
            stages, rate = spec["erlang"]
            if int(stages) != stages:
                raise ParseError(f"{where}.erlang: stage count must be an integer")
            return maps.erlang(int(stages), float(rate))
        if "c" in spec and "d" in spec:
            return maps.validate(np.array(spec["c"], dtype=float), np.array(spec["d"], dtype=float))
    except (InvalidMAPError, MatchQError) as exc:
        raise ModelError(f"{where}: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: {exc}") from exc
    raise ParseError(f"{where}: expected one of 'poisson', 'erlang' or 'c'/'d'")


def parse_model(obj) -> tuple[QueueModel, SolverConfig]:
    if not isinstance(obj, dict):
        raise ParseError("top level: expected an object")
    for key in ("map_a", "map_b", "theta1", "theta2"):
        if key not in obj:
            raise ParseError(f"missing field '{key}'")
    map_a = _map_from_spec(obj["map_a"], "map_a")
    map_b = _map_from_spec(obj["map_b"], "map_b")
    thetas = []
    for key in ("theta1", "theta2"):
        value = obj[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError(f"{key}: expected a number")
        thetas.append(float(value))
    try:
        model = QueueModel(map_a, map_b, *thetas)
    except ValueError as exc:
        raise ModelError(str(exc)) from exc
    solver = obj.get("solver", {}) or {}
    if not isinstance(solver, dict):
        raise ParseError("solver: expected an object")
    known = {"epsilon", "schedule_step", "series_tol", "max_schedule_steps"}
    unknown = set(solver) - known
    if unknown:
        raise ParseError(f"solver: unknown field(s) {sorted(unknown)}")
    try:
        config = SolverConfig(**solver)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"solver: {exc}") from exc
    return model, config


def load_model(path: str) -> tuple[QueueModel, SolverConfig]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_model(obj)


def model_to_dict(model: QueueModel) -> dict:
    return {
        "map_a": model.map_a.to_dict(),
        "map_b": model.map_b.to_dict(),
        "theta1": model.theta1,
        "theta2": model.theta2,
    }


# ---------------------------------------------------------------- helpers

SCIENTIFIC = {"tail_mass", "truncation_error_bound"}


def _fmt(x, precision: int, name: str = "") -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if name in SCIENTIFIC:
        return f"{x:.{precision}e}"
    if round(x, precision) == 0:
        x = 0.0  # avoid printing -0.0000
    return f"{x:.{precision}f}"


def _table(rows, out) -> None:
    widths = [max(len(r[i]) for r in rows if len(r) > i) for i in range(max(map(len, rows)))]
    for row in rows:
        cells = [c.ljust(widths[0]) if i == 0 else c.rjust(widths[i]) for i, c in enumerate(row)]
        out.write("  ".join(cells).rstrip() + "\n")


def _with_thetas(model: QueueModel, thetas) -> QueueModel:
    if thetas is None:
        return model
    return replace(model, theta1=thetas[0], theta2=thetas[1])


def _solver_config(config: SolverConfig, args) -> SolverConfig:
    if getattr(args, "epsilon", None) is not None:
        config = replace(config, epsilon=args.epsilon)
    return config


def solve_point(model: QueueModel, config: SolverConfig) -> dict:
    """Solve one model and return every reported quantity as a flat dict."""
    sol = solve(model, config)
    rep = report(sol)
    bound = build_bound(model, sol)
    out = rep.measures()
    out.update(mean_xi=bound.mean_xi, k_star=sol.k_star, tail_mass=sol.tail_mass,
               truncation_error_bound=rep.truncation_error_bound)
    return out


# ---------------------------------------------------------------- commands

def cmd_classify(args, out) -> int:
    model, _ = load_model(args.model)
    model = _with_thetas(model, args.theta)
    out.write(f"{classify_model(model)}\n")
    return EXIT_OK


def cmd_solve(args, out) -> int:
    model, config = load_model(args.model)
    model = _with_thetas(model, args.theta)
    config = _solver_config(config, args)
    values = solve_point(model, config)
    if args.json:
        json.dump({"schema_version": SCHEMA_VERSION, "model": model_to_dict(model),
                   "classification": str(classify_model(model)), "report": values},
                  out, indent=2)
        out.write("\n")
    else:
        _table([(k, _fmt(v, args.precision, k)) for k, v in values.items()], out)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(list(values))
            w.writerow([repr(v) for v in values.values()])
    return EXIT_OK


def _parse_axis(text: str) -> tuple[str, list[float]]:
    name, sep, body = text.partition("=")
    name = name.strip()
    if not sep or name not in ("theta1", "theta2"):
        raise ParseError(f"--axis {text!r}: expected theta1=... or theta2=...")
    try:
        if ":" in body:
            start, stop, step = (float(x) for x in body.split(":"))
            if step <= 0 or stop < start:
                raise ValueError("need start <= stop and step > 0")
            n = int(round((stop - start) / step)) + 1
            values = [round(start + i * step, 12) for i in range(n)]
        else:
            values = [float(x) for x in body.split(",") if x.strip()]
    except ValueError as exc:
        raise ParseError(f"--axis {text!r}: {exc}") from exc
    if not values or any(v <= 0 for v in values):
        raise ParseError(f"--axis {text!r}: values must be positive and nonempty")
    return name, values


def _sweep_row(task) -> dict:
    model, config = task
    row = {"theta1": model.theta1, "theta2": model.theta2}
    try:
        row.update({k: v for k, v in solve_point(model, config).items() if k in SWEEP_COLUMNS})
        row["error"] = ""
    except MatchQError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def sweep_grid(model: QueueModel, config: SolverConfig, axes, workers: int = 1) -> list[dict]:
    """Rows for the Cartesian grid of ``axes`` in deterministic grid order."""
    grid = [{}]
    for name, values in axes:
        grid = [dict(g, **{name: v}) for g in grid for v in values]
    tasks = [(replace(model, **point), config) for point in grid]
    if workers <= 1 or len(tasks) == 1:
        return [_sweep_row(t) for t in tasks]
    with cf.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_row, tasks))


def write_sweep_csv(rows, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for row in rows:
        w.writerow(["" if row.get(c) is None else (repr(row[c]) if isinstance(row.get(c), float) else row.get(c, ""))
                    for c in SWEEP_COLUMNS])


def cmd_sweep(args, out) -> int:
    model, config = load_model(args.model)
    config = _solver_config(config, args)
    axes = [_parse_axis(a) for a in args.axis]
    if len({name for name, _ in axes}) != len(axes):
        raise ParseError("each axis may appear only once")
    rows = sweep_grid(model, config, axes, workers=args.workers)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            write_sweep_csv(rows, fh)
    else:
        write_sweep_csv(rows, out)
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    model, config = load_model(args.model)
    model = _with_thetas(model, args.theta)
    try:
        sim_cfg = SimConfig(horizon=args.horizon, warmup=args.warmup, seed=args.seed, batches=args.batches)
    except ValueError as exc:
        raise ParseError(f"simulation config: {exc}") from exc
    rep = simulate(model, sim_cfg)
    solved = solve_point(model, _solver_config(config, args)) if args.compare else None
    if args.json:
        doc = {"schema_version": SCHEMA_VERSION, "model": model_to_dict(model),
               "simulation": rep.as_dict()}
        if solved is not None:
            doc["solver"] = solved
        json.dump(doc, out, indent=2)
        out.write("\n")
        return EXIT_OK
    p = args.precision
    rows = [("measure", "estimate", "half_width") + (("solver", "verdict") if solved else ())]
    for name, est in rep.as_dict().items():
        if name == "events":
            continue
        row = (name, _fmt(est["estimate"], p), _fmt(est["half_width"], p))
        if solved is not None and name in solved:
            ok = abs(solved[name] - est["estimate"]) <= 3 * est["half_width"]
            row += (_fmt(solved[name], p), "ok" if ok else "MISMATCH")
        rows.append(row)
    _table(rows, out)
    return EXIT_OK


def cmd_version(args, out) -> int:
    try:
        version = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        version = "unknown"
    out.write(f"matchq {version}\n")
    return EXIT_OK


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="matchq", description="Double-ended MAP queue with impatience.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, theta=True, precision=True):
        p.add_argument("model", help="model file (JSON)")
        if theta:
            p.add_argument("--theta", nargs=2, type=float, metavar=("T1", "T2"),
                           help="override the impatience rates")
        if precision:
            p.add_argument("--precision", type=int, default=4, help="decimals in printed tables")
        p.add_argument("--epsilon", type=float, help="tail-mass stop threshold")

    p = sub.add_parser("classify", help="recurrence class of the level process")
    p.add_argument("model")
    p.add_argument("--theta", nargs=2, type=float, metavar=("T1", "T2"))
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("solve", help="stationary measures and sojourn bound")
    common(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", help="write a one-row CSV")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="solve over a grid of impatience rates")
    common(p, theta=False, precision=False)
    p.add_argument("--axis", action="append", required=True,
                   help="theta1=start:stop:step or theta2=v1,v2,...; repeat for a 2-D grid")
    p.add_argument("--out", help="CSV destination (default standard output)")
    p.add_argument("--workers", type=int, default=min(4, os.cpu_count() or 1))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="discrete-event simulation")
    common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=float, default=1e6)
    p.add_argument("--warmup", type=float, default=1e4)
    p.add_argument("--batches", type=int, default=20)
    p.add_argument("--compare", action="store_true", help="also solve and compare")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("version")
    p.set_defaults(func=cmd_version)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except ParseError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except ModelError as exc:
        err.write(f"invalid model: {exc}\n")
        return EXIT_MODEL
    except NotStableError as exc:
        err.write(f"not stable: {exc.recurrence}\n")
        return EXIT_UNSTABLE
    except (SingularMatrixError, NonConvergentError, ScheduleExhaustedError) as exc:
        err.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
