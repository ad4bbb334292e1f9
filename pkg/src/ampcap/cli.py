"""Command-line interface: ``ampcap solve | sweep | verify | plotdata``.

Exit codes: 0 success, 2 usage error, 3 uncertified solve, 4 failed bound
check.  JSON files are UTF-8 with sorted keys; CSV files use a header row,
``.`` decimals and LF line endings.  Relative output paths resolve against
``$AMPCAP_OUTPUT_DIR`` when it is set.
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
import json
import logging
import math
import os
from pathlib import Path
import sys

import numpy as np

from .bounds import capacity_bounds, cardinality_lower_bound, verify_bounds
from .mixture import DiscreteInput, MixtureDensity
from .solver import SolverConfig, SolverResult, solve_capacity

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNCERTIFIED = 3
EXIT_BOUND_FAILED = 4

OUTPUT_DIR_ENV = "AMPCAP_OUTPUT_DIR"
LOG2E = 1.0 / math.log(2.0)

SWEEP_COLUMNS = (
    "A", "K", "capacity_nats", "capacity_lower", "capacity_upper",
    "kkt_max_violation", "certified", "theorem1_bound",
)
DENSITY_POINTS = 2001


class UsageError(Exception):
    pass


def output_path(path):
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def write_text(path, text):
    with open(output_path(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def fmt_value(v):
    """Deterministic CSV cell: ``repr`` for floats, lower-case booleans."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number: {text!r}")
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError("A must be positive")
    return v


def _solver_overrides(args):
    out = {}
    if getattr(args, "kkt_tol", None) is not None:
        out["kkt_tol"] = args.kkt_tol
    if getattr(args, "max_support", None) is not None:
        out["max_support"] = args.max_support
    if getattr(args, "no_symmetry", False):
        out["enforce_symmetry"] = False
    return out


def _config(A, overrides, warm_start=None):
    try:
        return SolverConfig(A=A, warm_start=warm_start, **overrides)
    except ValueError as exc:
        raise UsageError(str(exc))


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}")


def summary(result):
    bits = result.capacity * LOG2E
    state = "certified" if result.certified else f"NOT certified ({result.status})"
    return (f"A = {result.A:g}\n"
            f"C = {result.capacity:.12f} nats = {bits:.12f} bits\n"
            f"K = {result.K}\n"
            f"KKT max violation = {result.kkt.max_violation:.3e}, {state}")


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def cmd_solve(args):
    warm = None
    if args.warm_start:
        data = _read_json(args.warm_start)
        try:
            warm = DiscreteInput(data["points"], data["weights"], data["A"])
        except (KeyError, ValueError) as exc:
            raise UsageError(f"invalid warm start: {exc}")
    result = solve_capacity(_config(args.A, _solver_overrides(args), warm))
    out = args.out or f"solve_A{args.A:g}.json"
    write_text(out, result.to_json())
    print(summary(result))
    return EXIT_OK if result.certified else EXIT_UNCERTIFIED


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def sweep_values(args):
    if args.A_list:
        try:
            vals = [positive_float(t) for t in args.A_list.split(",") if t.strip()]
        except argparse.ArgumentTypeError as exc:
            raise UsageError(str(exc)) from None
    else:
        if args.A_min is None or args.A_max is None or args.step is None:
            raise UsageError("give --A-list or all of --A-min, --A-max, --step")
        if args.step <= 0 or args.A_max < args.A_min:
            raise UsageError("need A-min <= A-max and a positive step")
        n = int(math.floor((args.A_max - args.A_min) / args.step + 1e-9))
        # rounding keeps values like 0.1 + 3 * 0.1 tidy and reproducible
        vals = [round(args.A_min + i * args.step, 12) for i in range(n + 1)]
    if not vals:
        raise UsageError("empty list of A values")
    if any(not v > 0 for v in vals):
        raise UsageError("A must be positive")
    if any(b <= a for a, b in zip(vals[:-1], vals[1:])):
        raise UsageError("A values must be strictly increasing")
    return vals


def sweep_row(result):
    lo, hi = capacity_bounds(result.A)
    return {
        "A": result.A,
        "K": result.K,
        "capacity_nats": result.capacity,
        "capacity_lower": lo,
        "capacity_upper": hi,
        "kkt_max_violation": result.kkt.max_violation,
        "certified": result.certified,
        "theorem1_bound": cardinality_lower_bound(result.A),
    }


def _solve_one(job):
    A, overrides = job
    return solve_capacity(SolverConfig(A=A, **overrides))


def run_sweep(values, overrides, warm=True, parallelism=1):
    """Yield results in ascending ``A``; warm starts chain consecutive solves."""
    if parallelism > 1:
        if warm:
            raise UsageError("--parallelism > 1 requires --no-warm-start")
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            yield from pool.map(_solve_one, [(A, overrides) for A in values])
        return
    prev = None
    for A in values:
        result = solve_capacity(SolverConfig(A=A, warm_start=prev, **overrides))
        if warm:
            prev = result.input
        yield result


def cmd_sweep(args):
    values = sweep_values(args)
    overrides = _solver_overrides(args)
    _config(values[0], overrides)
    warm = not args.no_warm_start
    if args.parallelism > 1 and warm:
        raise UsageError("--parallelism > 1 requires --no-warm-start")
    ok = True
    with open(output_path(args.out), "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        fh.flush()
        for result in run_sweep(values, overrides, warm, args.parallelism):
            row = sweep_row(result)
            w.writerow([fmt_value(row[c]) for c in SWEEP_COLUMNS])
            # partial results survive a later failure
            fh.flush()
            ok &= bool(result.certified)
            if args.json_dir:
                write_text(Path(args.json_dir) / f"solve_A{result.A:g}.json", result.to_json())
            if not args.quiet:
                print(f"A={result.A:g} K={result.K} C={result.capacity:.10f} nats "
                      f"({result.capacity * LOG2E:.10f} bits) "
                      f"{'certified' if result.certified else 'UNCERTIFIED'}")
    return EXIT_OK if ok else EXIT_UNCERTIFIED


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args):
    if (args.A is None) == (args.from_ is None):
        raise UsageError("give exactly one of --A and --from")
    if args.from_:
        data = _read_json(args.from_)
        try:
            result = SolverResult.from_dict(data)
        except (KeyError, TypeError, ValueError) as exc:
            print(f"input validation failed: {exc}")
            return EXIT_BOUND_FAILED
    else:
        result = solve_capacity(_config(args.A, _solver_overrides(args)))
    if not result.certified:
        print(f"input validation failed: result at A={result.A:g} is not KKT-certified "
              f"(max violation {result.kkt.max_violation:.3e}, "
              f"max residual {result.kkt.max_residual:.3e})")
        return EXIT_BOUND_FAILED
    report = verify_bounds(result)
    if args.out:
        write_text(args.out, report.to_json())
    if args.csv:
        write_text(args.csv, report.to_csv())
    print(summary(result))
    for c in report.all_checks():
        print("  " + c.describe())
    bad = report.first_failure()
    if bad is not None:
        print(f"first failed check: {bad.describe()}")
        return EXIT_BOUND_FAILED
    print("all checks passed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# plotdata
# ---------------------------------------------------------------------------

def _read_sweep(path):
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    if not rows or any(c not in rows[0] for c in ("A", "K", "capacity_nats")):
        raise UsageError(f"{path} is not a sweep CSV")
    return rows


def plot_columns(args):
    if args.what == "density":
        if args.from_:
            result = SolverResult.from_dict(_read_json(args.from_))
        elif args.A is not None:
            result = solve_capacity(_config(args.A, {}))
        else:
            raise UsageError("density needs --A or --from <solve.json>")
        A = result.A
        y = np.linspace(-A - 4.0, A + 4.0, DENSITY_POINTS)
        f = MixtureDensity(result.input).pdf(y)
        return ("y", "density"), zip(y, f)
    if not args.from_:
        raise UsageError(f"{args.what} needs --from <sweep.csv>")
    rows = _read_sweep(args.from_)
    if args.what == "scaling":
        return ("A", "K", "theorem1_bound"), (
            (float(r["A"]), int(r["K"]), float(r["theorem1_bound"])) for r in rows)
    return ("A", "capacity_nats", "capacity_lower", "capacity_upper"), (
        (float(r["A"]), float(r["capacity_nats"]),
         float(r["capacity_lower"]), float(r["capacity_upper"])) for r in rows)


def cmd_plotdata(args):
    header, rows = plot_columns(args)
    lines = ["# " + " ".join(header)]
    lines += [" ".join(fmt_value(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_solver_flags(p):
    p.add_argument("--kkt-tol", type=float, default=None, help="KKT tolerance in nats")
    p.add_argument("--max-support", type=int, default=None, help="largest support allowed")
    p.add_argument("--no-symmetry", action="store_true", help="do not enforce symmetry")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ampcap",
        description="Capacity-achieving inputs and bound checks for the "
                    "amplitude-constrained Gaussian channel.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one amplitude")
    p.add_argument("--A", type=positive_float, required=True, help="amplitude bound")
    _add_solver_flags(p)
    p.add_argument("--warm-start", help="JSON input (or solve result) to start from")
    p.add_argument("--out", help="result JSON path (default solve_A<A>.json)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="warm-started sweep over amplitudes")
    p.add_argument("--A-min", type=positive_float)
    p.add_argument("--A-max", type=positive_float)
    p.add_argument("--step", type=float)
    p.add_argument("--A-list", help="comma-separated amplitudes")
    p.add_argument("--out", default="sweep.csv", help="summary CSV path")
    p.add_argument("--json-dir", help="also write one result JSON per A here")
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--no-warm-start", action="store_true")
    p.add_argument("--quiet", action="store_true")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="check every bound against a solved input")
    p.add_argument("--A", type=positive_float)
    p.add_argument("--from", dest="from_", help="solve result JSON")
    p.add_argument("--out", help="BoundsReport JSON path")
    p.add_argument("--csv", help="BoundsReport CSV path")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plotdata", help="emit x/y columns for plotting")
    p.add_argument("--from", dest="from_", help="sweep CSV (or solve JSON for density)")
    p.add_argument("--what", choices=("scaling", "capacity", "density"), required=True)
    p.add_argument("--A", type=positive_float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
