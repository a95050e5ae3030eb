"""Command-line interface: ``laplace-asym {classify,asym,quad,compare,sweep}``.

Every command prints one JSON document on stdout::

    {"command": ..., "input": ..., "result": ..., "warnings": [...]}

with keys sorted and reals written with 17 significant digits.  ``--format
csv`` prints the command's table instead.  Exit codes: 0 success, 2 bad
input, 3 a hypothesis of the leading-order result fails, 4 the
remainder-rate fit does not pass.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict

from . import __version__
from .analysis import AnalysisOptions, Problem, classify
from .asymptotics import evaluate_approx, leading_term
from .compare import (
    estimate_constants,
    estimate_local_constants,
    fit_remainder_exponent,
    crossover_time,
    sweep,
)
from .errors import HypothesisError, InsufficientPointsError, LaplaceError
from .quadrature import MIN_ADAPTIVE_TOL, adaptive_quad, simpson, simpson_error_bound

EXIT_OK, EXIT_USAGE, EXIT_HYPOTHESIS, EXIT_FIT = 0, 2, 3, 4

_OPTION_KEYS = ("grid_points", "refine_tol", "endpoint_tol", "deriv_zero_tol", "k_max")


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# serialization


def format_real(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def dumps(obj, indent=0):
    """JSON with sorted keys and 17-significant-digit reals."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (bool, int, float)) or hasattr(obj, "__float__"):
        return format_real(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_csv(rows):
    buf = io.StringIO()
    if not rows:
        return ""
    header = list(rows[0])
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            ["" if row[k] is None else (format_real(row[k]) if not isinstance(row[k], str) else row[k]) for k in header]
        )
    return buf.getvalue()


# --------------------------------------------------------------------------
# argument handling


def _add_problem_args(sp):
    g = sp.add_argument_group("problem")
    g.add_argument("--problem", metavar="FILE", help="JSON problem file with keys g, h, a, b, options")
    g.add_argument("--g", metavar="EXPR", help="amplitude g(x)")
    g.add_argument("--h", metavar="EXPR", help="phase h(x)")
    g.add_argument("--a", type=float, metavar="REAL", help="left endpoint")
    g.add_argument("--b", type=float, metavar="REAL", help="right endpoint")
    sp.add_argument("--format", choices=("json", "csv"), default="json")


def _add_sweep_args(sp, require_n):
    sp.add_argument("--t-min", type=float, required=True)
    sp.add_argument("--t-max", type=float, required=True)
    sp.add_argument("--points", type=int, required=True)
    sp.add_argument("--n", type=int, action="append", required=require_n, default=None,
                    help="Simpson panel count (repeatable)")
    sp.add_argument("--oracle-tol", type=float, default=1e-12)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="laplace-asym",
        description="Leading-order Laplace asymptotics of int_a^b exp(t h(x)) g(x) dx",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("classify", help="locate the maximizer and classify the case")
    _add_problem_args(sp)

    sp = sub.add_parser("asym", help="leading-order term and its values")
    _add_problem_args(sp)
    sp.add_argument("--t", type=float, action="append", help="evaluation point (repeatable)")
    sp.add_argument("--t-min", type=float)
    sp.add_argument("--t-max", type=float)
    sp.add_argument("--points", type=int)

    sp = sub.add_parser("quad", help="composite Simpson or adaptive quadrature at one t")
    _add_problem_args(sp)
    sp.add_argument("--t", type=float, required=True)
    mode = sp.add_mutually_exclusive_group(required=True)
    mode.add_argument("--n", type=int, help="even panel count for composite Simpson")
    mode.add_argument("--tol", type=float, help="absolute tolerance for adaptive Simpson")
    sp.add_argument("--sample-points", type=int, default=1001,
                    help="grid size for the fourth-derivative maximum in the error bound")

    sp = sub.add_parser("compare", help="remainder-rate fit, error constants and crossover times")
    _add_problem_args(sp)
    _add_sweep_args(sp, require_n=True)

    sp = sub.add_parser("sweep", help="oracle, asymptotic and Simpson values over a t-grid")
    _add_problem_args(sp)
    _add_sweep_args(sp, require_n=False)
    return parser


def load_problem_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read problem file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("problem file must hold a JSON object")
    missing = [k for k in ("g", "h", "a", "b") if k not in data]
    if missing:
        raise UsageError(f"problem file is missing keys: {', '.join(missing)}")
    raw_opts = data.get("options", {}) or {}
    unknown = set(raw_opts) - set(_OPTION_KEYS)
    if unknown:
        raise UsageError(f"unknown option keys: {', '.join(sorted(unknown))}")
    return data["g"], data["h"], data["a"], data["b"], raw_opts


def resolve_problem(args):
    inline = [args.g, args.h, args.a, args.b]
    if args.problem is not None:
        if any(v is not None for v in inline):
            raise UsageError("--problem and inline --g/--h/--a/--b are mutually exclusive")
        g, h, a, b, opts = load_problem_file(args.problem)
    else:
        names = ("--g", "--h", "--a", "--b")
        missing = [n for n, v in zip(names, inline) if v is None]
        if missing:
            raise UsageError(f"missing required arguments: {', '.join(missing)}")
        g, h, a, b = inline
        opts = {}
    if not isinstance(g, str) or not isinstance(h, str):
        raise UsageError("g and h must be expression strings")
    try:
        options = AnalysisOptions(**opts)
        return Problem(g, h, float(a), float(b), options)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, LaplaceError):
            raise
        raise UsageError(str(exc)) from None


def _echo(p):
    out = p.describe()
    out["options"] = asdict(p.options)
    return out


# --------------------------------------------------------------------------
# commands; each returns (record, exit_code, table_rows)


def cmd_classify(args, p):
    cl = classify(p)
    result = cl.as_dict()
    return {"input": _echo(p), "result": result, "warnings": []}, EXIT_OK, [result]


def _t_values(args):
    if args.t:
        if any(v is not None for v in (args.t_min, args.t_max, args.points)):
            raise UsageError("use either --t or --t-min/--t-max/--points, not both")
        return [float(t) for t in args.t]
    if None in (args.t_min, args.t_max, args.points):
        raise UsageError("asym needs --t or all of --t-min, --t-max, --points")
    if args.points < 2 or not 0 < args.t_min < args.t_max:
        raise UsageError("need 0 < t-min < t-max and points >= 2")
    import numpy as np

    return [float(t) for t in np.geomspace(args.t_min, args.t_max, args.points)]


def cmd_asym(args, p):
    ts = _t_values(args)
    for t in ts:
        if not t > 0:
            raise UsageError(f"t must be positive, got {t!r}")
    ap = leading_term(classify(p))
    values = []
    warnings = []
    for t in ts:
        v = evaluate_approx(ap, t)
        values.append({"t": v.t, "approx": v.value, "underflow_flag": v.underflow})
        if v.underflow:
            warnings.append(f"exp(t*h(c)) underflows at t={format_real(t)}; approx reported as 0")
    result = {
        "amplitude": ap.amplitude,
        "power": ap.power,
        "hc": ap.hc,
        "remainder_exponent": ap.remainder_exponent,
        "case": ap.case_tag.value,
        "k": ap.k,
        "values": values,
    }
    echo = _echo(p)
    echo["t"] = ts
    return {"input": echo, "result": result, "warnings": warnings}, EXIT_OK, values


def cmd_quad(args, p):
    echo = _echo(p)
    echo["t"] = args.t
    if args.n is not None:
        if args.n < 2 or args.n % 2:
            raise UsageError(f"--n must be an even integer >= 2, got {args.n}")
        r = simpson(p, args.t, args.n)
        bound = simpson_error_bound(p, args.t, args.n, args.sample_points)
        result = {"value": r.value, "method": "simpson", "n": r.n, "error_bound": bound}
        echo["n"] = args.n
        echo["sample_points"] = args.sample_points
    else:
        if not args.tol >= MIN_ADAPTIVE_TOL:
            raise UsageError(f"--tol must be at least {MIN_ADAPTIVE_TOL:g}")
        r = adaptive_quad(p, args.t, args.tol)
        result = {"value": r.value, "method": "adaptive", "evaluations": r.evaluations,
                  "requested_tol": r.requested_tol}
        echo["tol"] = args.tol
    return {"input": echo, "result": result, "warnings": []}, EXIT_OK, [result]


def _run_sweep(args, p):
    if args.points < 5:
        raise UsageError(f"--points must be at least 5, got {args.points}")
    if not 0 < args.t_min < args.t_max:
        raise UsageError("need 0 < t-min < t-max")
    if not args.oracle_tol >= MIN_ADAPTIVE_TOL:
        raise UsageError(f"--oracle-tol must be at least {MIN_ADAPTIVE_TOL:g}")
    n_list = args.n or []
    for n in n_list:
        if n < 2 or n % 2:
            raise UsageError(f"--n must be an even integer >= 2, got {n}")
    s = sweep(p, args.t_min, args.t_max, args.points, n_list, args.oracle_tol)
    echo = _echo(p)
    echo.update(t_min=args.t_min, t_max=args.t_max, points=args.points, n=list(n_list),
                oracle_tol=args.oracle_tol)
    warnings = []
    flagged = int(s.below_noise.sum())
    if flagged:
        warnings.append(f"{flagged} of {len(s.t_values)} points have residuals below the oracle noise floor")
    if s.underflow.any():
        warnings.append("exp(t*h(c)) underflows at some t; those approximations are reported as 0")
    return s, echo, warnings


def _table(s):
    rows = []
    for row in s.rows():
        rows.append({k: row[k] for k in row if k not in ("residual", "below_noise")})
    return rows


def cmd_sweep(args, p):
    s, echo, warnings = _run_sweep(args, p)
    rows = s.rows()
    result = {
        "classification": s.classification.as_dict(),
        "approximation": s.approximation.as_dict(),
        "table": rows,
    }
    return {"input": echo, "result": result, "warnings": warnings}, EXIT_OK, rows


def cmd_compare(args, p):
    s, echo, warnings = _run_sweep(args, p)
    ap = s.approximation
    try:
        fit = fit_remainder_exponent(s)
    except InsufficientPointsError as exc:
        raise _FitFailure(f"remainder fit impossible: {exc}") from None
    C0, c0 = estimate_constants(s, ap.k, ap.remainder_exponent)
    C0_local, c0_local = estimate_local_constants(s)
    crossover = [
        {"n": n, "T": crossover_time(C0, c0, n, ap.k, remainder_exponent=ap.remainder_exponent)}
        for n in s.n_list
    ]
    if fit.one_sided:
        warnings.append("residual decays faster than the predicted remainder order; passed one-sided")
    if ap.hc < s.hmax_abs:
        warnings.append("C0 and c0 use exp(t*max|h|); C0_local and c0_local use exp(t*h(c))")
    table = _table(s)
    result = {
        "fit": fit.as_dict(),
        "C0": C0,
        "c0": c0,
        "C0_local": C0_local,
        "c0_local": c0_local,
        "hmax_abs": s.hmax_abs,
        "crossover": crossover,
        "table": table,
    }
    code = EXIT_OK if fit.passed else EXIT_FIT
    return {"input": echo, "result": result, "warnings": warnings}, code, table


class _FitFailure(Exception):
    pass


COMMANDS = {
    "classify": cmd_classify,
    "asym": cmd_asym,
    "quad": cmd_quad,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
}


# flags whose values may start with '-' (expressions like "-x^2", negative reals)
_VALUE_FLAGS = {"--g", "--h", "--a", "--b", "--t", "--t-min", "--t-max"}


def _join_values(argv):
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    argv = _join_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        p = resolve_problem(args)
        record, code, rows = COMMANDS[args.command](args, p)
    except UsageError as exc:
        parser.print_usage(stderr)
        print(f"laplace-asym: error: {exc}", file=stderr)
        return EXIT_USAGE
    except HypothesisError as exc:
        print(f"laplace-asym: hypothesis failed ({exc.hypothesis}): {exc}", file=stderr)
        return EXIT_HYPOTHESIS
    except _FitFailure as exc:
        print(f"laplace-asym: {exc}", file=stderr)
        return EXIT_FIT
    except (LaplaceError, ValueError, ArithmeticError) as exc:
        print(f"laplace-asym: error: {exc}", file=stderr)
        return EXIT_USAGE
    record = {"command": args.command, **record}
    if args.format == "csv":
        stdout.write(to_csv(rows))
    else:
        stdout.write(dumps(record) + "\n")
    if code == EXIT_FIT:
        print("laplace-asym: remainder-rate fit did not pass", file=stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
