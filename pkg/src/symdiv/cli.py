"""Command-line front end: ``symdiv compute | audit | bounds``.

Exit codes: 0 success, 1 a check failed (chain violation or unverified
certificate; the report is still written), 2 bad input or arguments.
"""

import argparse
import csv
import json
import math
from pathlib import Path
import sys

from . import __version__
from .audit import build_report, dumps, run_audit, total_violations
from .bounds import GridSpec, SHARP_CONSTANTS, certify, find_constant
from .differences import select_chains
from .distributions import check_pair, normalize
from .errors import DimensionMismatch, DistributionError, RejectZeroWithNoSmoothing
from .measures import MEASURES, MeasureId

MAX_SEED = 2**64 - 1


class UsageError(Exception):
    """Bad input detected after argument parsing; maps to exit status 2."""


# -- ingestion ---------------------------------------------------------------


def _number(token, path, index):
    if isinstance(token, bool) or not isinstance(token, (int, float, str)):
        raise UsageError(f"{path}: atom {index}: expected a number, got {token!r}")
    try:
        return float(token)
    except ValueError:
        raise UsageError(f"{path}: atom {index}: expected a number, got {token!r}") from None


def read_weights(path, fmt="auto"):
    """Read a raw weight vector from a JSON array or a one-column CSV file."""
    path = Path(path)
    if fmt == "auto":
        fmt = "csv" if path.suffix.lower() in (".csv", ".txt") else "json"
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"{path}: cannot read file ({exc.strerror})") from None

    if fmt == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
        if not isinstance(data, list):
            raise UsageError(f"{path}: expected a JSON array of numbers")
        return [_number(v, path, i) for i, v in enumerate(data)]

    rows = [r for r in csv.reader(text.splitlines()) if r and any(c.strip() for c in r)]
    if rows and rows[0][0].strip().lower() == "weight":
        rows = rows[1:]
    out = []
    for i, row in enumerate(rows):
        if len(row) != 1:
            raise UsageError(f"{path}: atom {i}: expected one value per line, got {len(row)}")
        out.append(_number(row[0].strip(), path, i))
    return out


def load_distribution(path, smoothing, fmt="auto"):
    weights = read_weights(path, fmt)
    try:
        return normalize(weights, smoothing)
    except RejectZeroWithNoSmoothing as exc:
        raise UsageError(
            f"{path}: atom {exc.index}: weight is zero; rerun with --smooth EPS (EPS > 0) "
            "to apply additive smoothing"
        ) from None
    except DistributionError as exc:
        where = f"atom {exc.index}: " if exc.index is not None else ""
        raise UsageError(f"{path}: {where}{exc}") from None


# -- output ------------------------------------------------------------------


def format_compute(values, fmt):
    if fmt == "json":
        return json.dumps({k.value: v for k, v in values.items()}, indent=2) + "\n"
    lines = ["measure,value"] + [f"{k.value},{v:.17g}" for k, v in values.items()]
    return "\n".join(lines) + "\n"


def parse_measures(text):
    if text.strip().lower() == "all":
        return list(MeasureId)
    out = []
    for token in text.split(","):
        token = token.strip().upper()
        if not token:
            continue
        try:
            out.append(MeasureId(token))
        except ValueError:
            choices = ", ".join(m.value for m in MeasureId)
            raise UsageError(f"unknown measure {token!r} (choose from {choices})") from None
    if not out:
        raise UsageError("no measures selected")
    return out


def _write(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# -- commands ----------------------------------------------------------------


def cmd_compute(args):
    measures = parse_measures(args.measures)
    p = load_distribution(args.p, args.smooth, args.input_format)
    q = load_distribution(args.q, args.smooth, args.input_format)
    try:
        check_pair(p, q)
    except DimensionMismatch:
        raise UsageError(f"{args.p} has {p.n} atoms but {args.q} has {q.n}") from None
    values = {m: MEASURES[m](p, q) for m in measures}
    sys.stdout.write(format_compute(values, args.format))
    return 0


def cmd_audit(args):
    if args.pairs < 1:
        raise UsageError(f"--pairs must be at least 1, got {args.pairs}")
    if not 0 <= args.seed <= MAX_SEED:
        raise UsageError(f"--seed must be an unsigned 64-bit integer, got {args.seed}")
    if args.n_min < 2 or args.n_max < args.n_min:
        raise UsageError(f"bad atom range --n-min {args.n_min} --n-max {args.n_max}")
    if not (args.skew > 0 and math.isfinite(args.skew)):
        raise UsageError(f"--skew must be positive and finite, got {args.skew}")
    try:
        select_chains(args.chains)
    except KeyError as exc:
        raise UsageError(f"unknown chain {exc.args[0]!r}") from None

    report = run_audit(args.seed, args.pairs, args.n_min, args.n_max, args.skew, args.chains)
    _write(dumps(report), args.out)
    if args.out not in (None, "-"):
        for c in report["chains"]:
            status = "ok  " if c["violation_count"] == 0 else "FAIL"
            print(
                f"{status} {c['id']:<22} pairs={c['pairs']} "
                f"min_slack={c['min_slack']:.3e} violations={c['violation_count']}"
            )
    return 0 if total_violations(report) == 0 else 1


def _select_rows(text):
    if text.strip().lower() == "all":
        return list(SHARP_CONSTANTS)
    rows = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            rows.append(find_constant(token))
        except (KeyError, ValueError):
            known = ", ".join(r.ratio_id for r in SHARP_CONSTANTS)
            raise UsageError(f"unknown ratio {token!r} (known: {known})") from None
    if not rows:
        raise UsageError("no ratios selected")
    return rows


def cmd_bounds(args):
    rows = _select_rows(args.ratio)
    try:
        grid = GridSpec(args.grid_min, args.grid_max, args.points)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    certs = [certify(row, grid) for row in rows]
    config = {
        "command": "bounds",
        "ratios": [c.ratio_id for c in certs],
        "grid": {"x_min": grid.x_min, "x_max": grid.x_max, "points": grid.points,
                 "x_tol": grid.x_tol},
        "verify_tolerance": 1e-6,
    }
    report = build_report(config, certificates=certs)
    _write(dumps(report), args.out)
    if args.out not in (None, "-"):
        for c in certs:
            status = "ok  " if c.verified else "FAIL"
            print(
                f"{status} {c.ratio_id:<22} {c.kind:<8} estimate={c.numeric_estimate:.12g} "
                f"analytic={c.analytic_value} x={c.attaining_x:.9f}"
            )
    return 0 if all(c.verified for c in certs) else 1


# -- parser ------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="symdiv", description="Symmetric divergence measures and their inequalities."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="evaluate measures on two histograms")
    p.add_argument("--p", required=True, help="first histogram (JSON array or CSV column)")
    p.add_argument("--q", required=True, help="second histogram")
    p.add_argument("--measures", default="all", help="comma list of measure ids, or 'all'")
    p.add_argument("--smooth", type=float, default=0.0, metavar="EPS",
                   help="additive smoothing applied to every atom before normalizing")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--input-format", choices=("auto", "json", "csv"), default="auto",
                   help="input file format (default: by extension)")
    p.set_defaults(func=cmd_compute)

    a = sub.add_parser("audit", help="audit inequality chains on a seeded corpus")
    a.add_argument("--seed", type=int, required=True)
    a.add_argument("--pairs", type=int, required=True)
    a.add_argument("--n-min", type=int, default=2)
    a.add_argument("--n-max", type=int, default=64)
    a.add_argument("--skew", type=float, default=1e6)
    a.add_argument("--chains", default="all", help="comma list of chain ids or groups, or 'all'")
    a.add_argument("--out", help="report path (default: JSON on stdout)")
    a.set_defaults(func=cmd_audit)

    b = sub.add_parser("bounds", help="certify the sharp second-derivative-ratio constants")
    b.add_argument("--ratio", default="all", help="NUM/DEN id (comma list allowed) or 'all'")
    b.add_argument("--grid-min", type=float, default=1e-8)
    b.add_argument("--grid-max", type=float, default=1e8)
    b.add_argument("--points", type=int, default=200_001)
    b.add_argument("--out", help="report path (default: JSON on stdout)")
    b.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"symdiv {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
