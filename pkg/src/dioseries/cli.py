"""Command-line front end: one subcommand per analysis, JSON reports, CSV for shell tables.

Exit status 0 on success, 1 with a structured error for bad input, 2 when an
internal invariant (certificate, identity) fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from . import __version__, kernels
from .angles import SeriesKind, exact_rational, parse_theta
from .ball import PrecisionBudget, default_budget
from .cf import convergents, estimate_mu, expand, reference_mu
from .errors import DioseriesError, InvalidAngle, InvariantViolation, PreconditionError
from .liouville import build_schedule, certify, demo_divergence
from .measure import mc_estimate
from .rational import classify
from .series import accelerated, gelfond_asymptotic, asymptotic_ratios, partial_sum, polylog_sum, rate_slope, tail_bound
from .shells import fit_gap_exponent, fit_shell_scaling, shell_sums

SCHEMA = "dioseries.report/1"
CSV_COLUMNS = ("s", "epsilon", "count", "min_gap", "shell_sum_mid", "shell_sum_rad", "truncated")


class UsageError(PreconditionError):
    code = "UsageError"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; that status is reserved for invariant failures
    def error(self, message):
        raise UsageError(message)


# ----------------------------------------------------------------- CSV rows


@dataclass(frozen=True)
class ShellRow:
    s: int
    epsilon: Fraction
    count: int
    min_gap: Optional[int]
    shell_sum_mid: float
    shell_sum_rad: float
    truncated: bool

    @classmethod
    def from_record(cls, r) -> "ShellRow":
        return cls(r.s, r.epsilon, r.count, r.min_gap, float(r.shell_sum), r.shell_sum.rad_float(), r.truncated)


def rows_to_csv(rows: Sequence[ShellRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([
            r.s, str(r.epsilon), r.count, "" if r.min_gap is None else r.min_gap,
            repr(r.shell_sum_mid), repr(r.shell_sum_rad), "true" if r.truncated else "false",
        ])
    return buf.getvalue()


def csv_to_rows(text: str) -> List[ShellRow]:
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != CSV_COLUMNS:
        raise PreconditionError(f"unexpected CSV header {header}")
    out = []
    for s, eps, count, gap, mid, rad, trunc in reader:
        out.append(ShellRow(int(s), Fraction(eps), int(count), int(gap) if gap else None,
                            float(mid), float(rad), trunc == "true"))
    return out


# ---------------------------------------------------------------- commands


def _rational_arg(text: str):
    r = exact_rational(parse_theta(text))
    if r is None:
        raise InvalidAngle(f"{text!r} is not a rational angle")
    return r


def _budget(args) -> PrecisionBudget:
    return PrecisionBudget(working_digits=args.digits) if args.digits else default_budget()


def cmd_classify(args):
    r = _rational_arg(args.theta)
    p, q = r.p, r.q
    num, _, den = args.theta.partition("/")
    try:
        # keep the literal p/q so classify can report or reject the reduction
        p, q = int(num), int(den)
    except ValueError:
        pass
    kinds = ["sin", "cos"] if args.kind == "both" else [args.kind]
    reports = [classify(k, p, q, reduce=not args.strict).to_json() for k in kinds]
    return reports[0] if len(reports) == 1 else reports


def cmd_sum(args):
    res = partial_sum(args.kind, args.theta, args.alpha, args.N, _budget(args), args.accelerated, args.backend)
    out = res.to_json()
    r = exact_rational(parse_theta(args.theta))
    if args.full:
        if r is None:
            raise PreconditionError("--full needs a rational theta")
        out["full_series"] = accelerated(args.kind, r.p, r.q, args.alpha, backend=args.backend).to_json()
        out["tail_bound"] = tail_bound(args.kind, r.p, r.q, args.alpha, args.N).to_json()
    return out


def cmd_rate_cert(args):
    r = _rational_arg(args.theta)
    fit = rate_slope(args.kind, r.p, r.q, args.alpha, args.L, args.backend)
    return {
        "certificates": [c.to_json() for c in fit.certificates],
        "slope_per_lnL": fit.slope if len(args.L) > 1 else None,
        "expected_slope": 1.0 / r.q,
    }


def cmd_shells(args):
    summary = shell_sums(args.theta, args.kind, args.alpha, args.s_max, args.N, _budget(args), backend=args.backend)
    rows = [ShellRow.from_record(r) for r in summary.records]
    if args.format == "csv":
        return rows_to_csv(rows)
    out = {
        "rows": [dict(zip(CSV_COLUMNS, (r.s, str(r.epsilon), r.count, r.min_gap, r.shell_sum_mid, r.shell_sum_rad, r.truncated))) for r in rows],
        "deep_count": summary.deep_count,
        "deep_sum": summary.deep_sum.to_json(),
        "total": summary.total.to_json(),
        "ambiguous_resolved": summary.ambiguous_resolved,
    }
    if args.fit:
        lo = min(4, args.s_max)
        try:
            out["gap_fit"] = fit_gap_exponent(args.theta, args.kind, (lo, args.s_max), records=summary.records).to_json()
        except DioseriesError as e:
            out["gap_fit"] = {"error": e.code, "message": str(e)}
        try:
            sc = fit_shell_scaling(summary.records, (lo, args.s_max))
            out["scaling"] = {
                "slope_log2": sc.slope_log2, "expected_slope": sc.expected_slope,
                "shape_constant": sc.shape_constant, "shape_factor": sc.shape_factor,
                "shells_used": sc.shells_used,
            }
        except DioseriesError as e:
            out["scaling"] = {"error": e.code, "message": str(e)}
    return out


def cmd_cf(args):
    exp = expand(args.theta, args.K)
    conv = convergents(exp)
    out = {
        "expansion": exp.to_json(),
        "convergents": [{"k": c.k, "p": str(c.p), "q": str(c.q), "sandwich": c.sandwich} for c in conv],
    }
    try:
        out["mu"] = estimate_mu(exp).to_json()
    except DioseriesError as e:
        out["mu"] = {"error": e.code, "message": str(e)}
    ref = reference_mu(args.theta)
    out["reference_mu"] = None if ref is None else {"value": ref[0], "source": ref[1]}
    return out


def cmd_liouville(args):
    parts = args.interval.split(",")
    if len(parts) != 2:
        raise PreconditionError("--interval expects x1,x2")
    sched = build_schedule(parts[0].strip(), parts[1].strip(), args.depth)
    out = {
        "schedule": sched.to_json(),
        "certificates": [certify(sched, k).to_json() for k in range(1, args.depth + 1)],
    }
    if args.demo_q is not None:
        out["demo"] = demo_divergence(args.demo_q, args.demo_k, args.demo_budget, backend=args.backend).to_json()
    return out


def cmd_measure(args):
    return mc_estimate(args.alpha, args.N, args.samples, args.seed, args.backend).to_json()


def cmd_gelfond(args):
    if args.z is not None:
        num = polylog_sum(args.z, args.alpha, backend=args.backend)
        den = gelfond_asymptotic(args.z, args.alpha)
        return {
            "polylog": num.to_json(),
            "asymptotic": den.to_json(),
            "ratio": float(num) / float(den),
        }
    ratios = asymptotic_ratios(args.alpha, range(args.j_min, args.j_max + 1), backend=args.backend)
    return {"z": "1 - 2^-j", "ratios": [{"j": j, "ratio": r.to_json()} for j, r in ratios]}


COMMANDS = {
    "classify": cmd_classify,
    "sum": cmd_sum,
    "rate-cert": cmd_rate_cert,
    "shells": cmd_shells,
    "cf": cmd_cf,
    "liouville": cmd_liouville,
    "measure": cmd_measure,
    "gelfond": cmd_gelfond,
}


def _alpha(text: str) -> str:
    # kept as text so "0.6" stays the exact rational 3/5
    try:
        Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid alpha {text!r}")
    return text


def _int(text: str) -> int:
    try:
        v = Fraction(text.replace("_", ""))
    except ValueError:
        v = Fraction(float(text))
    if v.denominator != 1:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    return int(v)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dioseries", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"dioseries {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=int, default=None, help="working decimal digits (default: env DIOSERIES_DIGITS or 30)")
    common.add_argument("--backend", choices=["numba", "numpy"], default=None)
    common.add_argument("--indent", type=int, default=2)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def kind_arg(sp, choices=("sin", "cos"), default="sin"):
        sp.add_argument("--kind", choices=choices, default=default)

    sp = sub.add_parser("classify", parents=[common], help="convergence class at a rational angle")
    kind_arg(sp, ("sin", "cos", "both"))
    sp.add_argument("--theta", required=True)
    sp.add_argument("--strict", action="store_true", help="reject unreduced p/q instead of reducing")

    sp = sub.add_parser("sum", parents=[common], help="certified partial sum")
    kind_arg(sp)
    sp.add_argument("--theta", required=True)
    sp.add_argument("--alpha", type=_alpha, default="1")
    sp.add_argument("--N", type=_int, required=True)
    sp.add_argument("--accelerated", action="store_true", help="sum by residue classes (rational theta)")
    sp.add_argument("--full", action="store_true", help="also report the full series value and tail bound")

    sp = sub.add_parser("rate-cert", parents=[common], help="divergence-rate certificates for 4 | q")
    kind_arg(sp)
    sp.add_argument("--theta", required=True)
    sp.add_argument("--alpha", type=_alpha, default="1")
    sp.add_argument("--L", type=_int, nargs="+", required=True)

    sp = sub.add_parser("shells", parents=[common], help="dyadic shell decomposition at an irrational angle")
    kind_arg(sp, default="cos")
    sp.add_argument("--theta", required=True)
    sp.add_argument("--alpha", type=_alpha, default="1")
    sp.add_argument("--s-max", dest="s_max", type=int, default=12)
    sp.add_argument("--N", type=_int, default=10**6)
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp.add_argument("--fit", action="store_true", help="add gap-exponent and scaling fits")

    sp = sub.add_parser("cf", parents=[common], help="continued fraction and irrationality-measure estimate")
    sp.add_argument("--theta", required=True)
    sp.add_argument("--K", type=int, default=30)

    sp = sub.add_parser("liouville", parents=[common], help="exponent schedule and divergence certificates")
    sp.add_argument("--interval", required=True, help="x1,x2")
    sp.add_argument("--depth", type=int, default=1)
    sp.add_argument("--demo-q", dest="demo_q", type=int, default=None)
    sp.add_argument("--demo-k", dest="demo_k", type=float, default=0.0)
    sp.add_argument("--demo-budget", dest="demo_budget", type=_int, default=10**6)

    sp = sub.add_parser("measure", parents=[common], help="Monte-Carlo check of the averaged absolute series")
    sp.add_argument("--alpha", type=_alpha, required=True)
    sp.add_argument("--N", type=_int, required=True)
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("gelfond", parents=[common], help="polylog sum against its z -> 1 asymptotic")
    sp.add_argument("--alpha", type=_alpha, required=True)
    sp.add_argument("--z", type=_alpha, default=None)
    sp.add_argument("--j-min", dest="j_min", type=int, default=8)
    sp.add_argument("--j-max", dest="j_max", type=int, default=16)
    return p


def _envelope(args, result) -> dict:
    config = {k: v for k, v in vars(args).items() if k not in ("indent",)}
    budget = _budget(args)
    return {
        "schema": SCHEMA,
        "version": __version__,
        "command": args.command,
        "config": config,
        "precision": {
            "working_digits": budget.working_digits,
            "target_radius": budget.target_radius,
            "backend": kernels.backend_name(args.backend),
        },
        "result": result,
    }


def _error(code: str, message: str, status: int, out) -> int:
    json.dump({"schema": SCHEMA, "version": __version__, "error": {"code": code, "message": message}}, out, indent=2)
    out.write("\n")
    return status


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        result = COMMANDS[args.command](args)
    except InvariantViolation as e:
        return _error(e.code, str(e), 2, out)
    except DioseriesError as e:
        return _error(e.code, str(e), 1, out)
    except (ValueError, ZeroDivisionError, OverflowError) as e:
        return _error(type(e).__name__, str(e), 1, out)
    if isinstance(result, str):
        out.write(result)
    else:
        json.dump(_envelope(args, result), out, indent=args.indent, default=str)
        out.write("\n")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
