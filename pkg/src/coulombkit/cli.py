"""Command-line front end: eval, zeros, zeta, scan and verify.

Exit status: 0 success, 1 a verification found violations, 2 malformed
flags, 3 a parameter outside its domain (or any other library error).
"""

import argparse
import csv
import io
import json
import math
import sys

from . import acceptance
from .core import CoulombParams, SeriesPolicy, eval_derivative, eval_normalized, eval_regular, ode_residual
from .errors import CoulombError, DomainError
from .inequalities import SCANS, scan
from .zeros import BracketPolicy, zero_table
from .zeta import (
    zeta_table_closed_form,
    zeta_table_from_zeros,
    zeta_via_coefficients,
    zeta_via_quadratic,
)

ZETA_ROUTES = ("coefficient_recurrence", "quadratic_recurrence", "closed_form", "zero_sum")


# -- argument types ---------------------------------------------------------------------


def grid_spec(text):
    """start:stop:step with both ends included (within half a step), or a single number."""
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number or start:stop:step grid: {text!r}")
    if len(nums) == 1:
        return nums
    if len(nums) != 3:
        raise argparse.ArgumentTypeError(f"grid must be start:stop:step, got {text!r}")
    start, stop, step = nums
    if not step > 0 or stop < start:
        raise argparse.ArgumentTypeError(f"grid needs step > 0 and stop >= start, got {text!r}")
    n = int(math.floor((stop - start) / step + 0.5))
    return [_tidy(start + k * step) for k in range(n + 1)]


def _tidy(x):
    # strip the last-bit noise of start + k*step so 0.1:0.3:0.1 prints as 0.3
    y = round(x, 12)
    return 0.0 if y == 0 else y


def positive_float(text):
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return x


def criteria_list(text):
    try:
        nums = sorted({int(t) for t in text.split(",")})
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated criterion numbers, got {text!r}")
    if any(not 1 <= n <= len(acceptance.CRITERIA) for n in nums):
        raise argparse.ArgumentTypeError(f"criteria are numbered 1..{len(acceptance.CRITERIA)}")
    return nums


# -- output helpers ----------------------------------------------------------------------


def clean(obj):
    """Make a document JSON-safe and deterministic: -0.0 -> 0.0, non-finite -> None."""
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return 0.0 if obj == 0 else obj
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    return obj


def dump_json(doc):
    # Python's float repr is the shortest string that round-trips
    return json.dumps(clean(doc), indent=2, allow_nan=False) + "\n"


def fmt(x, full=False):
    """17 significant digits when ``full`` (CSV), otherwise the shortest round-trip form."""
    if isinstance(x, float):
        if x == 0:
            x = 0.0
        return "%.17g" % x if full else repr(x)
    return str(x)


def dump_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v, full=True) for v in r])
    return buf.getvalue()


def dump_text(header, rows):
    cells = [header] + [[fmt(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "".join("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n" for r in cells)


def emit(fmt_name, header, rows, doc):
    if fmt_name == "json":
        return dump_json(doc)
    if fmt_name == "csv":
        return dump_csv(header, rows)
    return dump_text(header, rows)


# -- commands ------------------------------------------------------------------------------


def _params(args):
    return CoulombParams(args.L, args.eta)


def _series(args):
    return SeriesPolicy(rel_tol=args.rel_tol, rho_max=args.rho_max)


def _rhos(args):
    if args.rho is not None and args.rho_range is not None:
        raise DomainError("give either --rho or --rho-range, not both")
    if args.rho is not None:
        return [args.rho]
    if args.rho_range is not None:
        return args.rho_range
    raise DomainError("eval needs --rho or --rho-range")


def cmd_eval(args):
    p, pol = _params(args), _series(args)
    header = ["rho", "F", "NF", "dF", "ode_residual"]
    rows = []
    for r in _rhos(args):
        f = eval_regular(p, r, pol).value
        nf = eval_normalized(p, r, pol).value
        try:
            d = eval_derivative(p, r, pol).value
        except DomainError:
            d = math.nan
        res = ode_residual(p, r, pol) if r > 0 else math.nan
        rows.append([r, f, nf, d, res])
    doc = {"L": p.L, "eta": p.eta, "rows": [dict(zip(header, r)) for r in rows]}
    return emit(args.format, header, rows, doc), 0


def cmd_zeros(args):
    p, pol = _params(args), _series(args)
    brackets = BracketPolicy(refine_tol=args.refine_tol, max_scan=args.rho_max)
    table = zero_table(p, args.count, brackets, pol)
    header = ["n", "positive", "negative"]
    rows = [[n + 1, x, y] for n, (x, y) in enumerate(zip(table.positive, table.negative))]
    return emit(args.format, header, rows, table.to_dict()), 0


def _zeta_table(args):
    p = _params(args)
    if args.route == "coefficient_recurrence":
        return zeta_via_coefficients(p, args.mmax)
    if args.route == "quadratic_recurrence":
        return zeta_via_quadratic(p, args.mmax)
    if args.route == "closed_form":
        return zeta_table_closed_form(p, min(args.mmax, 3))
    brackets = BracketPolicy(refine_tol=args.refine_tol, max_scan=args.rho_max)
    table = zero_table(p, args.count, brackets, _series(args))
    return zeta_table_from_zeros(p, args.mmax, table)


def cmd_zeta(args):
    t = _zeta_table(args)
    header = ["s", "value", "route", "est_error"]
    rows = list(t.rows())
    return emit(args.format, header, rows, t.to_dict()), 0


def cmd_scan(args):
    if args.rho_range is None:
        raise DomainError("scan needs --rho-range")
    rep = scan(args.name, args.L_grid or [args.L], args.eta_grid or [args.eta], args.rho_range, args.tol)
    if args.format == "json":
        out = dump_json(rep.to_dict())
    elif args.format == "csv":
        out = rep.to_csv()
    else:
        inside = sum(s.in_region for s in rep.samples)
        m = rep.min_margin_in_region
        out = (f"inequality: {rep.name}\n"
               f"samples: {len(rep.samples)} ({inside} in region)\n"
               f"min margin in region: {fmt(m) if math.isfinite(m) else 'none'}\n"
               f"violations: {len(rep.violations)} (tol {fmt(rep.tol)})\n")
        for i in rep.violations[:20]:
            s = rep.samples[i]
            out += f"  L={fmt(s.L)} eta={fmt(s.eta)} rho={fmt(s.rho)} margin={fmt(s.margin)}\n"
        if len(rep.violations) > 20:
            out += f"  ... {len(rep.violations) - 20} more\n"
    return out, (0 if rep.ok else 1)


def cmd_verify(args):
    results = acceptance.run_all(args.criteria)
    ok = all(r.passed for r in results)
    if args.format == "json":
        docs = []
        for r in results:
            d = r.to_dict()
            if not args.timings:
                del d["seconds"]
            docs.append(d)
        out = dump_json({"passed": ok, "criteria": docs})
    elif args.format == "csv":
        header = ["number", "title", "passed", "numeric_ok", "within_time", "limit"]
        if args.timings:
            header.append("seconds")
        rows = []
        for r in results:
            row = [r.number, r.title, int(r.passed), int(r.numeric_ok), int(r.within_time), r.limit]
            rows.append(row + ([r.seconds] if args.timings else []))
        out = dump_csv(header, rows)
    else:
        lines = []
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            t = f" ({r.seconds:.2f}s of {r.limit:g}s)" if args.timings else ""
            lines.append(f"[{status}] {r.number:2d}. {r.title}{t}")
        lines.append(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
        out = "\n".join(lines) + "\n"
    return out, (0 if ok else 1)


COMMANDS = {"eval": cmd_eval, "zeros": cmd_zeros, "zeta": cmd_zeta, "scan": cmd_scan, "verify": cmd_verify}


# -- parser -------------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")
    common.add_argument("--rel-tol", type=positive_float, default=1e-16, help="series truncation tolerance")
    common.add_argument("--refine-tol", type=positive_float, default=1e-12, help="zero bisection width")
    common.add_argument("--rho-max", type=positive_float, default=25.0, help="largest |rho| for the series")

    params = argparse.ArgumentParser(add_help=False)
    params.add_argument("--L", type=float, default=0.0, help="order L > -3/2")
    params.add_argument("--eta", type=float, default=0.0, help="Sommerfeld parameter")

    parser = argparse.ArgumentParser(prog="coulombkit", description="Regular Coulomb wave functions, "
                                     "their zeros, zeta functions of the zeros, and inequality checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common, params], help="F, normalized F, F' and the ODE residual")
    p.add_argument("--rho", type=float)
    p.add_argument("--rho-range", type=grid_spec, metavar="START:STOP:STEP")

    p = sub.add_parser("zeros", parents=[common, params], help="positive and negative zeros")
    p.add_argument("--count", type=int, default=5)

    p = sub.add_parser("zeta", parents=[common, params], help="zeta_s for s = 2..mmax")
    p.add_argument("--mmax", type=int, default=6)
    p.add_argument("--route", choices=ZETA_ROUTES, default="coefficient_recurrence")
    p.add_argument("--count", type=int, default=1000, help="zeros per sign for the zero_sum route")

    p = sub.add_parser("scan", parents=[common, params], help="margins of one inequality over a grid")
    p.add_argument("--name", choices=sorted(SCANS), required=True)
    p.add_argument("--L-grid", type=grid_spec, metavar="START:STOP:STEP")
    p.add_argument("--eta-grid", type=grid_spec, metavar="START:STOP:STEP")
    p.add_argument("--rho-range", type=grid_spec, metavar="START:STOP:STEP")
    p.add_argument("--tol", type=positive_float, help="violation threshold (default per inequality)")

    p = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    p.add_argument("--criteria", type=criteria_list, help="comma-separated subset, e.g. 1,2,9")
    p.add_argument("--timings", action="store_true", help="include wall-clock seconds in the output")
    return parser


VALUE_FLAGS = ("--L", "--eta", "--rho", "--rho-range", "--L-grid", "--eta-grid")


def _attach_negative_values(argv):
    """Turn '--eta-grid -2:0:1' into '--eta-grid=-2:0:1' so argparse does not read it as a flag."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if tok in VALUE_FLAGS and len(nxt) > 1 and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == "."):
            out.append(f"{tok}={nxt}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_negative_values(argv))
    if getattr(args, "count", 0) < 0:
        build_parser().error("--count must be non-negative")
    try:
        out, status = COMMANDS[args.command](args)
    except CoulombError as exc:
        print(f"coulombkit: error: {exc}", file=sys.stderr)
        return 3
    sys.stdout.write(out)
    return status


if __name__ == "__main__":
    sys.exit(main())
