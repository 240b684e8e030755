"""
Command-line interface.

Every subcommand writes one deterministic JSON document to standard output
(field order fixed, floats with 17 significant digits).  Exit codes: 0 for a
successful run or a positive verdict, 1 for a detector-negative verdict, 2 for
usage and computational errors.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import acceptance
from .characterize import (
    ZERO_THRESHOLD,
    SIGMA_CONSTANT_TOL,
    Verdict,
    det_k,
    slant_report,
    torsion_residual_report,
    uniform_grid,
)
from .errors import CurveError, DegenerateFrame, NoConvergence, ParseError
from .expr import parse_curve
from .families import FamilyCase, TorsionFamily, fit_torsion_family
from .frame import CurveKind, classify_curve, curvature_jets, null_cartan, nonnull_frenet
from .serialize import dumps
from .synthesize import DEFAULT_STEP, FrameCase, frame_case_for, integrate_frame

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2

SCHEMAS = {
    "classify": "{command, curve, result: {kind, s, eps_T, g_d1_d1, g_d2_d2, note}}",
    "frenet": "{command, curve, result: {type, s, T, N, B, kappa, tau[, eps_T, eps_N, eps_B]}}",
    "detect": "{command, curve, k, result: {grid, values, scale, verdict, threshold, "
              "dropped_points}}",
    "slant": "{command, curve, result: {grid, values, mean, std, constant, tolerance, "
             "dropped_points, note}}",
    "residual": "{command, tau, eps_product, result: {grid, values, scale, verdict, threshold, "
                "dropped_points}}",
    "fit": "{command, samples, result: {family: {case, params, sign, inner_sign}, rms, "
           "iterations, converged}, rms_threshold}",
    "generate": "{command, out, format, points, meta: {case, kappa, tau, step, corrected, "
                "max_step_drift, gram_drift}}; the file holds columns "
                "s,px0,px1,px2[,T0..B2]",
    "export": "{command, curve, out, format, points}; the file holds columns "
              "s,px0,px1,px2[,T0..B2]",
    "verify-paper": "{command, passed, results: [{criterion, name, passed, detail, measured, "
                    "seconds}]}",
}


class UsageError(Exception):
    pass


# -- argument parsing ----------------------------------------------------------


def _floats(text: str, n: int | None, what: str) -> list[float]:
    parts = text.split(":")
    if n is not None and len(parts) != n:
        raise argparse.ArgumentTypeError(f"{what} must look like {':'.join('ABN'[:n])}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number in {what} {text!r}") from None


def grid_arg(text: str) -> np.ndarray:
    a, b, n = _floats(text, 3, "grid")
    if n != int(n) or n < 1:
        raise argparse.ArgumentTypeError("grid point count must be a positive integer")
    if not b > a and n > 1:
        raise argparse.ArgumentTypeError("grid needs A < B")
    return uniform_grid(a, b, int(n))


def range_arg(text: str) -> tuple:
    a, b = _floats(text, 2, "range")
    return (a, b)


def params_arg(text: str) -> dict:
    out = {}
    for item in filter(None, (p.strip() for p in text.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"parameter {item!r} is not NAME=VALUE")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad value in {item!r}") from None
    return out


def exclude_arg(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad exclusion list {text!r}") from None


def sign_arg(text: str) -> int:
    v = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1}.get(text.strip())
    if v is None:
        raise argparse.ArgumentTypeError("sign must be +1 or -1")
    return v


def _add_curve(p):
    p.add_argument("--curve", required=True, help='curve expression, e.g. "(s, cos(s), sin(s))"')
    p.add_argument("--domain", type=range_arg, help="parameter domain A:B")
    p.add_argument("--exclude", type=exclude_arg, default=[],
                   help="comma-separated excluded parameter values (poles)")


def _add_family(p, required: bool = False):
    p.add_argument("--family", choices=[c.value for c in FamilyCase], required=required,
                   help="closed-form torsion family")
    p.add_argument("--params", type=params_arg, default={}, help="family parameters a=..,b=..")
    p.add_argument("--sign", type=sign_arg, default=1, help="outer sign of the family")
    p.add_argument("--inner-sign", type=sign_arg, default=1,
                   help="+1 or -1 inside the bracket of spacelike-sn-or-timelike")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lorentz-curves",
        description="Frames, determinant tests and slant-helix synthesis for curves in "
                    "Minkowski 3-space (metric diag(-1, 1, 1)).",
        epilog="Exit codes: 0 success / positive verdict, 1 negative verdict, 2 error. "
               "Values starting with '-' need the --opt=VALUE form, e.g. --grid=-1:1:21.",
    )
    parser.add_argument("--json-errors", action="store_true",
                        help="report computational errors as JSON on standard output")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_):
        p = sub.add_parser(name, help=help_, description=help_,
                           epilog=f"Output schema: {SCHEMAS[name]}")
        # accepted after the subcommand too; SUPPRESS keeps the global value
        p.add_argument("--json-errors", action="store_true", default=argparse.SUPPRESS,
                       help="report computational errors as JSON on standard output")
        return p

    p = add("classify", "causal type and parametrization of a curve at one parameter")
    _add_curve(p)
    p.add_argument("--at", type=float, required=True)

    p = add("frenet", "Frenet (non-null) or Cartan (null) apparatus at one parameter")
    _add_curve(p)
    p.add_argument("--at", type=float, required=True)

    p = add("detect", "determinant test det(a^(k), a^(k+1), a^(k+2)) over a grid")
    _add_curve(p)
    p.add_argument("--grid", type=grid_arg, required=True, help="A:B:N uniform grid")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--threshold", type=float, default=ZERO_THRESHOLD)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--figure", help="write a residual plot to this file")

    p = add("slant", "slant-helix indicator samples and constancy verdict")
    _add_curve(p)
    p.add_argument("--grid", type=grid_arg, required=True)
    p.add_argument("--tolerance", type=float, default=SIGMA_CONSTANT_TOL)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--figure")

    p = add("residual", "torsion ODE residual of a family or torsion expression")
    _add_family(p)
    p.add_argument("--tau", help="torsion expression in s (instead of --family)")
    p.add_argument("--eps", choices=["-1", "+1", "1", "null"],
                   help="eps_T*eps_B for --tau (or null)")
    p.add_argument("--grid", type=grid_arg, required=True)
    p.add_argument("--threshold", type=float, default=ZERO_THRESHOLD)
    p.add_argument("--figure")

    p = add("fit", "fit a torsion family to (s, tau) samples")
    p.add_argument("--samples", required=True, help="CSV with header s,tau")
    p.add_argument("--family", choices=[c.value for c in FamilyCase], required=True)
    p.add_argument("--rms-threshold", type=float, default=1e-6,
                   help="exit 1 when the fit RMS exceeds this")

    p = add("generate", "integrate a unit-curvature curve from its torsion")
    _add_family(p)
    p.add_argument("--tau", help="torsion expression in s (instead of --family)")
    p.add_argument("--case", choices=[c.value for c in FrameCase],
                   help="frame signature for --tau")
    p.add_argument("--causal", choices=["spacelike", "timelike"],
                   help="realisation of spacelike-sn-or-timelike")
    p.add_argument("--range", type=range_arg, required=True, help="A:B integration range")
    p.add_argument("--step", type=float, default=DEFAULT_STEP)
    p.add_argument("--out", required=True, help="output file")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--frame", action="store_true", help="include T, N, B columns")
    p.add_argument("--figure", help="write coordinate projections to this file")

    p = add("export", "sample a closed-form curve (and optionally its frame) to a file")
    _add_curve(p)
    p.add_argument("--grid", type=grid_arg, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--frame", action="store_true", help="include T, N, B columns")
    p.add_argument("--figure", help="write coordinate projections to this file")

    add("verify-paper", "run the acceptance suite and print a pass/fail table")
    return parser


# -- commands ------------------------------------------------------------------


def _curve(args):
    return parse_curve(args.curve, args.domain, args.exclude)


def _family(args) -> TorsionFamily:
    return TorsionFamily(FamilyCase(args.family), args.params, args.sign, args.inner_sign)


def cmd_classify(args):
    curve = _curve(args)
    return {"command": "classify", "curve": args.curve,
            "result": classify_curve(curve, args.at).to_dict()}, EXIT_OK


def cmd_frenet(args):
    curve = _curve(args)
    cls = classify_curve(curve, args.at)
    if cls.kind is CurveKind.NULL_PSEUDO_ARC:
        app = null_cartan(curve, args.at)
    elif cls.kind is CurveKind.NON_NULL_UNIT_SPEED:
        app = nonnull_frenet(curve, args.at)
    else:
        raise DegenerateFrame(f"no frame for a curve of kind {cls.kind.value}"
                         + (f" ({cls.note})" if cls.note else ""))
    return {"command": "frenet", "curve": args.curve, "result": app.to_dict()}, EXIT_OK


def _verdict_exit(verdict: Verdict) -> int:
    return EXIT_OK if verdict is Verdict.VANISHES else EXIT_NEGATIVE


def cmd_detect(args):
    curve = _curve(args)
    report = det_k(curve, args.k, args.grid, args.threshold, args.workers)
    if args.figure:
        from .plotting import plot_residual
        plot_residual(report, args.figure, f"det k={args.k}: {report.verdict.value}")
    return ({"command": "detect", "curve": args.curve, "k": args.k, "result": report.to_dict()},
            _verdict_exit(report.verdict))


def cmd_slant(args):
    curve = _curve(args)
    report = slant_report(curve, args.grid, args.tolerance, args.workers)
    if args.figure:
        from .plotting import plot_slant
        plot_slant(report, args.figure)
    return ({"command": "slant", "curve": args.curve, "result": report.to_dict()},
            EXIT_OK if report.constant else EXIT_NEGATIVE)


def _torsion_source(args):
    if (args.family is None) == (args.tau is None):
        raise UsageError("give exactly one of --family or --tau")
    if args.family is not None:
        fam = _family(args)
        return fam, fam.describe(), fam.case.eps_product
    if args.command == "residual":
        if args.eps is None:
            raise UsageError("--tau needs --eps (-1, +1 or null)")
        eps = None if args.eps == "null" else int(args.eps)
        return args.tau, args.tau, eps
    return args.tau, args.tau, None


def cmd_residual(args):
    tau, desc, eps = _torsion_source(args)
    report = torsion_residual_report(tau, args.grid, eps, args.threshold)
    if args.figure:
        from .plotting import plot_residual
        plot_residual(report, args.figure, f"{desc}: {report.verdict.value}")
    return ({"command": "residual", "tau": desc, "eps_product": eps,
             "result": report.to_dict()}, _verdict_exit(report.verdict))


def read_samples(path: str) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if header[:2] != ["s", "tau"]:
            raise UsageError(f"{path}: expected header 's,tau', got {','.join(header)!r}")
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                raise UsageError(f"{path}:{line_no}: bad sample row {row!r}") from None
    return np.array(rows, dtype=float).reshape(-1, 2)


def cmd_fit(args):
    samples = read_samples(args.samples)
    result = fit_torsion_family(samples, args.family)
    code = EXIT_OK if result.rms <= args.rms_threshold else EXIT_NEGATIVE
    return ({"command": "fit", "samples": args.samples, "result": result.to_dict(),
             "rms_threshold": args.rms_threshold}, code)


def cmd_generate(args):
    tau, desc, _ = _torsion_source(args)
    if isinstance(tau, TorsionFamily):
        case = frame_case_for(tau, args.causal)
        if args.case and FrameCase(args.case) is not case:
            raise UsageError(f"family {tau.case.value} needs frame case {case.value}")
    else:
        if args.case is None:
            raise UsageError("--tau needs --case")
        case = FrameCase(args.case)
    curve = integrate_frame(case, tau, None, args.range, args.step)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        if args.format == "csv":
            curve.to_csv(fh, frame=args.frame)
        else:
            fh.write(dumps(curve.to_dict(frame=args.frame)) + "\n")
    if args.figure:
        from .plotting import plot_curve
        plot_curve(curve.s, curve.position, args.figure, desc)
    meta = {"case": case.value, "kappa": curve.kappa, **curve.meta}
    return ({"command": "generate", "out": args.out, "format": args.format,
             "points": len(curve), "meta": meta}, EXIT_OK)


def _write_samples(path, fmt, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if fmt == "csv":
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([format(float(v), ".17g") for v in row])
        else:
            fh.write(dumps({"columns": header, "rows": [[float(v) for v in r] for r in rows]})
                     + "\n")


def cmd_export(args):
    curve = _curve(args)
    header = ["s", "px0", "px1", "px2"]
    if args.frame:
        header += [f"{v}{k}" for v in "TNB" for k in range(3)]
    rows = []
    for s in args.grid:
        row = [s, *curve.position(float(s))]
        if args.frame:
            app = curvature_jets(curve, float(s)).apparatus
            row += [*app.T, *app.N, *app.B]
        rows.append(row)
    _write_samples(args.out, args.format, header, rows)
    if args.figure:
        from .plotting import plot_curve
        plot_curve(args.grid, np.array([r[1:4] for r in rows]), args.figure, args.curve)
    return ({"command": "export", "curve": args.curve, "out": args.out, "format": args.format,
             "points": len(rows)}, EXIT_OK)


def cmd_verify(args):
    results = acceptance.run_all()
    print(acceptance.format_table(results), file=sys.stderr)
    passed = all(r.passed for r in results)
    return ({"command": "verify-paper", "passed": passed, "results": results},
            EXIT_OK if passed else EXIT_NEGATIVE)


COMMANDS = {
    "classify": cmd_classify,
    "frenet": cmd_frenet,
    "detect": cmd_detect,
    "slant": cmd_slant,
    "residual": cmd_residual,
    "fit": cmd_fit,
    "generate": cmd_generate,
    "export": cmd_export,
    "verify-paper": cmd_verify,
}


def _error_payload(exc: Exception) -> dict:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ParseError):
        payload["offset"] = exc.offset
    if isinstance(exc, NoConvergence):
        payload["rms"] = exc.rms
        payload["params"] = exc.params
    return payload


def run(argv=None, stdout=None) -> int:
    """Run the CLI on ``argv`` and return the exit code."""
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, code = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.exit(EXIT_ERROR, f"{parser.prog} {args.command}: error: {exc}\n")
    except (CurveError, ValueError, ArithmeticError, OSError) as exc:
        if args.json_errors:
            stdout.write(dumps(_error_payload(exc)) + "\n")
        else:
            print(f"{parser.prog} {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    stdout.write(dumps(payload) + "\n")
    return code


def main(argv=None) -> int:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
