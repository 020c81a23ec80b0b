"""Command-line front end.

Every subcommand reads JSON inputs, calls one library operation and writes
JSON or CSV.  Exit status is 0 on success, 2 for invalid input or usage and
3 for numerical-failure verdicts (including a violated domination test).
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .decompose import TRACE_COLUMNS, HalfCircleReport, ac_mass_trace, halfcircle_example, lebesgue_decompose
from .errors import CircleKitError, NumericalFailure, ValidationError
from .forms import FormPair, resolvent_identity_residual, simon_decompose
from .kernel import Domination, coeff_kernel, default_points, dominates_rk, gram
from .kernelpair import FiniteKernel, kernel_lebesgue, orthogonal_split_check
from .measure import CircleMeasure, moments
from .transform import ContractiveFunction, b_from_measure, clark_measure, herglotz, is_extreme, radial_trace, szego_distance
from .trigpoly import AnalyticPoly, TrigPoly, fejer_riesz_factor

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


class _Verdict(Exception):
    """Raised after output is written when the result itself signals failure."""


# I/O helpers ------------------------------------------------------------------


def _load_json(path: str):
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"input file not found: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc


def _load_measure(path: str) -> CircleMeasure:
    return CircleMeasure.from_json(_load_json(path))


def _cnum(v) -> complex:
    if isinstance(v, dict):
        return complex(v["re"], v.get("im", 0.0))
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(v[0], v[1])
    return complex(v)


def _matrix(obj) -> np.ndarray:
    try:
        return np.array([[_cnum(v) for v in row] for row in obj], dtype=complex)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed matrix: {exc}") from exc


def _points(args) -> np.ndarray:
    if getattr(args, "points", None):
        obj = _load_json(args.points)
        obj = obj.get("points", obj) if isinstance(obj, dict) else obj
        return np.array([_cnum(v) for v in obj], dtype=complex)
    return default_points(args.grid)


def _cjson(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _fmt(args) -> str:
    if args.format:
        return args.format
    if args.out and args.out.endswith(".csv"):
        return "csv"
    return "json"


def _emit(args, obj=None, rows=None, columns=None) -> None:
    """Write ``obj`` as JSON or ``rows`` as CSV to ``--out`` or standard output."""
    fmt = _fmt(args)
    if fmt == "csv":
        if rows is None:
            raise ValidationError(f"'{args.command}' has no CSV form")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
        text = buf.getvalue()
    else:
        if obj is None:
            obj = [dict(zip(columns, r)) for r in rows]
        text = json.dumps(obj, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _write_csv(path: str, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)


# subcommands --------------------------------------------------------------------


def cmd_moments(args):
    mu = _load_measure(args.mu)
    ms = moments(mu, args.N)
    rows = [[n, v.real, v.imag] for n, v in enumerate(np.asarray(ms))]
    _emit(args, {"N": args.N, "moments": [_cjson(v) for v in np.asarray(ms)]}, rows, ("n", "re", "im"))


def cmd_herglotz(args):
    mu = _load_measure(args.mu)
    if args.trace:
        rows = radial_trace(b_from_measure(mu), grid=args.grid)
        _write_csv(args.trace, ("theta", "r", "re_H", "fatou_quotient"),
                   [[r["theta"], r["r"], r["re_H"], r["fatou_quotient"]] for r in rows])
    z = np.array([_cnum(v) for v in args.z], dtype=complex) if args.z else _points(args)
    H = np.atleast_1d(herglotz(mu, z))
    rows = [[p.real, p.imag, h.real, h.imag] for p, h in zip(z, H)]
    _emit(args, {"values": [{"z": _cjson(p), "H": _cjson(h)} for p, h in zip(z, H)]}, rows,
          ("z_re", "z_im", "H_re", "H_im"))


def cmd_clark(args):
    if args.b is not None:
        b = ContractiveFunction.polynomial(AnalyticPoly.from_json(_load_json(args.b)).coeffs)
    elif args.constant is not None:
        b = ContractiveFunction.constant(_cnum(json.loads(args.constant)))
    else:
        raise ValidationError("clark needs --b or --constant")
    mu = clark_measure(b, grid=args.grid)
    _emit(args, mu.to_json())


def cmd_szego(args):
    mu = _load_measure(args.mu)
    d = szego_distance(mu)
    _emit(args, {"distance": d, "extremeness": is_extreme(mu).value}, [[d, is_extreme(mu).value]],
          ("distance", "extremeness"))


def cmd_dominate(args):
    mu, lam = _load_measure(args.mu), _load_measure(args.lam)
    pts = _points(args) if (args.points or args.grid) else None
    res = dominates_rk(mu, lam, args.t, pts)
    _emit(args, res.to_json())
    if res.verdict is Domination.Violated:
        raise _Verdict(f"domination violated, min eigenvalue {res.min_eig:.3e}")


def cmd_kernel(args):
    mu = _load_measure(args.mu)
    G = coeff_kernel(mu, args.coeff) if args.coeff is not None else gram(mu, _points(args))
    if args.coeff is not None:
        obj = {"N": args.coeff, "entries": G.to_json()["entries"]}
    else:
        obj = G.to_json()
    _emit(args, obj)


def cmd_decompose(args):
    mu, lam = _load_measure(args.mu), _load_measure(args.lam)
    if args.trace_list:
        recs = ac_mass_trace(mu, lam, args.trace_list)
        rows = [r.to_row() for r in recs]
        _emit(args, None, rows, TRACE_COLUMNS)
        return
    rep = lebesgue_decompose(mu, lam, args.N, traces=not args.no_traces)
    if args.trace_out:
        _write_csv(args.trace_out, TRACE_COLUMNS, [t.to_row() for t in rep.traces])
    _emit(args, rep.to_json(), [t.to_row() for t in rep.traces], TRACE_COLUMNS)


def cmd_forms(args):
    obj = _load_json(args.pair)
    try:
        fp = FormPair(_matrix(obj["A"]), _matrix(obj["B"]))
    except KeyError as exc:
        raise ValidationError(f"form pair needs 'A' and 'B' ({exc})") from exc
    if args.resolvent:
        _emit(args, {"residual": resolvent_identity_residual(fp)})
        return
    _emit(args, simon_decompose(fp).to_json())


def cmd_kernelpair(args):
    k = FiniteKernel.from_json(_load_json(args.k))
    K = FiniteKernel.from_json(_load_json(args.K))
    ac, s = kernel_lebesgue(k, K)
    rep = orthogonal_split_check(k, ac, s)
    _emit(args, {"k_ac": ac.to_json(), "k_s": s.to_json(), "check": rep.to_json()})


def cmd_halfcircle(args):
    rep: HalfCircleReport = halfcircle_example(args.order)
    _emit(args, rep.to_json(), rep.rows(), rep.ROW_COLUMNS)


def cmd_factor(args):
    p = TrigPoly.from_json(_load_json(args.poly))
    g = fejer_riesz_factor(p)
    _emit(args, g.to_json())


# parser ---------------------------------------------------------------------------


def _power_of_two(text: str) -> int:
    try:
        n = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from exc
    if n < 1 or n & (n - 1):
        raise argparse.ArgumentTypeError(f"{n} is not a power of two")
    return n


def _nonneg(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (standard output if omitted)")
    common.add_argument("--format", choices=("json", "csv"), help="output format (default from --out suffix)")
    common.add_argument("--threads", type=int, default=None, help="BLAS threads for Gram assembly")

    p = argparse.ArgumentParser(prog="circlekit", description="Cauchy-transform spaces of measures on the circle.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("moments", parents=[common], help="Fourier moments of a measure")
    s.add_argument("--mu", required=True)
    s.add_argument("-N", type=_nonneg, default=16)
    s.set_defaults(func=cmd_moments)

    s = sub.add_parser("herglotz", parents=[common], help="Herglotz transform at disk points")
    s.add_argument("--mu", required=True)
    s.add_argument("--z", nargs="*", type=lambda t: complex(t.replace(" ", "")), help="points such as 0.3+0.1j")
    s.add_argument("--points", help="JSON list of points")
    s.add_argument("--grid", type=int, default=64)
    s.add_argument("--trace", help="write a radial trace CSV to this path")
    s.set_defaults(func=cmd_herglotz)

    s = sub.add_parser("clark", parents=[common], help="Clark measure of a contractive function")
    s.add_argument("--b", help="analytic polynomial JSON")
    s.add_argument("--constant", help="constant value, e.g. 0.5 or [0.1, 0.2]")
    s.add_argument("--grid", type=_power_of_two, default=4096)
    s.set_defaults(func=cmd_clark)

    s = sub.add_parser("szego", parents=[common], help="Szego distance and extremeness")
    s.add_argument("--mu", required=True)
    s.set_defaults(func=cmd_szego)

    s = sub.add_parser("dominate", parents=[common], help="kernel domination test")
    s.add_argument("--mu", required=True)
    s.add_argument("--lambda", dest="lam", required=True)
    s.add_argument("-t", type=float, required=True)
    s.add_argument("--points")
    s.add_argument("--grid", type=int, default=None)
    s.set_defaults(func=cmd_dominate)

    s = sub.add_parser("kernel", parents=[common], help="Gram or coefficient kernel matrix")
    s.add_argument("--mu", required=True)
    s.add_argument("--points")
    s.add_argument("--grid", type=int, default=64)
    s.add_argument("--coeff", type=_nonneg, help="coefficient kernel of order N instead of a disk grid")
    s.set_defaults(func=cmd_kernel)

    s = sub.add_parser("decompose", parents=[common], help="Lebesgue decomposition of mu against lambda")
    s.add_argument("--mu", required=True)
    s.add_argument("--lambda", dest="lam", required=True)
    s.add_argument("-N", type=_power_of_two, default=256)
    s.add_argument("--trace-out", help="write the per-N trace CSV to this path")
    s.add_argument("--trace-list", type=_power_of_two, nargs="+", help="tabulate ac mass over these N instead")
    s.add_argument("--no-traces", action="store_true")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("forms", parents=[common], help="form decomposition of a PSD pair")
    s.add_argument("--pair", required=True, help='JSON with matrices "A" and "B"')
    s.add_argument("--resolvent", action="store_true", help="report the resolvent identity residual")
    s.set_defaults(func=cmd_forms)

    s = sub.add_parser("kernelpair", parents=[common], help="decompose a finite kernel against a reference")
    s.add_argument("--k", required=True)
    s.add_argument("--K", required=True)
    s.set_defaults(func=cmd_kernelpair)

    s = sub.add_parser("halfcircle", parents=[common], help="half-circle kernel coefficients two ways")
    s.add_argument("--order", type=int, default=16)
    s.set_defaults(func=cmd_halfcircle)

    s = sub.add_parser("factor", parents=[common], help="Fejer-Riesz factor of a trigonometric polynomial")
    s.add_argument("--poly", required=True)
    s.set_defaults(func=cmd_factor)
    return p


def _thread_limit(n):
    if n is None:
        return contextlib.nullcontext()
    if n < 1:
        raise ValidationError("--threads must be positive")
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        return contextlib.nullcontext()
    return threadpool_limits(limits=n)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        with _thread_limit(args.threads):
            args.func(args)
    except _Verdict as exc:
        print(f"circlekit: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except NumericalFailure as exc:
        print(f"circlekit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (CircleKitError, ValueError, OSError) as exc:
        print(f"circlekit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def main() -> None:
    sys.exit(run())
