"""Command-line entry point: ``psicm eval ...`` and ``psicm verify ...``.

Exit codes: 0 when no claim failed, 1 when any claim failed, 2 on usage,
configuration or output errors.
"""

from __future__ import annotations

import argparse
import sys

import mpmath

from . import __version__
from . import divided_diff as dd
from . import special
from .precision import PrecisionError, default_precision, Precision
from .report import SUITES, ConfigError, SuiteConfig, emit_report, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

FUNCTIONS = ("ln_gamma", "digamma", "polygamma", "oracle", "psi_root", "z", "delta",
             "theta", "theta_derivative", "lambda", "phi", "g_f", "q")


def _fmt(value, precision: Precision):
    if precision.extended:
        return mpmath.nstr(value, precision.digits)
    return repr(float(value))


def _pair_arg(text):
    try:
        s, t = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected S,T but got {text!r}") from None
    return s, t


def _precision_arg(text):
    try:
        return Precision.parse(text)
    except PrecisionError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="psicm",
        description="Evaluate psi/polygamma divided differences and verify the "
                    "inequalities built on them.",
    )
    parser.add_argument("--version", action="version", version=f"psicm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate one functional at a point")
    ev.add_argument("function", choices=FUNCTIONS)
    ev.add_argument("--x", type=str, default="1")
    ev.add_argument("--s", type=str, default="0")
    ev.add_argument("--t", type=str, default="0.5")
    ev.add_argument("--c", type=str, default=None, help="anchor for g_f (default: s-side + 1)")
    ev.add_argument("--n", type=int, default=1, help="polygamma order")
    ev.add_argument("--k", type=int, default=0, help="derivative order for theta_derivative")
    ev.add_argument("--precision", type=_precision_arg, default=None)

    vf = sub.add_parser("verify", help="run verification suites")
    vf.add_argument("suites", nargs="+", metavar="SUITE",
                    help=f"one or more of {', '.join(SUITES)}, or 'all'")
    vf.add_argument("--n-max", type=int, default=200)
    vf.add_argument("--k-max", type=int, default=6)
    vf.add_argument("--grid", type=int, default=200)
    vf.add_argument("--samples", type=int, default=500)
    vf.add_argument("--seed", type=int, default=0)
    vf.add_argument("--precision", type=_precision_arg, default=None)
    vf.add_argument("--pair", type=_pair_arg, action="append", default=None,
                    help="shift pair S,T (repeatable); replaces the default pairs")
    vf.add_argument("--json", dest="json_path", default=None)
    vf.add_argument("--csv", dest="csv_path", default=None)
    vf.add_argument("--format", choices=("text", "json", "csv"), default="text",
                    help="format written to stdout")
    vf.add_argument("--timings", action="store_true",
                    help="record wall-clock runtimes (breaks byte-identical output)")
    return parser


def _eval(args, out):
    prec = args.precision or default_precision()
    x = args.x
    pair = dd.ShiftPair(float(args.s), float(args.t))
    fn = args.function
    if fn == "ln_gamma":
        values = {"ln_gamma": special.ln_gamma(x, prec)}
    elif fn == "digamma":
        values = {"digamma": special.digamma(x, prec)}
    elif fn == "polygamma":
        values = {f"polygamma_{args.n}": special.polygamma(args.n, x, prec)}
    elif fn == "oracle":
        values = {f"oracle_{args.n}": special.quadrature_oracle(args.n, x, prec)}
    elif fn == "psi_root":
        values = {"x_star": special.find_psi_root(prec)}
    elif fn == "z":
        values = dd.z_eval(pair, x, prec)._asdict()
    elif fn == "delta":
        values = {"delta": dd.delta(pair, x, prec)}
    elif fn == "theta":
        values = {"theta": dd.theta(pair, x, prec)}
    elif fn == "theta_derivative":
        values = {f"theta_{args.k}": dd.theta_derivative(pair, x, args.k, prec)}
    elif fn == "lambda":
        values = {"lambda": dd.lambda_fn(pair, x, prec)}
    elif fn == "phi":
        values = {"phi": dd.phi(pair, x, prec)}
    elif fn == "g_f":
        c = float(args.c) if args.c is not None else -pair.alpha + 1.0
        values = dd.g_f_eval(dd.AnchoredPair(pair, c), x, prec)._asdict()
    else:
        values = {"q": dd.q_ratio(x, prec)}
    for name, value in values.items():
        out.write(f"{name} = {_fmt(value, prec)}\n")
    return EXIT_OK


def _verify(args, out):
    suites = tuple(SUITES) if "all" in args.suites else tuple(args.suites)
    kwargs = dict(suites=suites, n_max=args.n_max, k_max=args.k_max, grid=args.grid,
                  precision=args.precision or default_precision(), seed=args.seed,
                  samples=args.samples, timings=args.timings)
    if args.pair:
        kwargs["pairs"] = tuple(args.pair)
    report = run_suite(SuiteConfig(**kwargs))
    for path, fmt in ((args.json_path, "json"), (args.csv_path, "csv")):
        if path:
            with open(path, "wb") as fh:
                fh.write(emit_report(report, fmt))
    out.write(emit_report(report, args.format).decode())
    return EXIT_FAIL if report.summary["fail"] else EXIT_OK


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "eval":
            return _eval(args, out)
        return _verify(args, out)
    except (ConfigError, PrecisionError, special.DomainError,
            special.UnsupportedOrderError, ValueError) as exc:
        print(f"psicm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"psicm: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
