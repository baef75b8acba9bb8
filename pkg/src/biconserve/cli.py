"""Command-line entry point: ``biconserve run`` and ``biconserve check-ricci``."""

import argparse
import logging
import os
import sys

import numpy as np

from .conformal import NESTED_TOLERANCE, ricci_condition
from .config import FLATTEN_METHODS, STAGES, RunConfig, parse_config
from .errors import BiconserveError, ConfigError, MismatchError
from .io import read_metric_csv
from .metric import gauss_curvature_fd
from .pipeline import EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, run_pipeline, write_outputs
from .report import coarse_tolerance

_D = RunConfig()


def _floats(n):
    def parse(text):
        vals = [float(x) for x in text.split(",")]
        if len(vals) != n:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers")
        return vals
    return parse


def build_parser():
    p = argparse.ArgumentParser(prog="biconserve",
                                description="Biconservative surface metrics: build, verify, transform.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the verification pipeline",
                         formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    run.add_argument("--config", help="JSON config file (flags override its values)")
    run.add_argument("--stages", help=f"comma-separated subset of {','.join(STAGES)} "
                                      f"(default: all)")
    run.add_argument("--out", help=f"output directory (default: {_D.out})")
    run.add_argument("--c", type=float, help=f"ambient curvature (default: {_D.c:g})")
    run.add_argument("--k0", type=float, help=f"K at u_span[0] (default: {_D.k0:g})")
    run.add_argument("--kprime0", type=float, help=f"K' at u_span[0] (default: {_D.kprime0:g})")
    run.add_argument("--u-span", type=_floats(2), metavar="U0,U1",
                     help=f"integration span (default: {_D.u_span[0]:g},{_D.u_span[1]:g})")
    run.add_argument("--s-extent", type=float, help=f"s in [-S, S] (default: {_D.s_extent:g})")
    run.add_argument("--nu", type=int, help=f"u samples (default: {_D.nu})")
    run.add_argument("--ns", type=int, help=f"s samples (default: {_D.ns})")
    run.add_argument("--ode-tol", type=float, help=f"ODE local tolerance (default: {_D.ode_tol:g})")
    run.add_argument("--flat-tol", type=float,
                     help=f"flatness tolerance relative to max|K| at h=1e-2 (default: {_D.flat_tol:g})")
    run.add_argument("--solver-tol", type=float,
                     help=f"exponent solver tolerance (default: {_D.solver_tol:g})")
    run.add_argument("--r-init", type=_floats(4), metavar="R,R1,R2,R3",
                     help="initial r, r', r'', r''' for the flattener (default: 0.5,0,0,0)")
    run.add_argument("--flatten-methods", help=f"subset of {','.join(FLATTEN_METHODS)}")
    run.add_argument("--variant", choices=("minimal", "biconservative"),
                     help=f"Ricci-type condition checked (default: {_D.variant})")
    run.add_argument("--no-plots", action="store_true", help="skip plots/*.dat")

    ck = sub.add_parser("check-ricci", help="check a Ricci-type condition on a metric CSV")
    ck.add_argument("--metric", required=True, help="CSV with columns u,s,g11,g12,g22")
    ck.add_argument("--c", type=float, required=True, help="ambient curvature")
    ck.add_argument("--variant", choices=("minimal", "biconservative"), default="biconservative")
    ck.add_argument("--form", choices=("i", "ii", "iii", "iv"), default="ii")
    ck.add_argument("--tol", type=float, help="absolute tolerance (default: refinement-indexed)")
    return p


def _setup_logging():
    level = os.environ.get("BICONSERVE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def cmd_run(args):
    overrides = {
        "stages": args.stages, "out": args.out, "c": args.c, "k0": args.k0,
        "kprime0": args.kprime0, "u_span": args.u_span, "s_extent": args.s_extent,
        "nu": args.nu, "ns": args.ns, "ode_tol": args.ode_tol, "flat_tol": args.flat_tol,
        "solver_tol": args.solver_tol, "r_init": args.r_init,
        "flatten_methods": args.flatten_methods, "variant": args.variant,
        "plots": False if args.no_plots else None,
    }
    cfg = parse_config(args.config, overrides)
    result = run_pipeline(cfg)
    out = write_outputs(result, cfg)
    sys.stdout.write((out / "summary.txt").read_text())
    return result.exit_code


def cmd_check_ricci(args):
    grid = read_metric_csv(args.metric, c=args.c)
    grid.require(5)
    # K itself is differenced from the metric, so the check is nested:
    # wider edge band and the nested tolerance class
    k = gauss_curvature_fd(grid).values
    tol = args.tol
    if tol is None:
        scale = 1.0 if args.form == "iv" else float(np.max(np.abs(k)))
        tol = coarse_tolerance(NESTED_TOLERANCE, grid.h) * scale
    rep = ricci_condition(grid, k, args.c, args.variant, args.form, tol=tol, boundary_width=4)
    sys.stdout.write(rep.report.to_json() + "\n")
    return EXIT_OK if rep.passed else EXIT_CHECK


def main(argv=None):
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        return cmd_check_ricci(args)
    except (ConfigError, MismatchError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BiconserveError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
