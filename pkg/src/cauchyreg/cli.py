"""Command-line interface.

Exit codes: 0 success, 2 configuration/validation error, 3 solver
non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import figures, harness
from .errors import ConfigError, GeometryError, NonConvergenceError


def _common(parser):
    parser.add_argument("--config", help="JSON config file or inline JSON")
    parser.add_argument("--out", help="output directory", default="out")
    parser.add_argument("--order", type=int, help="interpolation order N")
    parser.add_argument("--nodes", type=int,
                        help="nodes M (per patch for Fejer rules)")
    parser.add_argument("--patches", type=int,
                        help="patch count for piecewise contours")
    parser.add_argument("--no-figures", action="store_true",
                        help="skip PNG rendering, write CSV/JSON only")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cauchyreg",
        description="Regularized Cauchy integrals, Laplace layer potentials, "
                    "and conformal maps")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, descr in (
            ("eval", "evaluate the Cauchy operator at target points"),
            ("table1", "near-boundary error study versus order"),
            ("errormap", "log10 error grid inside the contour"),
            ("solve-robin", "solve a Robin boundary problem"),
            ("conformal", "build and export a conformal map"),
            ("convergence", "Robin-equation convergence sweep")):
        p = sub.add_parser(name, help=descr)
        _common(p)
        if name == "solve-robin":
            p.add_argument("--eq", choices=("single", "hyper"),
                           default="single")
        if name == "conformal":
            p.add_argument("--direction", choices=("interior", "exterior"),
                           default="interior")
    return parser


def _config_from(args):
    cfg = harness.load_config(args.config) if args.config else (
        harness.ExperimentConfig({}))
    if args.order is not None:
        cfg.raw["order"] = args.order
        cfg.raw.setdefault("orders", list(range(args.order + 1)))
    if args.nodes is not None:
        key = "patch_M" if cfg.get("preset") == "snowflake" else "M"
        cfg.raw[key] = args.nodes
    if args.patches is not None:
        contour = dict(cfg.get("contour") or {"kind": "koch"})
        contour["subdivide"] = max(1, args.patches // (3 * 4 ** int(
            contour.get("level", 3))))
        cfg.raw["contour"] = contour
    if getattr(args, "eq", None):
        cfg.raw["equation"] = args.eq
    if getattr(args, "direction", None):
        cfg.raw["direction"] = args.direction
    return cfg


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_from(args)
        out = args.out
        if args.command == "eval":
            result = harness.run_eval(cfg, out)
        elif args.command == "table1":
            result = harness.run_table1_study(cfg, out)
            if not args.no_figures and "csv" in result:
                result["png"] = str(figures.render_table1(result["csv"]))
        elif args.command == "errormap":
            result = harness.run_errormap(cfg, out)
            if not args.no_figures and "csv" in result:
                result["png"] = str(figures.render_errormap(result["csv"]))
        elif args.command == "solve-robin":
            result = harness.run_solve_robin(cfg, out)
        elif args.command == "conformal":
            result = harness.run_conformal(cfg, out)
            if not args.no_figures and "csv" in result:
                result["png"] = str(figures.render_conformal(result["csv"]))
        elif args.command == "convergence":
            result = harness.run_convergence(cfg, out)
            if not args.no_figures and "csv" in result:
                result["png"] = str(figures.render_convergence(
                    result["csv"], semilog=cfg.get("equation") == "hyper"))
        else:  # pragma: no cover - argparse enforces choices
            raise ConfigError(f"unknown command {args.command}")
    except (ConfigError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NonConvergenceError as exc:
        print(f"solver failed to converge: {exc}", file=sys.stderr)
        return 3
    summary = {k: v for k, v in result.items() if k != "rows"}
    print(json.dumps(summary, indent=2, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
