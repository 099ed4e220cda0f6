"""Command-line interface.

Exit codes: 0 success, 2 precondition or feasibility error, 3 verification
failure, 4 precision failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys

from .commands import run_command
from .quadrature import QuadratureError
from .reports import RunConfig, load_config, rows_to_csv
from .zeta_engine import PrecisionError

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_PRECISION = 0, 2, 3, 4


def _common(p: argparse.ArgumentParser, search: bool = False, scan: bool = False) -> None:
    p.add_argument("--config", help="flat key = value settings file")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    if search:
        p.add_argument("--grid", type=int, help="coarse grid resolution per axis")
        p.add_argument("--refine", type=int, help="number of refinement rounds")
    if scan:
        p.add_argument("--cache", help="zero-ordinate cache file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="argbound", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="a, b, c, alpha and region breakdown at (eta, r, T0)")
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--T0", type=float, default=6.8e6)
    _common(p)

    p = sub.add_parser("optimize", help="search (eta, r) for the smallest a or alpha(T0)")
    p.add_argument("--T0", type=float, required=True)
    p.add_argument("--objective", choices=("a", "alpha"), default="alpha")
    _common(p, search=True)

    p = sub.add_parser("table2", help="reproduce the alpha table for T0 = 1e6..1e15")
    _common(p, search=True)

    p = sub.add_parser("verify", help="count zeros and check the bounds up to --tmax")
    p.add_argument("--tmax", type=float, default=5000.0)
    p.add_argument("--constants", choices=("main", "rosser", "historical"), default="main")
    _common(p, scan=True)

    p = sub.add_parser("zeta", help="evaluate zeta with its remainder bound")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--sigma", type=float)
    g.add_argument("--s", help="complex point such as 0.5+1000j")
    _common(p)

    p = sub.add_parser("report", help="full reproduction report")
    p.add_argument("--tmax", type=float, help="also run the desk-scale verification to this height")
    _common(p, search=True, scan=True)
    return parser


def _params(args: argparse.Namespace, cfg: RunConfig) -> dict:
    skip = {"command", "config", "out", "format", "grid", "refine"}
    params = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    params["config"] = dataclasses.asdict(cfg)
    return params


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, grid=getattr(args, "grid", None), refine=getattr(args, "refine", None))
        cfg.engine()
        if args.format == "csv" and args.command not in ("table2", "verify"):
            raise ValueError(f"--format csv applies to table2 and verify, not {args.command}")
        env = run_command(args.command, _params(args, cfg))
    except PrecisionError as exc:
        print(f"argbound: precision failure: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except QuadratureError as exc:
        print(f"argbound: quadrature failure: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (ValueError, OSError) as exc:
        print(f"argbound: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.format == "csv":
        rows = env.results["rows"] if args.command == "table2" else env.results["records"]
        _emit(rows_to_csv(rows), args.out)
    else:
        _emit(env.to_json(), args.out)
    for w in env.warnings:
        print(f"argbound: warning: {w}", file=sys.stderr)
    return EXIT_OK if env.results.get("passed", True) else EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
