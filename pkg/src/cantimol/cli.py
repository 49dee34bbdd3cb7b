"""Command-line interface.

Exit codes:
  0  success
  2  config parse error (bad syntax, unknown key; message names the line)
  3  validation error (inconsistent or out-of-range parameters)
  4  numerical failure (non-convergence, formula outside its domain)
  5  truncated-basis run was cutoff-limited (partial output is kept)
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .config import PROFILES, parse_config
from .errors import (
    ConfigParseError,
    CutoffLimitedError,
    NumericalError,
    ValidationError,
)
from .runner import reference_report, run_scenario

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4
EXIT_CUTOFF = 5


def _default_out(cli_value: str | None) -> Path:
    if cli_value:
        return Path(cli_value)
    env = os.environ.get("CANTIMOL_OUT")
    return Path(env) if env else Path("out")


def _load(args) -> tuple:
    """(config, run name) from --profile or --config."""
    if args.profile:
        if args.profile not in PROFILES:
            raise ValidationError(
                f"unknown profile {args.profile!r}; see 'cantimol list-profiles'"
            )
        return parse_config(PROFILES[args.profile]), args.profile
    path = Path(args.config)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigParseError(f"cannot read config file {path}: {exc}")
    return parse_config(text), path.stem


def _cmd_run(args) -> int:
    cfg, name = _load(args)
    svg = True if args.svg else None
    result = run_scenario(cfg, _default_out(args.out), name, svg=svg)
    for p in result.paths:
        print(p)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg, name = _load(args)
    if args.axis:
        cfg.scenario = "sweep"
        cfg.sweep_axis = args.axis
        cfg.sweep_min = args.min
        cfg.sweep_max = args.max
        cfg.sweep_points = args.points
        cfg.validate()
    elif cfg.scenario != "sweep":
        raise ValidationError("config has no sweep section; pass --axis/--min/--max/--points")
    result = run_scenario(cfg, _default_out(args.out), name + "_sweep", svg=False)
    for p in result.paths:
        print(p)
    return EXIT_OK


def _cmd_list_profiles(args) -> int:
    for name, text in PROFILES.items():
        first_comment = text.splitlines()[0].lstrip("# ").strip()
        print(f"{name:14s} {first_comment}")
    return EXIT_OK


def _cmd_reference_report(args) -> int:
    text = reference_report()
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / "reference_report.txt"
        path.write_text(text, encoding="utf-8")
        print(path)
    else:
        print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cantimol",
        description="Squeezing and entanglement of cantilever-coupled dipolar molecules.",
    )
    parser.add_argument("--version", action="version", version=f"cantimol {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute one scenario from a profile or config file")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--profile", help="name of a shipped profile")
    src.add_argument("--config", help="path to a config file")
    run.add_argument("--out", help="output directory (default $CANTIMOL_OUT or ./out)")
    run.add_argument("--svg", action="store_true", help="also render SVG plots")
    run.set_defaults(func=_cmd_run)

    sweep = sub.add_parser("sweep", help="sweep one numeric parameter, one summary row each")
    src = sweep.add_mutually_exclusive_group(required=True)
    src.add_argument("--profile", help="base profile to sweep")
    src.add_argument("--config", help="base config file to sweep")
    sweep.add_argument("--axis", help="config key to sweep, e.g. cantilever.damping_D")
    sweep.add_argument("--min", type=float, help="first axis value")
    sweep.add_argument("--max", type=float, help="last axis value")
    sweep.add_argument("--points", type=int, help="number of axis values")
    sweep.add_argument("--out", help="output directory (default $CANTIMOL_OUT or ./out)")
    sweep.set_defaults(func=_cmd_sweep)

    lp = sub.add_parser("list-profiles", help="list the shipped profiles")
    lp.set_defaults(func=_cmd_list_profiles)

    rr = sub.add_parser(
        "reference-report",
        help="derived couplings for the example geometries vs published targets",
    )
    rr.add_argument("--out", help="directory for reference_report.txt (default: stdout)")
    rr.set_defaults(func=_cmd_reference_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except CutoffLimitedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CUTOFF
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
