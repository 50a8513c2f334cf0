"""Command-line front end.

    kickedbec <mode> --config run.json [--seed N] [--out DIR]
                     [--workers N] [--stride N] [--paper-scale]

The mode subcommand must match the config's "mode" field; flags override
the corresponding config fields.  Exit codes: 0 success, 2 configuration
error, 3 numerical error (basis overflow), 4 fit failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import MODES, load_config
from .errors import (
    BasisOverflowError,
    ConfigError,
    FitError,
    InsufficientDataError,
)
from .runner import run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_FIT = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kickedbec",
        description="kicked-atom dynamical tunneling simulator",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode, help=f"run a {mode} config")
        p.add_argument("--config", required=True, help="JSON run config")
        p.add_argument("--seed", type=int, default=None,
                       help="master seed (overrides config)")
        p.add_argument("--out", default=None,
                       help="output directory (overrides config)")
        p.add_argument("--workers", type=int, default=None,
                       help="worker count (overrides config)")
        p.add_argument("--stride", type=int, default=None,
                       help="histogram sampling stride (overrides config)")
        p.add_argument("--paper-scale", action="store_true",
                       help="full-size ensembles and kick counts (slow)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if cfg.mode != args.mode:
            raise ConfigError(
                f"config is for mode {cfg.mode!r}, invoked as {args.mode!r}"
            )
        if args.stride is not None:
            cfg.raw["stride"] = args.stride
        out_dir = args.out or cfg.raw.get("out")
        if not out_dir:
            raise ConfigError("no output directory: set --out or config 'out'")
        artifacts = run(cfg, out_dir, seed=args.seed, workers=args.workers,
                        paper_scale=args.paper_scale)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BasisOverflowError as exc:
        where = ""
        if exc.rotor is not None or exc.kick is not None:
            where = f" (rotor {exc.rotor}, kick {exc.kick})"
        print(f"numerical error: {exc}{where}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (FitError, InsufficientDataError) as exc:
        print(f"fit error: {exc}", file=sys.stderr)
        return EXIT_FIT
    print(json.dumps({"out": str(artifacts.out_dir),
                      "files": artifacts.files,
                      "summary": artifacts.summary}, default=str))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
