"""Command-line front end.

Subcommands:
  compare   run every configured algorithm variant over all seeds
  run       run one algorithm once with an explicit seed
  oracle    print the exhaustive-search facts for the configured space

Exit codes: 0 success, 1 configuration error, 2 output I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np
from importlib.metadata import PackageNotFoundError, version

from .harness import (
    ConfigError,
    load_config,
    run_experiment,
)
from .space import cardinality
from .sut import CalibrationError


def _package_version() -> str:
    try:
        return version("perfgan")
    except PackageNotFoundError:
        return "unknown"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perfgan",
        description="Budgeted performance-test generation against a synthetic power model.",
    )
    parser.add_argument("--version", action="version", version=_package_version())
    sub = parser.add_subparsers(dest="command", required=True)

    compare = sub.add_parser("compare", help="run all configured algorithm variants")
    compare.add_argument("--config", required=True, help="JSON experiment config")
    compare.add_argument("--out", required=True, help="output directory")
    compare.add_argument("--runs", type=int, help="override the configured run count")
    compare.add_argument("--master-seed", type=int, help="override the master seed")

    single = sub.add_parser("run", help="run one algorithm once")
    single.add_argument(
        "--algorithm", required=True, choices=("random", "dn", "ogan")
    )
    single.add_argument("--config", required=True, help="JSON experiment config")
    single.add_argument("--seed", required=True, type=int, help="run seed")
    single.add_argument("--out", required=True, help="output directory")

    oracle = sub.add_parser("oracle", help="print exhaustive-search facts")
    oracle.add_argument("--config", required=True, help="JSON experiment config")

    return parser


def _cmd_compare(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, output_dir=args.out)
    if args.runs is not None:
        if args.runs < 1:
            raise ConfigError("runs: must be >= 1")
        cfg.runs = args.runs
    if args.master_seed is not None:
        cfg.master_seed = args.master_seed
    run_experiment(cfg)
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, output_dir=args.out)
    matching = [v for v in cfg.algorithms if v.kind == args.algorithm]
    if not matching:
        raise ConfigError(f"algorithms: no {args.algorithm!r} entry in config")
    cfg.algorithms = [matching[0]]
    cfg.runs = 1
    run_experiment(cfg, run_seeds=[args.seed])
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    total = cardinality(cfg.space)
    positives = int(
        np.count_nonzero(cfg.sut.power_grid(cfg.space) >= cfg.fitness.p_m)
    )
    print(f"cardinality: {total}")
    print(f"positives: {positives}")
    print(f"density: {positives / total!r}")
    print(f"gain: {cfg.sut.gain!r}")
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"compare": _cmd_compare, "run": _cmd_run, "oracle": _cmd_oracle}
    try:
        return handlers[args.command](args)
    except (ConfigError, CalibrationError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
