"""
barrenbench: gradient-variance experiments on unitary-embedded matrix product states.

    python barrenbench.py run --config examples.json
    python barrenbench.py sweep --config global.json --axis n --values 5..12
    python barrenbench.py oracle --config small.json --compare-mc
    python barrenbench.py moments --N 4 --t 2
    python barrenbench.py runs
"""

import argparse
import sys

from src.cli import (
    EXIT_INVALID,
    cmd_moments,
    cmd_oracle,
    cmd_run,
    cmd_runs,
    cmd_sweep,
    exit_code_for,
    logger,
    parse_values,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="barrenbench", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def experiment_flags(p):
        p.add_argument("--config", required=True, help="experiment JSON file")
        p.add_argument("--threads", type=int, default=None, help="worker processes (default: machine parallelism)")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="master seed override")

    experiment_flags(sub.add_parser("run", help="Monte-Carlo gradient variance for one configuration"))

    sweep = sub.add_parser("sweep", help="variance sweep over system size or distance")
    experiment_flags(sweep)
    sweep.add_argument("--axis", choices=["n", "delta"], required=True)
    sweep.add_argument("--values", required=True, help="e.g. 5,6,7 or 5..12")

    oracle = sub.add_parser("oracle", help="exact Haar-averaged gradient mean and variance")
    experiment_flags(oracle)
    oracle.add_argument("--compare-mc", action="store_true", help="also run the matching Monte-Carlo estimate")

    moments = sub.add_parser("moments", help="Weingarten table and sampled moment check")
    moments.add_argument("--N", type=int, required=True)
    moments.add_argument("--t", type=int, required=True)
    moments.add_argument("--samples", type=int, default=None)
    moments.add_argument("--seed", type=int, default=None)

    runs = sub.add_parser("runs", help="list recorded runs")
    runs.add_argument("--limit", type=int, default=20)
    return parser


def dispatch(args) -> int:
    if args.command == "run":
        return cmd_run(args.config, args.threads, args.out, args.seed)
    if args.command == "sweep":
        return cmd_sweep(args.config, args.axis, parse_values(args.values), args.threads, args.out, args.seed)
    if args.command == "oracle":
        return cmd_oracle(args.config, args.compare_mc, args.threads, args.out, args.seed)
    if args.command == "moments":
        return cmd_moments(args.N, args.t, args.samples, args.seed)
    return cmd_runs(args.limit)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_INVALID if e.code else 0

    try:
        return dispatch(args)
    except Exception as e:
        code = exit_code_for(e)
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
