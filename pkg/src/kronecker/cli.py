"""Command-line entry point: one subcommand per experiment kind.

Example::

    kronecker cauchy-limit --n 1000 --n 10000 --samples 2000 --workers 4 --out runs/cauchy

Exit status is 0 when every check of the run passes, 1 when a check fails and
2 for invalid arguments or configuration.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .errors import ArgumentError, ConfigurationError, KroneckerError, ResourceError
from .experiments import KINDS, build_plan, run_plan

log = logging.getLogger("kronecker")


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed {v} is not a 64-bit unsigned integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _size(text: str) -> int:
    # accepts 1e5 as well as 100000
    v = float(text)
    if v != int(v):
        raise argparse.ArgumentTypeError(f"N must be an integer, got {text}")
    return int(v)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kronecker", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="kind", required=True, metavar="EXPERIMENT")
    for kind in KINDS:
        p = sub.add_parser(kind, help=f"run the {kind} experiment")
        p.add_argument("--config", metavar="PATH", help="YAML or JSON configuration file")
        p.add_argument("--seed", type=_u64, help="64-bit seed (overrides the config)")
        p.add_argument("--workers", type=_positive, default=1, help="worker processes")
        p.add_argument("--out", metavar="DIR", default=f"results/{kind}", help="output directory")
        p.add_argument("--n", type=_size, action="append", metavar="INT",
                       help="problem size N (time horizon T for continuous); repeatable")
        p.add_argument("--samples", type=_positive, help="number of samples")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        raw = None
        if args.config:
            from .params import load_config

            _, raw = load_config(args.config)
        plan = build_plan(args.kind, raw, seed=args.seed, n_list=args.n, samples=args.samples,
                          workers=args.workers, out_dir=args.out)
        log.info("plan %s: %s", plan.plan_hash(), plan.identity())
        result = run_plan(plan)
    except (ArgumentError, ConfigurationError, ResourceError) as exc:
        print(f"kronecker: error: {exc}", file=sys.stderr)
        return 2
    except KroneckerError as exc:
        print(f"kronecker: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    for c in result.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.value} ({c.threshold})")
    print(f"wrote {len(result.files)} files to {plan.out_dir}")
    return 0 if result.passed else 1


if __name__ == "__main__":
    sys.exit(main())
