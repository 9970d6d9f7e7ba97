"""Command-line entry point: ``pdihardy {verify,minimize,probe,transform,pairs}``.

Exit status: 0 when every check passes, 1 when a check fails, 2 for an
invalid configuration.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .pipeline import VERBS, run_pairs

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdihardy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)
    helps = {
        "verify": "check a supersolution and the inequalities built from it",
        "minimize": "minimize a weighted Rayleigh quotient",
        "probe": "evaluate a one-parameter trial family",
        "transform": "verify the radial change of variables",
        "pairs": "verify the reference (Psi, g) pairs",
    }
    for verb, text in helps.items():
        sp = sub.add_parser(verb, help=text)
        sp.add_argument("--config", required=verb != "pairs", help="TOML problem file")
        sp.add_argument("--out", help="directory for report.json and CSV sidecars (default: JSON on stdout)")
        sp.add_argument("--seed", type=int, help="seed for randomized test functions")
        sp.add_argument("--grid-size", type=int, help="number of radial nodes")
        sp.add_argument("--tol", type=float, help="relative tolerance for inequality margins")
        sp.add_argument("--quiet", action="store_true", help="suppress the per-check summary on stderr")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {"seed": args.seed, "grid_size": args.grid_size, "tol": args.tol}
    try:
        cfg = load_config(args.config, overrides) if args.config else None
        if args.verb == "pairs":
            report = run_pairs(cfg, args.seed or 0)
        else:
            report = VERBS[args.verb](cfg)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        path = report.write(args.out)
        if not args.quiet:
            print(f"report written to {path}", file=sys.stderr)
    else:
        sys.stdout.write(report.to_json())
    if not args.quiet:
        for line in report.summary_lines():
            print(line, file=sys.stderr)
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
