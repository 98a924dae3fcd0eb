#!/usr/bin/env python3
"""Reproduce the model-case entropy table and the scaling cross-checks.

Writes table.csv next to the chosen output stem and prints the rows; a quick
sanity run for a fresh checkout:

    python scripts/entropy_table.py --n-max 3
"""

import argparse
import sys

from kahler_entropy.cli import run_command


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=3)
    ap.add_argument("--csv", default="table.csv")
    ap.add_argument("--report", default=None, help="optional JSON report path")
    args = ap.parse_args()

    argv = ["table", "--hyperbolic", "--n-range", f"1..{args.n_max}", "--csv", args.csv]
    if args.report:
        argv += ["--out", args.report]
    _, status = run_command(argv)

    for lam in ("0.25", "4"):
        print(f"\nscaling check, lambda = {lam}:")
        _, code = run_command(["check", "--spec", "hyperbolic:1", "--which", "scaling", "--lam", lam])
        status = status or code
    return status


if __name__ == "__main__":
    sys.exit(main())
