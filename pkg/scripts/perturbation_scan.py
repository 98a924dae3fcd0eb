#!/usr/bin/env python3
"""Entropy scan over the polynomial perturbation family.

Each member is volume-normalized to the model metric before its entropies
and the scale-invariant functional are computed; the coordinate-ball volume
is a labeled proxy, so the scan is exploratory output, not an assertion.

    python scripts/perturbation_scan.py --lo -0.3 --hi 0.3 --steps 13
"""

import argparse
import sys

import numpy as np

from kahler_entropy.cli import run_command


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lo", type=float, default=-0.3)
    ap.add_argument("--hi", type=float, default=0.3)
    ap.add_argument("--steps", type=int, default=13)
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--r0", type=float, default=0.9)
    ap.add_argument("--csv", default="perturbation_scan.csv")
    args = ap.parse_args()

    params = np.linspace(args.lo, args.hi, args.steps)
    family = ",".join(f"{a:.10g}" for a in params)
    _, status = run_command(
        [
            "scan",
            f"--family={family}",
            "--n",
            str(args.n),
            "--r0",
            str(args.r0),
            "--csv",
            args.csv,
        ]
    )
    print(f"\nwrote {args.csv}")
    return status


if __name__ == "__main__":
    sys.exit(main())
