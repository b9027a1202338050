"""Stationary mass of perfect matchings under the Broder chain on G_k.

    python scripts/broder_fraction.py --ks 1-3
"""

import argparse
import sys

from pmatch.experiments import broder_perfect_fraction, write_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ks", default="1-3")
    args = ap.parse_args()
    lo, _, hi = args.ks.partition("-")
    write_csv(broder_perfect_fraction(range(int(lo), int(hi or lo) + 1)), sys.stdout)


if __name__ == "__main__":
    main()
