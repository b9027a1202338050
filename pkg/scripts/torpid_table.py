"""Exact conductance table for a gadget family.

    python scripts/torpid_table.py --family torpid --ks 1-4 --cut near-x1v -o torpid.csv
"""

import argparse
import sys

from pmatch.experiments import CUTS, FAMILIES, ExperimentConfig, run_torpid_experiment, write_csv


def parse_ks(text: str) -> tuple[int, ...]:
    lo, _, hi = text.partition("-")
    return tuple(range(int(lo), int(hi or lo) + 1))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", default="torpid", choices=sorted(FAMILIES))
    ap.add_argument("--ks", default="1-3", type=parse_ks)
    ap.add_argument("--chain", default="jsv", choices=("jsv", "broder"))
    ap.add_argument("--cut", default=None, choices=CUTS)
    ap.add_argument("-o", "--output")
    args = ap.parse_args()
    cfg = ExperimentConfig(family=args.family, ks=args.ks, chain=args.chain, cut=args.cut,
                           output=args.output)
    rows = run_torpid_experiment(cfg, log=lambda s: print(s, file=sys.stderr))
    if cfg.output:
        with open(cfg.output, "w", newline="") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)


if __name__ == "__main__":
    main()
