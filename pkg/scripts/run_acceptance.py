"""Run every acceptance suite (or the named ones) and print one verdict per line.

    python scripts/run_acceptance.py [suite ...] [--json verdicts.jsonl]
"""

import argparse
import sys

from pmatch.experiments import run_acceptance, verdict_records, write_records


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("suites", nargs="*", default=["all"])
    ap.add_argument("--json")
    args = ap.parse_args()
    verdicts = [v for s in args.suites for v in run_acceptance(s)]
    for v in verdicts:
        print(v.line(), flush=True)
    if args.json:
        with open(args.json, "w") as fh:
            write_records(verdict_records(verdicts), fh)
    return 0 if all(v.passed for v in verdicts) else 1


if __name__ == "__main__":
    sys.exit(main())
