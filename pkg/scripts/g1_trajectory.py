"""Long JSV trajectory on G_1 started from a perfect matching in S1 and S3.

Logs, at each checkpoint, the share of visited states lying in S1 or S3 and
the number of perfect-matching visits.  This is an observation, not a test:
a torpid chain should stay near its starting side for a long time.

    python scripts/g1_trajectory.py --steps 1000000 --seed 0
"""

import argparse
import csv
import sys

from pmatch.gadgets import classify_S, counterexample_graph
from pmatch.graph import Matching
from pmatch.mcmc import jsv_weights, simulate
from pmatch.exact import iter_omega


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--every", type=int, default=100_000)
    args = ap.parse_args()

    gk = counterexample_graph(1)
    g = gk.graph
    perfect = (Matching.of([(g.order[a], g.order[b]) for a, b in pm]) for pm in iter_omega(g, 0))
    start = next(m for m in perfect if {1, 3} <= classify_S(gk, m))
    idx = g.index
    watch = []
    for i in range(1, 5):
        part = {idx[x] for x in gk.parts[f"H{i}"]}
        watch.append([(idx[g.vertex(f"{s}{i}")], part) for s in ("u", "v")])

    def in_a(p):
        # p[x] is the mate of x, or -1 for a hole
        return any(all(p[x] not in part for x, part in watch[i]) for i in (0, 2))

    out = csv.writer(sys.stdout)
    out.writerow(["step", "share_in_A", "perfect_visits"])
    tally = {"a": 0}

    def on_state(t, p, holes):
        tally["a"] += in_a(p)
        if t and t % args.every == 0:
            out.writerow([t, f"{tally['a'] / (t + 1):.6f}", tally.get("perfect", 0)])
        if not holes:
            tally["perfect"] = tally.get("perfect", 0) + 1

    simulate(g, start, args.steps, args.seed, weights=jsv_weights(g), on_state=on_state)


if __name__ == "__main__":
    main()
