"""Command-line entry point: ``pmatch <subcommand> ...``.

Graphs are read from ``--input`` in the edge-list format (see
:mod:`pmatch.edgelist`) or, for the chain commands, built from
``--gadget FAMILY --k K``.  Vertices may be named by id or by label.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager
from typing import Iterator, TextIO

from . import edgelist
from .blossoms import enumerate_blossoms, minimum_blossom
from .exact import (bipartite_adjacency, bipartition, count_near, count_omega, count_perfect,
                    hole_pattern_table, ryser_permanent)
from .experiments import (CUTS, FAMILIES, ExperimentConfig, UnknownSuite, broder_perfect_fraction,
                          cut_mask, run_acceptance, run_torpid_experiment, tested_cuts,
                          verdict_records, write_csv, write_records)
from .gadgets import GadgetGraph, blossom_reduction
from .graph import (PERFECT, Graph, GraphError, HolePattern, Matching, check_matching,
                    delete_vertices, induced)
from .mcmc import (build_chain_model, conductance, jsv_weights, mixing_time, read_weights,
                   simulate)
from .recursive import (BACKENDS, Balanced, FirstVertex, NamedFirst, RecursionStats, fpt_count,
                        recursive_count)
from .structure import fc_order, gallai_edmonds, maximum_matching


@contextmanager
def _out(path: str | None) -> Iterator[TextIO]:
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _emit(args, rows: list[dict]) -> None:
    with _out(args.output) as fh:
        if args.format == "csv":
            write_csv(rows, fh)
        else:
            write_records(rows, fh)


def _graph(args) -> Graph:
    if getattr(args, "gadget", None):
        return _gadget(args).graph
    if args.input is None or args.input == "-":
        return edgelist.parse(sys.stdin)
    return edgelist.read(args.input)


def _gadget(args) -> GadgetGraph:
    return FAMILIES[args.gadget](args.k)


def _vertex(g: Graph, token: str) -> int:
    if token in g.named:
        return g.named[token]
    try:
        v = int(token)
    except ValueError:
        raise SystemExit(f"no vertex named {token!r}") from None
    if v not in g.vertices:
        raise SystemExit(f"vertex {v} is not in the graph")
    return v


def _name(g: Graph, v: int) -> str:
    lab = g.label(v)
    return lab if lab is not None else str(v)


def _read_matching(g: Graph, path: str) -> Matching:
    pairs = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if line and not line.startswith("#"):
                a, b = line.split()[:2]
                pairs.append((_vertex(g, a), _vertex(g, b)))
    m = Matching.of(pairs)
    check_matching(g, m)
    return m


# subcommands


def cmd_gadget(args) -> None:
    if args.kind == "reduction":
        if args.input is None:
            raise SystemExit("gadget reduction needs --input with a digraph")
        with open(args.input) as fh:
            vs, arcs = edgelist.parse_digraph(fh)
        r = blossom_reduction(vs, arcs, args.s, args.t, args.ell)
        g = r.graph
        with _out(args.output) as fh:
            edgelist.write(g, fh)
            idx = g.index
            fh.write("".join(f"# matched {idx[a]} {idx[b]}\n" for a, b in r.matching))
            fh.write(f"# hole {idx[r.w]}\n")
        return
    kind = {"boxes": "boxes", "torpid": "torpid", "counterexample": "counterexample"}[args.kind]
    g = FAMILIES[kind](args.k).graph
    with _out(args.output) as fh:
        edgelist.write(g, fh)


def _pivot(spec: str):
    if spec == "first":
        return FirstVertex()
    if spec == "balanced":
        return Balanced()
    if spec.startswith("named:"):
        with open(spec[6:]) as fh:
            labels = {t for line in fh for t in line.split()}
        return NamedFirst(labels)
    raise SystemExit(f"unknown pivot {spec!r}; use first, balanced or named:FILE")


def cmd_count(args) -> None:
    g = _graph(args)
    rec: dict = {"mode": args.mode, "n": len(g)}
    if args.mode in ("exact", "brute"):
        rec["value"] = count_perfect(g)
    elif args.mode == "ryser":
        sides = bipartition(g)
        if sides is None or len(sides[0]) != len(sides[1]):
            raise SystemExit("ryser mode needs a bipartite graph with equal sides")
        rec["value"] = ryser_permanent(bipartite_adjacency(g, *sides))
    elif args.mode == "near":
        u, v = _vertex(g, args.u), _vertex(g, args.v)
        rec.update(u=args.u, v=args.v, value=count_near(g, u, v))
    elif args.mode == "omega":
        p, n = count_omega(g)
        rec.update(perfect=p, near=n, value=p + n)
    else:
        stats = RecursionStats()
        backend = BACKENDS[args.backend]()
        if args.mode == "recursive":
            est = recursive_count(g, args.eps, _pivot(args.pivot), backend, stats=stats)
        else:
            est = fpt_count(g, args.eps, args.k_max, backend=backend, stats=stats)
        rec.update(value=est.value, guarantee=est.mode, eps=args.eps, **stats.as_dict())
    _emit(args, [rec])


def cmd_holes_table(args) -> None:
    g = _graph(args)
    rows = []
    for pat, c in sorted(hole_pattern_table(g).items()):
        if pat.is_perfect:
            rows.append({"u": "", "v": "", "pattern": "perfect", "count": c})
        else:
            u, v = pat.holes
            rows.append({"u": _name(g, u), "v": _name(g, v), "pattern": "near", "count": c})
    _emit(args, rows)


def cmd_decompose(args) -> None:
    g = _graph(args)
    ge = gallai_edmonds(g)
    rows = [{"part": "D", "component": i, "size": len(c), "fc_order": fc_order(induced(g, c))[0],
             "vertices": " ".join(_name(g, v) for v in sorted(c))}
            for i, c in enumerate(ge.d_components)]
    rows.append({"part": "A", "component": "", "size": len(ge.A), "fc_order": "",
                 "vertices": " ".join(_name(g, v) for v in sorted(ge.A))})
    rows.append({"part": "C", "component": "", "size": len(ge.C), "fc_order": "",
                 "vertices": " ".join(_name(g, v) for v in sorted(ge.C))})
    _emit(args, rows)


def cmd_fc_order(args) -> None:
    g = _graph(args)
    base = _vertex(g, args.base) if args.base is not None else None
    r, dec = fc_order(g, base)
    rows = [{"ear": i, "length": len(e) - 1, "vertices": " ".join(_name(g, v) for v in e)}
            for i, e in enumerate(dec.ears)]
    rows.insert(0, {"ear": "order", "length": r, "vertices": _name(g, dec.base)})
    _emit(args, rows)


def cmd_blossoms(args) -> None:
    g = _graph(args)
    w = _vertex(g, args.hole)
    if args.matching:
        m = _read_matching(g, args.matching)
    else:
        m = maximum_matching(delete_vertices(g, [w]))
    if args.min:
        b = minimum_blossom(g, m, w)
        found, truncated = ([b] if b else []), False
    else:
        res = enumerate_blossoms(g, m, w, cap=args.cap)
        found, truncated = res.blossoms, res.truncated
    rows = [{"length": len(b), "k": b.k, "cycle": " ".join(_name(g, v) for v in b.cycle)}
            for b in found]
    if truncated:
        rows.append({"length": "", "k": "", "cycle": f"truncated at cap {args.cap}"})
    _emit(args, rows)


def _weights(args, g: Graph):
    if args.weights == "broder":
        return None
    if args.weights == "jsv":
        return jsv_weights(g)
    if args.weights.startswith("file:"):
        with open(args.weights[5:]) as fh:
            return read_weights(fh)
    raise SystemExit(f"unknown weights {args.weights!r}; use broder, jsv or file:PATH")


def _cut(args, g: Graph, model):
    spec = args.cut
    if spec in CUTS:
        if not getattr(args, "gadget", None):
            raise SystemExit(f"cut {spec!r} needs --gadget")
        return cut_mask(model, _gadget(args), spec), spec
    if spec == "perfect":
        return model.pattern_mask(PERFECT), spec
    if spec.startswith("near:"):
        a, b = spec[5:].split(",")
        return model.pattern_mask(HolePattern.near(_vertex(g, a), _vertex(g, b))), spec
    raise SystemExit(f"unknown cut {spec!r}; use perfect, near:U,V or one of {', '.join(CUTS)}")


def cmd_chain_analyze(args) -> None:
    g = _graph(args)
    model = build_chain_model(g, _weights(args, g))
    reports = []
    if args.cut:
        mask, desc = _cut(args, g, model)
        reports.append(conductance(model, mask, desc))
    else:
        reports = sorted(tested_cuts(model), key=lambda r: r.phi)[:args.top]
    mix = mixing_time(model) if args.mixing else None
    rows = []
    for r in reports:
        row = {"cut": r.description or "pattern-class", "states": len(model), "size": r.size,
               "pi_S": r.pi_S, "phi": r.phi, "mix_lower": r.mixing_lower_bound}
        if mix is not None:
            row.update(mixing_time=mix.steps, capped=mix.capped)
        rows.append(row)
    _emit(args, rows)


def cmd_chain_run(args) -> None:
    g = _graph(args)
    w = _weights(args, g)
    start = _read_matching(g, args.start) if args.start else maximum_matching(g)
    model = None
    if args.exact_target:
        model = build_chain_model(g, w)
    marks = [int(x) for x in args.checkpoints.split(",")] if args.checkpoints else \
        [max(1, args.steps * i // 10) for i in range(1, 11)]
    summary = simulate(g, start, args.steps, args.seed, weights=w, model=model, checkpoints=marks)
    rows = [{"t": t, "perfect_visits": pv, "perfect_fraction": pv / (t + 1), "pattern_tv": tv}
            for t, pv, tv in summary.checkpoints]
    _emit(args, rows)


def cmd_experiment_torpid(args) -> None:
    cfg = ExperimentConfig(family=args.family, ks=_ks(args.ks), chain=args.chain,
                           weights=args.weights_source, cut=args.cut, output=args.output,
                           seed=args.seed)
    if args.broder_fraction:
        rows = broder_perfect_fraction(cfg.ks)
    else:
        rows = run_torpid_experiment(cfg)
    _emit(args, rows)


def _ks(spec: str) -> tuple[int, ...]:
    out = []
    for part in spec.split(","):
        if "-" in part:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return tuple(out)


def cmd_accept(args) -> int:
    try:
        verdicts = run_acceptance(args.suite)
    except UnknownSuite as err:
        raise SystemExit(str(err)) from None
    with _out(args.output) as fh:
        if args.format == "records":
            for rec in verdict_records(verdicts):
                fh.write(json.dumps(rec, default=str) + "\n")
        else:
            for v in verdicts:
                fh.write(v.line() + "\n")
    return 0 if all(v.passed for v in verdicts) else 1


def _common(suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags without defaults, so a flag given
    # before the subcommand is not reset by the subparser
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", default=d(None), help="edge-list file (default: stdin)")
    common.add_argument("--output", default=d(None), help="output file (default: stdout)")
    common.add_argument("--seed", type=int, default=d(0))
    common.add_argument("--format", choices=("csv", "records"), default=d("csv"))
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common(True)
    p = argparse.ArgumentParser(prog="pmatch", parents=[_common(False)],
                                description="Matching chains, gadgets and recursive counting.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gadget", parents=[common], help="write a gadget graph")
    g.add_argument("kind", choices=("boxes", "torpid", "counterexample", "reduction"))
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--ell", type=int, default=0)
    g.add_argument("--s", type=int, default=0)
    g.add_argument("--t", type=int, default=1)
    g.set_defaults(func=cmd_gadget)

    c = sub.add_parser("count", parents=[common], help="count perfect matchings")
    c.add_argument("--mode", choices=("exact", "brute", "ryser", "near", "omega", "recursive", "fpt"),
                   default="exact")
    c.add_argument("--eps", type=float, default=0.1)
    c.add_argument("--pivot", default="balanced")
    c.add_argument("--backend", choices=sorted(BACKENDS), default="enum")
    c.add_argument("--k-max", type=int, default=3)
    c.add_argument("--u")
    c.add_argument("--v")
    c.set_defaults(func=cmd_count)

    h = sub.add_parser("holes-table", parents=[common], help="matchings per hole pattern")
    h.set_defaults(func=cmd_holes_table)

    d = sub.add_parser("decompose", parents=[common], help="Gallai-Edmonds decomposition")
    d.set_defaults(func=cmd_decompose)

    f = sub.add_parser("fc-order", parents=[common], help="ear count of a factor-critical graph")
    f.add_argument("--base")
    f.set_defaults(func=cmd_fc_order)

    b = sub.add_parser("blossoms", parents=[common], help="blossoms through a hole")
    b.add_argument("--hole", required=True)
    b.add_argument("--matching", help="file of matched pairs (default: maximum matching of G - hole)")
    b.add_argument("--min", action="store_true")
    b.add_argument("--cap", type=int, default=100_000)
    b.set_defaults(func=cmd_blossoms)

    ch = sub.add_parser("chain", help="exact chain analysis and simulation")
    chs = ch.add_subparsers(dest="chain_command", required=True)
    for name, fn in (("analyze", cmd_chain_analyze), ("run", cmd_chain_run)):
        q = chs.add_parser(name, parents=[common])
        q.add_argument("--gadget", choices=sorted(FAMILIES))
        q.add_argument("--k", type=int, default=1)
        q.add_argument("--weights", default="jsv")
        q.set_defaults(func=fn)
        if name == "analyze":
            q.add_argument("--cut", help="perfect, near:U,V, near-uv, near-x1v or S1S3")
            q.add_argument("--top", type=int, default=5)
            q.add_argument("--mixing", action="store_true")
        else:
            q.add_argument("--steps", type=int, required=True)
            q.add_argument("--start", help="file of matched pairs (default: maximum matching)")
            q.add_argument("--checkpoints", help="comma-separated step counts")
            q.add_argument("--exact-target", action="store_true",
                           help="build the exact model and report pattern TV at checkpoints")

    e = sub.add_parser("experiment", help="experiment drivers")
    es = e.add_subparsers(dest="experiment", required=True)
    t = es.add_parser("torpid", parents=[common])
    t.add_argument("--family", choices=("torpid", "counterexample"), default="torpid")
    t.add_argument("--ks", default="1-3")
    t.add_argument("--chain", choices=("jsv", "broder"), default="jsv")
    t.add_argument("--weights-source", default="eq2")
    t.add_argument("--cut", choices=CUTS)
    t.add_argument("--broder-fraction", action="store_true")
    t.set_defaults(func=cmd_experiment_torpid)

    a = sub.add_parser("accept", parents=[common], help="run acceptance suites")
    a.add_argument("suite", nargs="?", default="all")
    a.set_defaults(func=cmd_accept)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = args.func(args)
    except (GraphError, OSError) as err:
        raise SystemExit(f"pmatch: {err}") from None
    return rc or 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
