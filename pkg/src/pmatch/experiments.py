"""Experiment drivers: the conductance table for the torpid gadgets and the
named acceptance suites."""

from __future__ import annotations

import csv
import json
import math
import random
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, TextIO

import numpy as np

from . import oracles
from .blossoms import enumerate_blossoms
from .corpus import (chain_corpus, random_digraph, random_factor_critical_graphs,
                     random_graphs)
from .exact import count_near, count_omega, count_perfect
from .gadgets import (GadgetGraph, blossom_reduction, chain_of_boxes, classify_S,
                      counterexample_graph, torpid_gadget)
from .graph import PERFECT, Graph, HolePattern, Matching, delete_vertices, induced
from .mcmc import (DENSE_CAP, STATE_CAP, ChainModel, StateSpaceTooLarge, build_chain_model,
                   conductance, detailed_balance_error, is_symmetric, jsv_weights, mixing_time,
                   power_iteration, row_sum_error)
from .recursive import (FirstVertex, NamedFirst, Balanced, FcOrderExceeded, fc_contract,
                        fc_order_of, fpt_count, perturbing_backend, perturbing_subcount,
                        recursive_count)
from .structure import fc_order, gallai_edmonds, maximum_matching

FAMILIES = {"torpid": torpid_gadget, "counterexample": counterexample_graph,
            "boxes": chain_of_boxes}
CUTS = ("near-uv", "near-x1v", "S1S3")


@dataclass
class ExperimentConfig:
    """One experiment: gadget family and k range, chain and weights, the cut,
    where to write, and the seed for anything stochastic."""

    family: str = "torpid"
    ks: tuple[int, ...] = (1, 2, 3)
    chain: str = "jsv"
    weights: str = "eq2"
    cut: str | None = None
    output: str | None = None
    seed: int | None = 0
    cap: int = STATE_CAP

    def __post_init__(self):
        self.ks = tuple(sorted(set(int(k) for k in self.ks)))
        if not self.ks:
            raise ValueError("k range must be non-empty")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {sorted(FAMILIES)}")
        if self.chain not in ("jsv", "broder"):
            raise ValueError("chain must be 'jsv' or 'broder'")
        if self.cut is None:
            self.cut = "S1S3" if self.family == "counterexample" else "near-x1v"
        if self.cut not in CUTS:
            raise ValueError(f"unknown cut {self.cut!r}; choose from {CUTS}")

    def require_seed(self) -> int:
        if self.seed is None:
            raise ValueError("a seed is required for stochastic runs")
        return self.seed


# cuts


def s_membership(model: ChainModel, gk: GadgetGraph) -> np.ndarray:
    """Boolean array (states x 4): column i-1 says whether the state is in S_i."""
    g = gk.graph
    idx = g.index
    out = np.ones((len(model), 4), dtype=bool)
    for i in range(1, 5):
        part = np.zeros(len(g) + 1, dtype=bool)  # last slot absorbs the hole marker -1
        for x in gk.parts[f"H{i}"]:
            part[idx[x]] = True
        for name in (f"u{i}", f"v{i}"):
            mates = model.states[:, idx[g.vertex(name)]]
            out[:, i - 1] &= ~part[mates]
    return out


def cut_mask(model: ChainModel, gk: GadgetGraph, cut: str) -> np.ndarray:
    if cut == "S1S3":
        s = s_membership(model, gk)
        return s[:, 0] | s[:, 2]
    a, b = ("u", "v") if cut == "near-uv" else ("x1", "v")
    return model.pattern_mask(HolePattern.near(gk[a], gk[b]))


def torpidity_bound(k: int, pi_a: float, pi_abar: float) -> float:
    return 2.0 ** (-k + 1) * pi_abar / pi_a


def _weights(cfg: ExperimentConfig, g: Graph):
    if cfg.chain == "broder":
        return None
    if cfg.weights == "eq2":
        return jsv_weights(g)
    if cfg.weights.startswith("file:"):
        from .mcmc import read_weights
        with open(cfg.weights[5:]) as fh:
            return read_weights(fh)
    raise ValueError(f"unknown weight source {cfg.weights!r}")


def run_torpid_experiment(cfg: ExperimentConfig, log: Callable[[str], None] | None = None) -> list[dict]:
    """Exact conductance of the configured cut for each k.

    Rows carry k, |Omega|, pi(A), Phi(A), 1/(4 Phi(A)), the
    torpidity bound 2^(1-k) pi(A-bar)/pi(A) and the ratio to the previous k.  A k
    whose state space exceeds the cap gives a row with status ``skipped``.
    """
    rows = []
    prev = None
    for k in cfg.ks:
        gk = FAMILIES[cfg.family](k)
        g = gk.graph
        t0 = time.perf_counter()
        row = {"k": k, "n": len(g), "cut": cfg.cut, "chain": cfg.chain}
        try:
            model = build_chain_model(g, _weights(cfg, g), cap=cfg.cap)
        except StateSpaceTooLarge as err:
            row.update(status="skipped", reason=str(err))
            rows.append(row)
            prev = None
            continue
        rep = conductance(model, cut_mask(model, gk, cfg.cut), cfg.cut)
        row.update(status="ok", omega=len(model), pi_A=rep.pi_S, phi=rep.phi,
                   mix_lower=1 / (4 * rep.phi) if rep.phi else math.inf,
                   bound=torpidity_bound(k, rep.pi_S, rep.pi_Sbar),
                   ratio=rep.phi / prev if prev else None,
                   seconds=round(time.perf_counter() - t0, 3))
        if cfg.family == "torpid" and cfg.cut != "near-uv":
            other = conductance(model, cut_mask(model, gk, "near-uv"))
            row["phi_near_uv"] = other.phi
        prev = rep.phi
        rows.append(row)
        if log:
            log(json.dumps(row))
    return rows


def broder_perfect_fraction(ks: Iterable[int]) -> list[dict]:
    """pi(P)/pi(Omega) under the uniform (Broder) stationary law on G_k."""
    out = []
    for k in ks:
        g = counterexample_graph(k).graph
        p, n = count_omega(g)
        out.append({"k": k, "perfect": p, "near": n, "fraction": p / (p + n)})
    return out


def write_csv(rows: list[dict], fh: TextIO) -> None:
    if not rows:
        return
    keys: list[str] = []
    for r in rows:
        for key in r:
            if key not in keys:
                keys.append(key)
    w = csv.DictWriter(fh, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({key: _fmt(r.get(key)) for key in keys})


def write_records(rows: list[dict], fh: TextIO) -> None:
    for r in rows:
        fh.write(json.dumps(r, default=str) + "\n")


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else v


# acceptance


@dataclass
class Verdict:
    criterion: int
    suite: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} [{self.criterion}] {self.suite}: {json.dumps(self.detail, default=str)}"


class UnknownSuite(KeyError):
    def __init__(self, name: str):
        super().__init__(f"unknown suite {name!r}; available: {', '.join(SUITES)}")

    def __str__(self) -> str:
        return self.args[0]


def _gadget_counts() -> tuple[bool, dict]:
    d: dict = {"boxes": [], "torpid": [], "counterexample": []}
    ok = True
    for k in range(1, 9):
        b = chain_of_boxes(k)
        p, nr = count_perfect(b.graph), count_near(b.graph, b["v0"], b[f"v{2 * k - 1}"])
        ok &= p == 2 ** k and nr == 1
        d["boxes"].append((k, p, nr))
    for k in range(1, 4):
        h = torpid_gadget(k)
        g = h.graph
        row = (k, len(g), count_perfect(g), count_near(g, h["u"], h["v"]), count_near(g, h["x1"], h["v"]))
        ok &= row[1] == 16 * k + 4 and row[2] == 2 and row[3] == 1 and row[4] >= 2 ** k
        d["torpid"].append(row)
    from .exact import iter_omega
    for k in (1, 2):
        gk = counterexample_graph(k)
        g = gk.graph
        order = g.order
        split = {"S1S3": 0, "S2S4": 0, "other": 0}
        total = 0
        for pairs in iter_omega(g, holes=0):
            total += 1
            s = classify_S(gk, Matching.of((order[a], order[b]) for a, b in pairs))
            if s == {1, 3}:
                split["S1S3"] += 1
            elif s == {2, 4}:
                split["S2S4"] += 1
            else:
                split["other"] += 1
        ok &= total == 8 and count_perfect(g) == 8 and split == {"S1S3": 4, "S2S4": 4, "other": 0}
        d["counterexample"].append((k, len(g), total, split))
    return ok, d


def _conductance_decay() -> tuple[bool, dict]:
    cfg = ExperimentConfig(family="torpid", ks=(1, 2, 3))
    rows = run_torpid_experiment(cfg)
    g_rows = run_torpid_experiment(ExperimentConfig(family="counterexample", ks=(1,)))
    bound_ok = all(r["status"] == "ok" and r["phi"] <= r["bound"] for r in rows)
    bound_ok &= all(r["status"] == "skipped" or r["phi"] <= r["bound"] for r in g_rows)
    ratio_ok = all(r["ratio"] <= 0.6 for r in rows if r.get("ratio") is not None)
    keep = ("k", "omega", "pi_A", "phi", "bound", "ratio", "phi_near_uv")
    return bound_ok and ratio_ok, {
        "bound_ok": bound_ok, "ratio_ok": ratio_ok,
        "H": [{k: r.get(k) for k in keep} for r in rows],
        "G": [{k: r.get(k) for k in keep + ("status",)} for r in g_rows]}


def _chain_models() -> Iterable[tuple[str, ChainModel]]:
    for name, g in chain_corpus():
        c0, c2 = count_omega(g)
        if c0 + c2 == 0:
            continue
        yield name + "/broder", build_chain_model(g)
        yield name + "/jsv", build_chain_model(g, jsv_weights(g))


def _chain_validity() -> tuple[bool, dict]:
    worst = {"row": 0.0, "balance": 0.0, "power": 0.0}
    failures = []
    graphs = set()
    for name, model in _chain_models():
        graphs.add(name.split("/")[0])
        r, b = row_sum_error(model), detailed_balance_error(model)
        x, _ = power_iteration(model)
        res = float(np.abs(x - model.pi).sum())
        sym = is_symmetric(model) if model.chain == "broder" else True
        worst["row"] = max(worst["row"], r)
        worst["balance"] = max(worst["balance"], b)
        worst["power"] = max(worst["power"], res)
        if not (r <= 1e-12 and b <= 1e-10 and res < 1e-9 and sym):
            failures.append(name)
    need = {"C4", "C6", "B2", "H1"}
    ok = not failures and len(graphs) >= 20 and need <= graphs
    return ok, {"graphs": len(graphs), "worst": worst, "failures": failures}


def _structure_agreement() -> tuple[bool, dict]:
    bad = []
    for i, g in enumerate(random_graphs(seed=11, count=200, max_n=12)):
        ge = gallai_edmonds(g)
        if ge.D != oracles.d_set(g):
            bad.append(("D", i))
            continue
        if not _structure_theorem(g, ge):
            bad.append(("structure", i))
    fc_bad = []
    fcs = random_factor_critical_graphs(seed=13, count=50, max_n=11)
    for i, g in enumerate(fcs):
        if not oracles.factor_critical(g):
            fc_bad.append(("not-fc", i))
            continue
        eq4 = 1 + sum(len(g.adj[v]) - 2 for v in g.vertices) // 2
        for base in sorted(g.vertices):
            r, dec = fc_order(g, base)
            if r != eq4 or dec.order != eq4 or not _valid_ears(g, dec):
                fc_bad.append(("order", i, base))
    return not bad and not fc_bad, {"graphs": 200, "fc_graphs": len(fcs), "bad": bad, "fc_bad": fc_bad}


def _structure_theorem(g: Graph, ge) -> bool:
    """Components of D factor-critical, G[C] perfectly matchable, and every
    maximum matching (the computed one and, for small graphs, all of them)
    near-perfect on D-components, matching A into distinct components and
    perfect on C."""
    for comp in ge.d_components:
        if not oracles.factor_critical(induced(g, comp)):
            return False
    if ge.C and not oracles.perfect_matchings(induced(g, ge.C)):
        return False
    nu = oracles.nu(g)
    if 2 * nu != len(g) - len(ge.d_components) + len(ge.A):
        return False
    ms = [frozenset(maximum_matching(g).pairs)]
    if len(g) <= 8:
        ms = oracles.matchings_of_size(g, nu)
    comp_of = {v: j for j, comp in enumerate(ge.d_components) for v in comp}
    for m in ms:
        mate = {}
        for a, b in m:
            mate[a], mate[b] = b, a
        for v in ge.C:
            if mate.get(v) not in ge.C:
                return False
        hit = set()
        for a in ge.A:
            j = comp_of.get(mate.get(a))
            if j is None or j in hit:
                return False
            hit.add(j)
        for j, comp in enumerate(ge.d_components):
            inside = sum(1 for v in comp if mate.get(v) in comp)
            if inside != len(comp) - 1:
                return False
    return True


def _valid_ears(g: Graph, dec) -> bool:
    seen = {dec.base}
    used: set = set()
    for ear in dec.ears:
        if (len(ear) - 1) % 2 == 0:
            return False
        if ear[0] not in seen or ear[-1] not in seen:
            return False
        if any(v in seen for v in ear[1:-1]):
            return False
        for a, b in zip(ear, ear[1:]):
            e = (min(a, b), max(a, b))
            if e in used or not g.has_edge(a, b):
                return False
            used.add(e)
        seen.update(ear)
    return seen == set(g.vertices) and used == set(g.simple_edges)


def _recursive() -> tuple[bool, dict]:
    bad = []
    graphs = random_graphs(seed=17, count=200, max_n=14)
    for i, g in enumerate(graphs):
        truth = count_perfect(g)
        if recursive_count(g, 0.1, Balanced()).value != truth:
            bad.append(("exact", i))
    gk = counterexample_graph(1)
    u_labels = {f"{s}{i}" for s in "uv" for i in range(1, 5)}
    g1 = recursive_count(gk.graph, 0.1, NamedFirst(u_labels)).value
    acc_bad = []
    worst = 0.0
    for i, g in enumerate(graphs[:60]):
        truth = count_perfect(g)
        if not truth:
            continue
        for eps in (0.1, 0.01):
            for sign in (1, -1):
                r = recursive_count(g, eps, FirstVertex(), perturbing_backend(sign),
                                    subcount=perturbing_subcount(sign))
                dev = abs(float(r.value) / truth - 1)
                worst = max(worst, dev / eps)
                if not r.brackets(truth):
                    acc_bad.append((i, eps, sign))
    ok = not bad and g1 == 8 and not acc_bad
    return ok, {"graphs": len(graphs), "G1": g1, "bad": bad, "accuracy_bad": acc_bad,
                "worst_error_over_eps": round(worst, 4)}


def _fpt() -> tuple[bool, dict]:
    bad, covered, skipped = [], 0, 0
    graphs = random_graphs(seed=19, count=200, max_n=14) + [g for _, g in chain_corpus()]
    for i, g in enumerate(graphs):
        try:
            v = fpt_count(g, 0.1, k_max=3).value
        except FcOrderExceeded:
            skipped += 1
            continue
        covered += 1
        if v != count_perfect(g):
            bad.append(i)
    fc_bad, bound_bad = [], []
    fcs = random_factor_critical_graphs(seed=23, count=50, max_n=14)
    for i, h in enumerate(fcs):
        k = fc_order_of(h)
        for v in sorted(h.vertices):
            c = fc_contract(h, v)
            if c.count != count_perfect(delete_vertices(h, [v])):
                fc_bad.append((i, v))
            if not (3 * (c.vertices - 2) <= 2 * (k - 1) + 2 * c.vertices):
                bound_bad.append((i, v, c.vertices, c.edges, k))
    ok = not bad and not fc_bad and not bound_bad and covered > 0
    return ok, {"covered": covered, "skipped_order_gt_3": skipped, "bad": bad,
                "fc_graphs": len(fcs), "fc_bad": fc_bad, "bound_bad": bound_bad}


def _decode(r, cycle) -> tuple:
    names = [r.graph.label(x).rsplit("_", 1)[0] for x in cycle if x != r.w]
    out = []
    for x in names:
        if not out or out[-1] != x:
            out.append(x)
    return tuple(out)


def _blossom_reduction() -> tuple[bool, dict]:
    rng = random.Random(29)
    bad = []
    total_paths = 0
    for trial in range(100):
        n = rng.randint(2, 8)
        vs, arcs = random_digraph(rng, n, rng.uniform(0.1, 0.5))
        s, t = rng.sample(vs, 2)
        r = blossom_reduction(vs, arcs, s, t, 0)
        found = enumerate_blossoms(r.graph, r.matching, r.w)
        paths = set(oracles.st_paths(arcs, s, t))
        total_paths += len(paths)
        decoded = []
        for b in found:
            p = _decode(r, b.cycle)
            if p[0] != str(s):
                p = tuple(reversed(p))
            decoded.append(tuple(int(x) for x in p))
        if found.truncated or len(decoded) != len(set(decoded)) or set(decoded) != paths:
            bad.append(trial)
    ell = 2
    r = blossom_reduction(["s", "t"], [("s", "t")], "s", "t", ell)
    two = len(enumerate_blossoms(r.graph, r.matching, r.w))
    r3 = blossom_reduction(["s", "a", "t"], [("s", "a"), ("a", "t")], "s", "t", ell)
    three = len(enumerate_blossoms(r3.graph, r3.matching, r3.w))
    ok = not bad and two == 2 ** (2 * ell) and three == 2 ** (3 * ell)
    return ok, {"digraphs": 100, "paths": total_paths, "bad": bad,
                "ell2_two_vertex_path": two, "ell2_three_vertex_path": three}


def tested_cuts(model: ChainModel) -> list:
    """Pattern classes, the perfect class and its complement, and every
    union of a pattern class with the perfect class, keeping cuts with
    pi(S) <= 1/2."""
    cuts = []
    perfect = model.pattern_mask(PERFECT) if PERFECT in model.patterns else None
    masks = [model.pattern_mask(p) for p in model.patterns]
    if perfect is not None:
        masks += [perfect, ~perfect]
    for m in masks:
        if m.any() and not m.all():
            rep = conductance(model, m)
            if rep.pi_S <= 0.5:
                cuts.append(rep)
    return cuts


def _mixing_bound() -> tuple[bool, dict]:
    checked, bad = 0, []
    models = [(n, m) for n, m in _chain_models() if len(m) <= DENSE_CAP]
    for k in (1, 2, 3):
        h = torpid_gadget(k)
        for chain, w in (("jsv", jsv_weights(h.graph)), ("broder", None)):
            models.append((f"H{k}/{chain}", build_chain_model(h.graph, w)))
    for name, model in models:
        if len(model) < 2:
            continue
        cuts = tested_cuts(model)
        if not cuts:
            continue
        phi = min(c.phi for c in cuts)
        bound = math.inf if phi == 0 else 1 / (4 * phi)
        t = mixing_time(model)
        checked += 1
        if t.steps < bound:
            bad.append((name, t.steps, bound))
    return not bad and checked > 0, {"models": checked, "bad": bad}


SUITES: dict[str, tuple[int, Callable[[], tuple[bool, dict]]]] = {
    "gadget-counts": (1, _gadget_counts),
    "conductance-decay": (2, _conductance_decay),
    "chain-validity": (3, _chain_validity),
    "oracle-agreement": (4, _structure_agreement),
    "recursive": (5, _recursive),
    "fpt": (6, _fpt),
    "blossom-reduction": (7, _blossom_reduction),
    "mixing-bound": (8, _mixing_bound),
}


def run_acceptance(name: str = "all") -> list[Verdict]:
    """Run one named suite, or ``"all"`` of them in criterion order."""
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise UnknownSuite(name)
    out = []
    for s in names:
        crit, fn = SUITES[s]
        t0 = time.perf_counter()
        ok, detail = fn()
        out.append(Verdict(crit, s, bool(ok), detail, round(time.perf_counter() - t0, 2)))
    return out


def verdict_records(verdicts: list[Verdict]) -> list[dict]:
    return [asdict(v) for v in verdicts]


__all__ = ["ExperimentConfig", "SUITES", "UnknownSuite", "Verdict", "broder_perfect_fraction",
           "cut_mask", "run_acceptance", "run_torpid_experiment", "s_membership",
           "tested_cuts", "torpidity_bound", "write_csv", "write_records"]
