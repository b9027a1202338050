"""Constructors for the gadget families: chain of boxes, torpid-mixing
gadget, counterexample ring, and the blossom-sampling reduction.

Every named vertex carries a label.  Copies nested inside a bigger graph get
a dotted prefix (``"H2.x1"``, ``"H2.B1.a0"``); the ring vertices of the
counterexample graph are ``t1..t4``, ``u1..u4``, ``v1..v4``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .graph import Graph, GraphError, Matching, hole_pattern


@dataclass(frozen=True)
class GadgetGraph:
    graph: Graph
    parts: Mapping[str, frozenset[int]] = field(default_factory=dict)

    @property
    def named(self) -> dict[str, int]:
        return self.graph.named

    def __getitem__(self, label: str) -> int:
        return self.graph.vertex(label)

    def __len__(self) -> int:
        return len(self.graph)


class _Builder:
    def __init__(self):
        self.n = 0
        self.edges: list[tuple[int, int]] = []
        self.labels: dict[int, str] = {}

    def vertex(self, label: str | None = None) -> int:
        v = self.n
        self.n += 1
        if label is not None:
            self.labels[v] = label
        return v

    def edge(self, u: int, v: int) -> None:
        self.edges.append((u, v))

    def path(self, vs: Iterable[int]) -> None:
        vs = list(vs)
        for a, b in zip(vs, vs[1:]):
            self.edge(a, b)

    def boxes(self, k: int, start: int, end: int | None,
              prefix: str) -> tuple[list[int], list[tuple[int, int]]]:
        """Chain of ``k`` boxes whose first path vertex is ``start`` and whose
        last is ``end`` (fresh when ``None``).  Returns the path vertices and
        the box corners ``(a_i, b_i)``."""
        spine = [start]
        for j in range(1, 2 * k):
            if j == 2 * k - 1 and end is not None:
                spine.append(end)
            else:
                spine.append(self.vertex(f"{prefix}v{j}"))
        self.path(spine)
        corners = []
        for i in range(k):
            a = self.vertex(f"{prefix}a{i}")
            b = self.vertex(f"{prefix}b{i}")
            self.path((spine[2 * i], a, b, spine[2 * i + 1]))
            corners.append((a, b))
        return spine, corners

    def build(self) -> Graph:
        return Graph(frozenset(range(self.n)), tuple((min(e), max(e)) for e in self.edges),
                     dict(self.labels), self.n)


def _check_k(k: int) -> None:
    if k < 1:
        raise ValueError("k must be a positive integer")


def chain_of_boxes(k: int) -> GadgetGraph:
    """B_k: path v0..v{2k-1} with a box (4-cycle) on every edge v{2i}v{2i+1}.

    4k vertices, 2^k perfect matchings, one near-perfect matching with holes
    at the two path ends.
    """
    _check_k(k)
    b = _Builder()
    v0 = b.vertex("v0")
    b.boxes(k, v0, None, "")
    return GadgetGraph(b.build())


# C12 positions of the named vertices of H_k
_TORPID_RING = {"a": 0, "x1": 1, "w1": 2, "u": 3, "w2": 4, "x2": 5,
                "b": 6, "y2": 7, "z2": 8, "v": 9, "z1": 10, "y1": 11}
_TORPID_BOXES = (("w1", "a"), ("a", "z1"), ("w2", "b"), ("b", "z2"))


def _torpid_into(b: _Builder, k: int, prefix: str, u: int | None = None,
                 v: int | None = None) -> set[int]:
    first = b.n
    ring = [None] * 12
    for name, pos in _TORPID_RING.items():
        if name == "u" and u is not None:
            ring[pos] = u
        elif name == "v" and v is not None:
            ring[pos] = v
        else:
            ring[pos] = b.vertex(prefix + name)
    b.path(ring + [ring[0]])
    at = {name: ring[pos] for name, pos in _TORPID_RING.items()}
    b.edge(at["a"], at["b"])
    for i, (s, t) in enumerate(_TORPID_BOXES, 1):
        b.boxes(k, at[s], at[t], f"{prefix}B{i}.")
    return set(range(first, b.n)) | {at["u"], at["v"]}


def torpid_gadget(k: int) -> GadgetGraph:
    """H_k: a C12 with chord ab and four B_k glued on (w1,a), (a,z1), (w2,b),
    (b,z2).  16k + 4 vertices."""
    _check_k(k)
    b = _Builder()
    _torpid_into(b, k, "")
    return GadgetGraph(b.build())


def counterexample_graph(k: int) -> GadgetGraph:
    """G_k: a C12 in which edges {u_i, v_i}, i = 1..4, are replaced by copies
    of H_k.  Ring order is t1 u1 [H1] v1 t2 u2 [H2] v2 t3 ... v4 (t1)."""
    _check_k(k)
    b = _Builder()
    t = [b.vertex(f"t{i}") for i in range(1, 5)]
    us = [b.vertex(f"u{i}") for i in range(1, 5)]
    vs = [b.vertex(f"v{i}") for i in range(1, 5)]
    parts = {}
    for i in range(4):
        b.edge(t[i], us[i])
        b.edge(vs[i], t[(i + 1) % 4])
        parts[f"H{i + 1}"] = frozenset(_torpid_into(b, k, f"H{i + 1}.", us[i], vs[i]))
    return GadgetGraph(b.build(), parts)


def classify_S(gk: GadgetGraph, m: Matching) -> frozenset[int]:
    """Indices i in 1..4 with u_i and v_i each a hole of ``m`` or matched
    outside H_i."""
    g = gk.graph
    hole_pattern(g, m)
    out = set()
    for i in range(1, 5):
        part = gk.parts[f"H{i}"]
        ok = True
        for name in (f"u{i}", f"v{i}"):
            p = m.partner(g.vertex(name))
            if p is not None and p in part:
                ok = False
                break
        if ok:
            out.add(i)
    return frozenset(out)


@dataclass(frozen=True)
class Reduction:
    graph: Graph
    matching: Matching
    w: int
    r: int | None = None


def blossom_reduction(vertices: Iterable, arcs: Iterable[tuple], s, t, ell: int = 0,
                      with_r: bool = False) -> Reduction:
    """Undirected graph and matching whose blossoms through ``w`` encode the
    s-t paths of the digraph ``(vertices, arcs)``.

    Each digraph vertex x becomes a pair x_0, x_1.  With ``ell == 0`` the
    pair is one matched edge; otherwise the pair is joined through a chain
    of ``ell`` boxes (x_0 - B_ell - x_1, with pendant attachments) carrying
    its unique perfect matching, so every box can be crossed two ways by an
    alternating path.  Arc (x, y) gives edge {x_1, y_0}; w is joined to s_0
    and t_1.
    """
    vertices = list(dict.fromkeys(vertices))
    if s == t:
        raise GraphError("s and t must differ")
    if s not in vertices or t not in vertices:
        raise GraphError("s and t must be digraph vertices")
    if ell < 0:
        raise ValueError("ell must be non-negative")
    b = _Builder()
    pairs = []
    end = {}
    for x in vertices:
        x0 = b.vertex(f"{x}_0")
        x1 = b.vertex(f"{x}_1")
        end[x] = (x0, x1)
        if ell == 0:
            b.edge(x0, x1)
            pairs.append((x0, x1))
        else:
            first = b.vertex(f"{x}.v0")
            spine, corners = b.boxes(ell, first, None, f"{x}.")
            b.edge(x0, spine[0])
            b.edge(spine[-1], x1)
            pairs += [(x0, spine[0]), (spine[-1], x1)]
            pairs += [(spine[2 * i + 1], spine[2 * i + 2]) for i in range(ell - 1)]
            pairs += corners
    seen = set()
    for x, y in arcs:
        if x == y or (x, y) in seen:
            continue
        seen.add((x, y))
        b.edge(end[x][1], end[y][0])
    w = b.vertex("w")
    b.edge(w, end[s][0])
    b.edge(end[t][1], w)
    r = b.vertex("r") if with_r else None
    g = b.build()
    m = Matching.of(pairs)
    for p, q in m.pairs:
        assert g.has_edge(p, q)
    return Reduction(g, m, w, r)
