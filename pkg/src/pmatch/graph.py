"""Undirected multigraphs with stable vertex ids, matchings and hole patterns."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping


class GraphError(ValueError):
    pass


class NotInOmega(ValueError):
    """Raised when a matching has a hole count other than 0 or 2."""


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected multigraph.

    ``edges`` is a multiset of normalised pairs ``(u, v)`` with ``u <= v``;
    loops and parallel edges are allowed.  ``next_id`` is the smallest id that
    has never been handed out for this graph's lineage, so fresh vertices made
    by :func:`quotient` never collide with deleted ones.
    """

    vertices: frozenset[int]
    edges: tuple[tuple[int, int], ...]
    labels: Mapping[int, str] = field(default_factory=dict)
    next_id: int = 0

    def __post_init__(self):
        for u, v in self.edges:
            if u not in self.vertices or v not in self.vertices:
                raise GraphError(f"edge ({u}, {v}) has an endpoint outside the vertex set")
        for v in self.labels:
            if v not in self.vertices:
                raise GraphError(f"label on missing vertex {v}")
        floor = max(self.vertices) + 1 if self.vertices else 0
        if self.next_id < floor:
            object.__setattr__(self, "next_id", floor)

    # basic views

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v: int) -> bool:
        return v in self.vertices

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.vertices == other.vertices
                and self.edge_multiset == other.edge_multiset
                and dict(self.labels) == dict(other.labels))

    def __hash__(self) -> int:
        return hash((self.vertices, tuple(sorted(self.edges))))

    def __repr__(self) -> str:
        return f"Graph(n={len(self.vertices)}, m={len(self.edges)})"

    @cached_property
    def order(self) -> tuple[int, ...]:
        """Vertices in increasing id order."""
        return tuple(sorted(self.vertices))

    @cached_property
    def edge_multiset(self) -> Counter:
        return Counter(self.edges)

    @cached_property
    def adj(self) -> dict[int, frozenset[int]]:
        """Simple adjacency: parallel edges collapsed, loops dropped."""
        nb: dict[int, set[int]] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            if u != v:
                nb[u].add(v)
                nb[v].add(u)
        return {v: frozenset(s) for v, s in nb.items()}

    @cached_property
    def simple_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted({e for e in self.edges if e[0] != e[1]}))

    def degree(self, v: int) -> int:
        """Multigraph degree; a loop counts twice."""
        return self._degrees[v]

    @cached_property
    def _degrees(self) -> dict[int, int]:
        deg = dict.fromkeys(self.vertices, 0)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj.get(u, ())

    def label(self, v: int) -> str | None:
        return self.labels.get(v)

    @cached_property
    def named(self) -> dict[str, int]:
        return {lab: v for v, lab in self.labels.items()}

    def vertex(self, label: str) -> int:
        try:
            return self.named[label]
        except KeyError:
            raise KeyError(f"no vertex labelled {label!r}") from None

    @cached_property
    def index(self) -> dict[int, int]:
        """Map vertex id -> position in :attr:`order`."""
        return {v: i for i, v in enumerate(self.order)}

    @cached_property
    def adj_masks(self) -> tuple[int, ...]:
        """Simple adjacency as bitmasks over positions in :attr:`order`."""
        idx = self.index
        masks = [0] * len(self.order)
        for v, nbrs in self.adj.items():
            m = 0
            for w in nbrs:
                m |= 1 << idx[w]
            masks[idx[v]] = m
        return tuple(masks)

    def components(self) -> list[frozenset[int]]:
        """Connected components, ordered by smallest vertex id."""
        seen: set[int] = set()
        comps = []
        for s in self.order:
            if s in seen:
                continue
            comp = {s}
            stack = [s]
            while stack:
                x = stack.pop()
                for y in self.adj[x]:
                    if y not in comp:
                        comp.add(y)
                        stack.append(y)
            seen |= comp
            comps.append(frozenset(comp))
        return comps

    def relabel(self, labels: Mapping[int, str]) -> Graph:
        merged = dict(self.labels)
        merged.update(labels)
        return Graph(self.vertices, self.edges, merged, self.next_id)


def build_graph(n: int, edges: Iterable[tuple[int, int]],
                labels: Mapping[int, str] | None = None) -> Graph:
    """Graph on vertices ``0..n-1`` with the given edge multiset."""
    if n < 0:
        raise GraphError("vertex count must be non-negative")
    norm = []
    for i, (u, v) in enumerate(edges):
        for x in (u, v):
            if not 0 <= x < n:
                raise GraphError(f"edge {i} = ({u}, {v}): endpoint {x} out of range 0..{n - 1}")
        norm.append(_edge(u, v))
    return Graph(frozenset(range(n)), tuple(norm), dict(labels or {}), n)


def from_edges(edges: Iterable[tuple[int, int]], vertices: Iterable[int] = (),
               labels: Mapping[int, str] | None = None) -> Graph:
    """Graph whose vertex set is ``vertices`` plus every edge endpoint."""
    es = [_edge(u, v) for u, v in edges]
    vs = set(vertices)
    for u, v in es:
        vs.add(u)
        vs.add(v)
    return Graph(frozenset(vs), tuple(es), dict(labels or {}))


def delete_vertices(g: Graph, s: Iterable[int]) -> Graph:
    s = frozenset(s)
    missing = s - g.vertices
    if missing:
        raise GraphError(f"unknown vertices {sorted(missing)}")
    keep = g.vertices - s
    edges = tuple(e for e in g.edges if e[0] in keep and e[1] in keep)
    labels = {v: lab for v, lab in g.labels.items() if v in keep}
    return Graph(keep, edges, labels, g.next_id)


def induced(g: Graph, keep: Iterable[int]) -> Graph:
    keep = frozenset(keep)
    if not keep <= g.vertices:
        raise GraphError(f"unknown vertices {sorted(keep - g.vertices)}")
    return delete_vertices(g, g.vertices - keep)


def quotient(g: Graph, h_vertices: Iterable[int],
             h_edges: Iterable[tuple[int, int]] = ()) -> tuple[Graph, int]:
    """Contract the subgraph ``(h_vertices, h_edges)`` into one fresh vertex.

    The edges of H are removed (one copy per listed edge); every other edge
    is re-targeted, so edges between H-vertices that are not in H become
    loops at the new vertex.  Returns the new graph and the new vertex id.
    """
    hv = frozenset(h_vertices)
    if not hv <= g.vertices:
        raise GraphError(f"unknown vertices {sorted(hv - g.vertices)}")
    remove = Counter(_edge(u, v) for u, v in h_edges)
    for (u, v), c in remove.items():
        if u not in hv or v not in hv:
            raise GraphError(f"H edge ({u}, {v}) leaves the H vertex set")
        if g.edge_multiset[(u, v)] < c:
            raise GraphError(f"H edge ({u}, {v}) is not in the graph")
    new = g.next_id
    edges = []
    for e in g.edges:
        if remove[e] > 0:
            remove[e] -= 1
            continue
        u, v = e
        edges.append(_edge(new if u in hv else u, new if v in hv else v))
    vertices = (g.vertices - hv) | {new}
    labels = {v: lab for v, lab in g.labels.items() if v not in hv}
    return Graph(vertices, tuple(edges), labels, new + 1), new


def disjoint_union(a: Graph, b: Graph) -> tuple[Graph, dict[int, int]]:
    """Union of ``a`` and a shifted copy of ``b``; returns the map for b's ids."""
    shift = a.next_id
    mp = {v: v + shift for v in b.vertices}
    edges = a.edges + tuple(_edge(mp[u], mp[v]) for u, v in b.edges)
    labels = dict(a.labels)
    labels.update({mp[v]: lab for v, lab in b.labels.items()})
    return Graph(a.vertices | frozenset(mp.values()), edges, labels), mp


# matchings


@dataclass(frozen=True)
class Matching:
    """A set of vertex-disjoint pairs, stored normalised as ``(min, max)``."""

    pairs: frozenset[tuple[int, int]]

    def __post_init__(self):
        seen: set[int] = set()
        for u, v in self.pairs:
            if u == v or u in seen or v in seen:
                raise GraphError(f"pair ({u}, {v}) is not disjoint from the rest")
            seen.update((u, v))

    @classmethod
    def of(cls, pairs: Iterable[tuple[int, int]] = ()) -> Matching:
        return cls(frozenset(_edge(u, v) for u, v in pairs))

    @cached_property
    def partner_map(self) -> dict[int, int]:
        d = {}
        for u, v in self.pairs:
            d[u] = v
            d[v] = u
        return d

    def partner(self, v: int) -> int | None:
        return self.partner_map.get(v)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(sorted(self.pairs))

    def __contains__(self, e: tuple[int, int]) -> bool:
        return _edge(*e) in self.pairs

    def add(self, u: int, v: int) -> Matching:
        return Matching(self.pairs | {_edge(u, v)})

    def remove(self, u: int, v: int) -> Matching:
        return Matching(self.pairs - {_edge(u, v)})

    def restrict(self, keep: Iterable[int]) -> Matching:
        keep = set(keep)
        return Matching(frozenset(e for e in self.pairs if e[0] in keep and e[1] in keep))


def is_valid_matching(g: Graph, m: Matching) -> bool:
    return all(g.has_edge(u, v) for u, v in m.pairs)


def check_matching(g: Graph, m: Matching) -> None:
    for u, v in m.pairs:
        if not g.has_edge(u, v):
            raise GraphError(f"matched pair ({u}, {v}) is not an edge")


@dataclass(frozen=True, order=True)
class HolePattern:
    """``()`` for a perfect matching, or the sorted hole pair ``(u, v)``."""

    holes: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.holes) not in (0, 2):
            raise NotInOmega(f"hole pattern must have 0 or 2 holes, got {self.holes}")
        if len(self.holes) == 2:
            u, v = self.holes
            if u == v:
                raise ValueError("near-perfect holes must be distinct")
            if u > v:
                object.__setattr__(self, "holes", (v, u))

    @classmethod
    def near(cls, u: int, v: int) -> HolePattern:
        return cls((u, v))

    @property
    def is_perfect(self) -> bool:
        return not self.holes

    def __str__(self) -> str:
        return "perfect" if self.is_perfect else f"near({self.holes[0]},{self.holes[1]})"


PERFECT = HolePattern()


def holes(g: Graph, m: Matching) -> frozenset[int]:
    check_matching(g, m)
    return g.vertices - m.partner_map.keys()


def hole_pattern(g: Graph, m: Matching) -> HolePattern:
    h = holes(g, m)
    if len(h) not in (0, 2):
        raise NotInOmega(f"matching leaves {len(h)} holes {sorted(h)}; not in Omega")
    return HolePattern(tuple(sorted(h)))
