"""Maximum matching, Gallai-Edmonds decomposition and odd ear decompositions.

The matching code is Edmonds' blossom-shrinking search in its array form
(``base``/``parent``/``outer``), run on positions ``0..n-1`` of
``Graph.order``.  One search grows an alternating forest from a set of
exposed roots; with a maximum matching and every exposed vertex as a root,
the outer vertices of the finished forest are exactly D(G).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .graph import Graph, Matching, delete_vertices, induced


class NotFactorCritical(ValueError):
    pass


class _AugmentingPath(Exception):
    def __init__(self, v: int, w: int):
        self.v, self.w = v, w


def _adjacency(g: Graph) -> list[list[int]]:
    idx = g.index
    return [sorted(idx[w] for w in g.adj[v]) for v in g.order]


class _Forest:
    """Alternating forest with blossom contraction over a fixed matching."""

    def __init__(self, adj: list[list[int]], match: list[int]):
        n = len(adj)
        self.adj = adj
        self.match = match
        self.base = list(range(n))
        self.parent = [-1] * n
        self.outer = [False] * n
        self.root = [-1] * n

    def _lca(self, a: int, b: int) -> int:
        base, match, parent = self.base, self.match, self.parent
        seen = set()
        while True:
            a = base[a]
            seen.add(a)
            if match[a] == -1:
                break
            a = parent[match[a]]
        while True:
            b = base[b]
            if b in seen:
                return b
            if match[b] == -1:
                return -1
            b = parent[match[b]]

    def _mark(self, v: int, b: int, child: int, blossom: set[int]) -> None:
        base, match, parent = self.base, self.match, self.parent
        while base[v] != b:
            blossom.add(base[v])
            blossom.add(base[match[v]])
            parent[v] = child
            child = match[v]
            v = parent[match[v]]

    def grow(self, roots: list[int]) -> int:
        """Search from ``roots``; return an exposed endpoint of an augmenting
        path found from a single root, else -1.  Two outer vertices of
        different trees meeting raises :class:`_AugmentingPath`."""
        base, match, parent, outer, root = self.base, self.match, self.parent, self.outer, self.root
        q = deque()
        for r in roots:
            outer[r] = True
            root[r] = r
            q.append(r)
        while q:
            v = q.popleft()
            for to in self.adj[v]:
                if base[v] == base[to] or match[v] == to:
                    continue
                if outer[to]:
                    if root[to] != root[v]:
                        raise _AugmentingPath(v, to)
                    b = self._lca(v, to)
                    blossom: set[int] = set()
                    self._mark(v, b, to, blossom)
                    self._mark(to, b, v, blossom)
                    for i in range(len(base)):
                        if base[i] in blossom:
                            base[i] = b
                            if not outer[i]:
                                outer[i] = True
                                root[i] = root[v]
                                q.append(i)
                elif parent[to] == -1:
                    parent[to] = v
                    root[to] = root[v]
                    if match[to] == -1:
                        return to
                    m = match[to]
                    outer[m] = True
                    root[m] = root[v]
                    q.append(m)
        return -1


def _augment(match: list[int], parent: list[int], v: int) -> None:
    while v != -1:
        pv = parent[v]
        ppv = match[pv]
        match[v] = pv
        match[pv] = v
        v = ppv


def _max_matching(adj: list[list[int]], match: list[int] | None = None) -> list[int]:
    n = len(adj)
    match = list(match) if match is not None else [-1] * n
    for r in range(n):
        if match[r] != -1:
            continue
        f = _Forest(adj, match)
        end = f.grow([r])
        if end != -1:
            _augment(match, f.parent, end)
    return match


def maximum_matching(g: Graph) -> Matching:
    """Maximum-cardinality matching.

    Exposed vertices are tried in increasing id order, each with a
    breadth-first alternating search, so the result is deterministic.
    """
    adj = _adjacency(g)
    match = _max_matching(adj)
    order = g.order
    return Matching.of((order[i], order[j]) for i, j in enumerate(match) if j > i)


def matching_number(g: Graph) -> int:
    return len(maximum_matching(g))


def has_perfect_matching(g: Graph) -> bool:
    return 2 * matching_number(g) == len(g)


@dataclass(frozen=True)
class GallaiEdmonds:
    d_components: tuple[frozenset[int], ...]
    A: frozenset[int]
    C: frozenset[int]

    @property
    def D(self) -> frozenset[int]:
        return frozenset().union(*self.d_components)

    def component_of(self, v: int) -> frozenset[int]:
        for comp in self.d_components:
            if v in comp:
                return comp
        raise KeyError(v)


def _outer_set(adj: list[list[int]], match: list[int]) -> list[bool]:
    roots = [i for i, m in enumerate(match) if m == -1]
    f = _Forest(adj, match)
    if roots:
        end = f.grow(roots)
        assert end == -1, "matching is not maximum"
    return f.outer


def gallai_edmonds(g: Graph) -> GallaiEdmonds:
    adj = _adjacency(g)
    match = _max_matching(adj)
    try:
        outer = _outer_set(adj, match)
    except _AugmentingPath:  # pragma: no cover - maximality guarantees this
        raise AssertionError("augmenting path after maximum matching")
    order = g.order
    d = frozenset(order[i] for i, o in enumerate(outer) if o)
    a = frozenset(w for v in d for w in g.adj[v]) - d
    c = g.vertices - d - a
    comps = induced(g, d).components() if d else []
    return GallaiEdmonds(tuple(comps), a, c)


def is_factor_critical(g: Graph) -> bool:
    """True iff ``g - v`` has a perfect matching for every vertex ``v``.

    Uses Gallai's lemma: a connected graph in which every vertex is missed by
    some maximum matching is factor-critical.
    """
    if len(g) == 0:
        return False
    if len(g.components()) != 1:
        return False
    return gallai_edmonds(g).D == g.vertices


@dataclass(frozen=True)
class EarDecomposition:
    base: int
    ears: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return len(self.ears)


def _eq4_order(g: Graph) -> int:
    excess = sum(len(g.adj[v]) - 2 for v in g.vertices)
    assert excess % 2 == 0
    return 1 + excess // 2


def ear_decomposition(g: Graph, base: int | None = None) -> EarDecomposition:
    """Odd ear decomposition of a factor-critical graph from ``base``.

    Every ear alternates with respect to a fixed perfect matching of
    ``g - base``: it leaves the current subgraph by a non-matching edge,
    walks matched pairs, and re-enters by a non-matching edge.  Parallel
    edges and loops are ignored.
    """
    if not is_factor_critical(g):
        raise NotFactorCritical("graph is not factor-critical")
    if base is None:
        base = g.order[0]
    mate = maximum_matching(delete_vertices(g, [base])).partner_map
    in_h = {base}
    h_edges: set[tuple[int, int]] = set()
    all_edges = set(g.simple_edges)
    ears: list[tuple[int, ...]] = []

    def find_ear() -> tuple[int, ...]:
        for e in sorted(all_edges - h_edges):
            if e[0] in in_h and e[1] in in_h:
                return e
        for h1 in sorted(in_h):
            for x1 in sorted(g.adj[h1]):
                if x1 in in_h:
                    continue
                path = [h1, x1, mate[x1]]
                on_path = {x1, mate[x1]}
                found = _extend(path, on_path)
                if found:
                    return tuple(found)
        raise AssertionError("no alternating ear found")  # pragma: no cover

    def _extend(path: list[int], on_path: set[int]) -> list[int] | None:
        y = path[-1]
        for h2 in sorted(g.adj[y]):
            if h2 in in_h:
                return path + [h2]
        for x in sorted(g.adj[y]):
            if x in on_path or x in in_h or x == mate[y]:
                continue
            z = mate[x]
            if z in on_path:
                continue
            path.extend((x, z))
            on_path.update((x, z))
            found = _extend(path, on_path)
            if found:
                return found
            path.pop()
            path.pop()
            on_path.difference_update((x, z))
        return None

    while h_edges != all_edges or len(in_h) != len(g):
        ear = find_ear()
        ears.append(ear)
        in_h.update(ear)
        for a, b in zip(ear, ear[1:]):
            h_edges.add((a, b) if a <= b else (b, a))
    return EarDecomposition(base, tuple(ears))


def fc_order(g: Graph, base: int | None = None) -> tuple[int, EarDecomposition]:
    """Ear count of a factor-critical graph with a witness decomposition.

    The count comes from the degree identity sum(d_u - 2) = 2(r - 1); the
    witness must agree with it.
    """
    dec = ear_decomposition(g, base)
    r = _eq4_order(g)
    if dec.order != r:  # pragma: no cover - would contradict Lovasz's theorem
        raise AssertionError(f"ear witness has {dec.order} ears, degree identity gives {r}")
    return r, dec


def allowed_edges(g: Graph) -> frozenset[tuple[int, int]]:
    """Edges that lie in at least one perfect matching (empty if none exists)."""
    adj = _adjacency(g)
    match = _max_matching(adj)
    n = len(adj)
    if any(m == -1 for m in match):
        return frozenset()
    order = g.order
    out = set()
    for i in range(n):
        for j in adj[i]:
            if j < i:
                continue
            if match[i] == j:
                out.add((order[i], order[j]))
                continue
            # warm start: drop i, j and their partners' pairs, re-augment once
            sub_adj = [[] if k in (i, j) else [t for t in adj[k] if t != i and t != j]
                       for k in range(n)]
            m2 = list(match)
            for k in (i, j):
                m2[m2[k]] = -1
                m2[k] = -1
            m2 = _max_matching(sub_adj, m2)
            if sum(1 for k in range(n) if m2[k] == -1) == 2:
                out.add((order[i], order[j]))
    return frozenset(out)
