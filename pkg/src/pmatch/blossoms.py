"""Blossoms at a hole: enumeration, rotation, minimum-length search.

A blossom at hole ``w`` is an odd cycle ``w, c1, ..., c2k`` whose edges
alternate unmatched/matched starting and ending at ``w`` with unmatched
edges.  Blossoms are equal when their edge sets are equal; the stored
cycle starts at the hole and runs in the direction whose second vertex is
smaller than its last.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .graph import Graph, GraphError, Matching, holes


@dataclass(frozen=True)
class Blossom:
    cycle: tuple[int, ...]

    def __post_init__(self):
        if len(self.cycle) % 2 == 0 or len(self.cycle) < 3:
            raise ValueError("a blossom is an odd cycle of length at least 3")
        c = self.cycle
        if c[1] > c[-1]:
            object.__setattr__(self, "cycle", (c[0],) + tuple(reversed(c[1:])))

    @property
    def hole(self) -> int:
        return self.cycle[0]

    @property
    def k(self) -> int:
        return len(self.cycle) // 2

    def __len__(self) -> int:
        return len(self.cycle)

    def __contains__(self, v: int) -> bool:
        return v in self.cycle

    @cached_property
    def edges(self) -> frozenset[tuple[int, int]]:
        c = self.cycle
        return frozenset((min(a, b), max(a, b)) for a, b in zip(c, c[1:] + c[:1]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Blossom):
            return NotImplemented
        return self.edges == other.edges

    def __hash__(self) -> int:
        return hash(self.edges)

    def rooted_at(self, v: int) -> Blossom:
        c = self.cycle
        i = c.index(v)
        return Blossom(c[i:] + c[:i])


def is_blossom(g: Graph, m: Matching, b: Blossom) -> bool:
    """Structural check: a simple odd cycle of ``g``, hole unmatched, and the
    edges alternate unmatched/matched from the hole in both directions."""
    c = b.cycle
    if len(set(c)) != len(c) or m.partner(c[0]) is not None:
        return False
    for i, (a, x) in enumerate(zip(c, c[1:] + c[:1])):
        if not g.has_edge(a, x):
            return False
        matched = (a, x) in m
        if matched != (i % 2 == 1):
            return False
    return True


def _check_hole(g: Graph, m: Matching, w: int) -> None:
    if w not in holes(g, m):
        raise GraphError(f"vertex {w} is not a hole of the matching")


@dataclass
class BlossomList:
    blossoms: list[Blossom]
    truncated: bool

    def __len__(self) -> int:
        return len(self.blossoms)

    def __iter__(self):
        return iter(self.blossoms)


def enumerate_blossoms(g: Graph, m: Matching, w: int, cap: int = 100_000,
                       max_length: int | None = None) -> BlossomList:
    """All blossoms through the hole ``w`` by depth-first alternating search.

    Each cycle is met once per direction and kept once.  Stops after ``cap``
    distinct blossoms with ``truncated=True``.  Output is sorted by length,
    then by cycle.
    """
    _check_hole(g, m, w)
    found: dict[frozenset, Blossom] = {}
    path = [w]
    on_path = {w}
    truncated = False
    mate = m.partner_map

    def dfs() -> bool:
        y = path[-1]
        if len(path) >= 3 and g.has_edge(y, w):
            b = Blossom(tuple(path))
            if b.edges not in found:
                found[b.edges] = b
                if len(found) >= cap:
                    return True
        if max_length is not None and len(path) + 2 > max_length:
            return False
        for x in sorted(g.adj[y]):
            if x in on_path or x == mate.get(y):
                continue
            z = mate.get(x)
            if z is None or z in on_path:
                continue
            path.extend((x, z))
            on_path.update((x, z))
            stop = dfs()
            path.pop()
            path.pop()
            on_path.difference_update((x, z))
            if stop:
                return True
        return False

    truncated = dfs()
    out = sorted(found.values(), key=lambda b: (len(b), b.cycle))
    return BlossomList(out, truncated)


def minimum_blossom(g: Graph, m: Matching, w: int) -> Blossom | None:
    """A shortest blossom through ``w`` (smallest cycle among ties), or ``None``.

    Breadth-first over alternating paths ranks the candidate lengths; each
    length is then confirmed by a bounded search, since a shortest
    alternating walk need not be a simple cycle.
    """
    _check_hole(g, m, w)
    mate = m.partner_map
    # alternating BFS from w: dist[v] = fewest matched edges to reach v by a
    # walk ending in a matched edge; a lower bound for any simple path
    dist = {w: 0}
    frontier = [w]
    best_possible = None
    while frontier:
        nxt = []
        for y in frontier:
            for x in g.adj[y]:
                z = mate.get(x)
                if z is None or x == mate.get(y) or z in dist:
                    continue
                dist[z] = dist[y] + 1
                nxt.append(z)
        frontier = nxt
    closers = [dist[y] for y in dist if y != w and g.has_edge(y, w)]
    if not closers:
        return None
    best_possible = min(closers)
    longest = 2 * max(dist.values()) + 1
    for length in range(2 * best_possible + 1, max(longest, 2 * best_possible + 1) + 1, 2):
        got = enumerate_blossoms(g, m, w, max_length=length).blossoms
        got = [b for b in got if len(b) == length]
        if got:
            return got[0]
    # simple alternating paths can be longer than the walk bound permits
    got = enumerate_blossoms(g, m, w).blossoms
    return got[0] if got else None


def rotate(g: Graph, m: Matching, b: Blossom, v: int) -> Matching:
    """Move the hole of ``b`` to ``v`` by flipping the even alternating path
    from the hole to ``v`` inside the cycle."""
    if v not in b:
        raise GraphError(f"vertex {v} is not on the blossom")
    if not is_blossom(g, m, b):
        raise GraphError("not a blossom of this matching")
    c = b.cycle
    i = c.index(v)
    if i == 0:
        return m
    walk = c[: i + 1] if i % 2 == 0 else (c[0],) + tuple(reversed(c[i:]))
    pairs = set(m.pairs)
    for a, x in zip(walk, walk[1:]):
        e = (min(a, x), max(a, x))
        if e in pairs:
            pairs.remove(e)
        else:
            pairs.add(e)
    return Matching(frozenset(pairs))
