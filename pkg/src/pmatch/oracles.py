"""Slow, definition-level reference implementations.

Nothing here shares code with the fast paths: matchings are listed by plain
recursion over edges, and every derived quantity is read off that list.
Only for graphs of a dozen or so vertices.
"""

from __future__ import annotations

from collections import Counter
from functools import lru_cache
from typing import Iterator

from .graph import Graph, HolePattern, Matching


def all_matchings(g: Graph) -> Iterator[frozenset[tuple[int, int]]]:
    """Every matching of the simple graph underlying ``g``, empty included."""
    edges = sorted(e for e in g.simple_edges if e[0] != e[1])

    def rec(i: int, used: frozenset, acc: tuple):
        if i == len(edges):
            yield frozenset(acc)
            return
        yield from rec(i + 1, used, acc)
        a, b = edges[i]
        if a not in used and b not in used:
            yield from rec(i + 1, used | {a, b}, acc + (edges[i],))

    yield from rec(0, frozenset(), ())


def matchings_of_size(g: Graph, k: int) -> list[frozenset]:
    return [m for m in all_matchings(g) if len(m) == k]


def nu(g: Graph) -> int:
    return max(len(m) for m in all_matchings(g))


def perfect_matchings(g: Graph) -> list[frozenset]:
    if len(g) % 2:
        return []
    return matchings_of_size(g, len(g) // 2)


def perfect_count_multigraph(g: Graph) -> int:
    """Perfect matchings counting parallel edges separately; loops ignored."""
    mult = Counter(e for e in g.edges if e[0] != e[1])
    total = 0
    for m in perfect_matchings(g):
        p = 1
        for e in m:
            p *= mult[e]
        total += p
    return total


def hole_table(g: Graph) -> Counter:
    n = len(g)
    out: Counter = Counter()
    for m in all_matchings(g):
        if 2 * len(m) == n:
            out[HolePattern()] += 1
        elif 2 * len(m) == n - 2:
            covered = {v for e in m for v in e}
            out[HolePattern(tuple(sorted(g.vertices - covered)))] += 1
    return out


def d_set(g: Graph) -> frozenset[int]:
    """Vertices missed by at least one maximum matching."""
    k = nu(g)
    out = set()
    for m in matchings_of_size(g, k):
        covered = {v for e in m for v in e}
        out |= g.vertices - covered
    return frozenset(out)


def factor_critical(g: Graph) -> bool:
    if len(g) % 2 == 0:
        return False
    for v in g.vertices:
        rest = Graph(g.vertices - {v}, tuple(e for e in g.edges if v not in e), {}, g.next_id)
        if not perfect_matchings(rest):
            return False
    return True


def st_paths(arcs, s, t) -> list[tuple]:
    """Simple directed s-t paths, as vertex tuples."""
    out_arcs: dict = {}
    for x, y in arcs:
        if x != y:
            out_arcs.setdefault(x, set()).add(y)
    found = []

    def dfs(path):
        x = path[-1]
        if x == t:
            found.append(tuple(path))
            return
        for y in sorted(out_arcs.get(x, ()), key=str):
            if y not in path:
                dfs(path + [y])

    dfs([s])
    return found


def permanent(rows) -> int:
    """Permanent by expansion along the first row (memoised on used columns)."""
    rows = [list(r) for r in rows]
    m = len(rows)

    @lru_cache(maxsize=None)
    def rec(i: int, used: int):
        if i == m:
            return 1
        return sum(rows[i][j] * rec(i + 1, used | 1 << j)
                   for j in range(m) if not used >> j & 1 and rows[i][j])

    return rec(0, 0)


def one_step_targets(g: Graph, m: Matching) -> set[frozenset]:
    """Matchings reachable in one Broder move, read directly off the rule."""
    pairs = set(m.pairs)
    covered = {v for e in pairs for v in e}
    hole = sorted(g.vertices - covered)
    out = set()
    if not hole:
        for e in pairs:
            out.add(frozenset(pairs - {e}))
        return out
    u, v = hole
    if g.has_edge(u, v):
        out.add(frozenset(pairs | {(u, v)}))
    for w in (u, v):
        for x in g.adj[w]:
            if x in (u, v):
                continue
            mate = next(e for e in pairs if x in e)
            new = (pairs - {mate}) | {(min(w, x), max(w, x))}
            out.add(frozenset(new))
    return out
