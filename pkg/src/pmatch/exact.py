"""Exact counting of perfect and near-perfect matchings, and exact permanents.

All matching counts run a memoised branching recursion over bitmasks of the
remaining vertices.  For perfect matchings the branch vertex is one of
minimum remaining degree (lowest position on ties), so a degree-one vertex
is matched before anything else and dead ends of degree zero are cut
immediately.  Counts that admit holes branch in a fixed low-bandwidth order
instead, since any vertex may be left unmatched and degrees stop pruning.
"""

from __future__ import annotations

import sys
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import reverse_cuthill_mckee

from .graph import PERFECT, Graph, HolePattern, delete_vertices

Number = int | float | Fraction

RYSER_CAP = 24


@dataclass(frozen=True)
class CountEstimate:
    """A count with its guarantee: exact (``eps is None``) or within a factor
    ``1 + eps`` either way."""

    value: Number
    eps: float | None = None

    @property
    def exact(self) -> bool:
        return self.eps is None

    @property
    def mode(self) -> str:
        return "exact" if self.eps is None else f"approx({self.eps:g})"

    def brackets(self, truth: Number) -> bool:
        if self.eps is None:
            return self.value == truth
        lo, hi = truth / (1 + self.eps), truth * (1 + self.eps)
        return lo <= self.value <= hi


def _pick(masks: Sequence[int], mask: int) -> tuple[int, int]:
    best, best_deg = -1, 1 << 30
    m = mask
    while m:
        low = m & -m
        i = low.bit_length() - 1
        m ^= low
        d = (masks[i] & mask).bit_count()
        if d < best_deg:
            best, best_deg = i, d
            if d <= 1:
                break
    return best, best_deg


class _Recursion:
    """Bump the recursion limit for deep but narrow branchings."""

    def __init__(self, depth: int):
        self.depth = depth

    def __enter__(self):
        self.old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(self.old, 4 * self.depth + 1000))

    def __exit__(self, *exc):
        sys.setrecursionlimit(self.old)


def count_perfect_masks(masks: Sequence[int], mask: int,
                        weight: Mapping[tuple[int, int], Number] | None = None) -> Number:
    """Number (or total weight) of perfect matchings of the vertices in ``mask``.

    With ``weight``, each matched pair ``(i, j)`` with ``i < j`` contributes
    its weight multiplicatively; this is how parallel edges are counted.
    """
    memo: dict[int, Number] = {0: 1}

    def rec(mask: int) -> Number:
        got = memo.get(mask)
        if got is not None:
            return got
        if mask.bit_count() % 2:
            memo[mask] = 0
            return 0
        i, d = _pick(masks, mask)
        total: Number = 0
        if d:
            rest = mask & ~(1 << i)
            nb = masks[i] & mask
            while nb:
                low = nb & -nb
                j = low.bit_length() - 1
                nb ^= low
                sub = rec(rest & ~low)
                if sub:
                    if weight is not None:
                        sub = sub * weight[(i, j) if i < j else (j, i)]
                    total += sub
        memo[mask] = total
        return total

    with _Recursion(mask.bit_count()):
        return rec(mask)


def _full(g: Graph) -> int:
    return (1 << len(g)) - 1


def elimination_order(g: Graph) -> list[int]:
    """Positions of ``g.order`` in reverse Cuthill-McKee order.

    Peeling vertices in a low-bandwidth order keeps the set of distinct
    remaining-vertex masks small, which is what the hole-counting memo needs.
    """
    n = len(g)
    if n == 0:
        return []
    rows, cols = [], []
    for i, m in enumerate(g.adj_masks):
        while m:
            low = m & -m
            rows.append(i)
            cols.append(low.bit_length() - 1)
            m ^= low
    a = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    return [int(i) for i in reverse_cuthill_mckee(a, symmetric_mode=True)]


def _permuted_masks(g: Graph, perm: Sequence[int]) -> list[int]:
    """Adjacency masks in which bit ``r`` is the vertex ``perm[r]``."""
    rank = {p: r for r, p in enumerate(perm)}
    out = []
    for p in perm:
        m, nm = g.adj_masks[p], 0
        while m:
            low = m & -m
            nm |= 1 << rank[low.bit_length() - 1]
            m ^= low
        out.append(nm)
    return out


def count_perfect(g: Graph) -> int:
    """Exact number of perfect matchings (parallel edges collapsed, loops ignored)."""
    return count_perfect_masks(g.adj_masks, _full(g))


def count_near(g: Graph, u: int, v: int) -> int:
    """Exact number of near-perfect matchings with holes exactly at ``u`` and ``v``."""
    if u == v:
        raise ValueError("holes must be distinct")
    return count_perfect(delete_vertices(g, [u, v]))


class _HoleCounts:
    """Memoised ``(c0, c1, c2)`` counts of matchings of a vertex mask that
    leave exactly 0, 1 or 2 vertices unmatched.

    Bits follow :func:`elimination_order`, and the branch vertex is always
    the lowest remaining bit: it is either a hole or matched to a remaining
    neighbour, so every matching is counted once.
    """

    def __init__(self, g: Graph):
        self.perm = elimination_order(g)
        self.masks = _permuted_masks(g, self.perm)
        self.full = _full(g)
        self.memo: dict[int, tuple[int, int, int]] = {0: (1, 0, 0)}

    def __call__(self, mask: int) -> tuple[int, int, int]:
        got = self.memo.get(mask)
        if got is not None:
            return got
        low = mask & -mask
        rest = mask ^ low
        h0, h1, _ = self(rest)
        c0, c1, c2 = 0, h0, h1
        nb = self.masks[low.bit_length() - 1] & rest
        while nb:
            bit = nb & -nb
            nb ^= bit
            a, b, c = self(rest ^ bit)
            c0 += a
            c1 += b
            c2 += c
        res = (c0, c1, c2)
        self.memo[mask] = res
        return res


def count_omega(g: Graph) -> tuple[int, int]:
    """``(|P|, |N|)``: perfect and two-hole near-perfect matching counts."""
    hc = _HoleCounts(g)
    with _Recursion(len(g)):
        c0, _, c2 = hc(hc.full)
    return c0, c2


def hole_pattern_table(g: Graph) -> dict[HolePattern, int]:
    """Counts for the perfect pattern and every realised two-hole pattern.

    One memoised pass over matchings with at most two holes; patterns with a
    zero count are omitted (the perfect entry is always present).
    """
    perm = elimination_order(g)
    masks = _permuted_masks(g, perm)
    memo: dict[int, tuple[int, dict, dict]] = {0: (1, {}, {})}

    def rec(mask: int):
        got = memo.get(mask)
        if got is not None:
            return got
        low = mask & -mask
        i = low.bit_length() - 1
        rest = mask ^ low
        h0, h1, _ = rec(rest)
        c0 = 0
        c1: Counter = Counter()
        c2: Counter = Counter()
        if h0:
            c1[i] += h0
        for j, cnt in h1.items():
            c2[(i, j)] += cnt
        nb = masks[i] & rest
        while nb:
            bit = nb & -nb
            nb ^= bit
            a, b, c = rec(rest ^ bit)
            c0 += a
            c1.update(b)
            c2.update(c)
        res = (c0, c1, c2)
        memo[mask] = res
        return res

    with _Recursion(len(g)):
        c0, _, c2 = rec(_full(g))
    order = g.order
    table = {PERFECT: c0}
    near = {HolePattern.near(order[perm[i]], order[perm[j]]): cnt
            for (i, j), cnt in c2.items() if cnt}
    table.update(sorted(near.items()))
    return table


def iter_omega(g: Graph, holes: int | None = None) -> Iterator[tuple[tuple[int, int], ...]]:
    """Enumerate the state space as tuples of matched position pairs.

    Positions index ``g.order``.  ``holes`` restricts to 0 or 2 holes; the
    default yields perfect matchings first, then near-perfect ones.  Branches
    that cannot be completed are pruned with the memoised hole counts, so
    the work is proportional to the output.
    """
    if holes is None:
        yield from iter_omega(g, 0)
        yield from iter_omega(g, 2)
        return
    if holes not in (0, 2):
        raise ValueError("holes must be 0 or 2")
    hc = _HoleCounts(g)
    perm, masks = hc.perm, hc.masks

    def walk(mask: int, need: int, acc: list[tuple[int, int]]):
        if mask == 0:
            yield tuple(sorted(acc))
            return
        low = mask & -mask
        i = low.bit_length() - 1
        rest = mask ^ low
        nb = masks[i] & rest
        while nb:
            bit = nb & -nb
            nb ^= bit
            sub = rest ^ bit
            if hc(sub)[need]:
                a, b = perm[i], perm[bit.bit_length() - 1]
                acc.append((a, b) if a < b else (b, a))
                yield from walk(sub, need, acc)
                acc.pop()
        if need and hc(rest)[need - 1]:
            yield from walk(rest, need - 1, acc)

    with _Recursion(len(g)):
        if hc(hc.full)[holes]:
            yield from walk(hc.full, holes, [])


# permanents


@dataclass(frozen=True)
class BipartiteWeighted:
    """Square non-negative weight matrix between ``left`` and ``right``."""

    left: tuple
    right: tuple
    weights: tuple[tuple[Number, ...], ...]

    def __post_init__(self):
        m = len(self.left)
        if len(self.right) != m or len(self.weights) != m or any(len(r) != m for r in self.weights):
            raise ValueError("weight matrix must be square and match both sides")
        if any(w < 0 for r in self.weights for w in r):
            raise ValueError("weights must be non-negative")

    @classmethod
    def from_matrix(cls, rows: Sequence[Sequence[Number]]) -> BipartiteWeighted:
        m = len(rows)
        return cls(tuple(range(m)), tuple(range(m)), tuple(tuple(r) for r in rows))

    @property
    def size(self) -> int:
        return len(self.left)


class PermanentTooLarge(ValueError):
    pass


def _rows(b: BipartiteWeighted | Sequence[Sequence[Number]]) -> tuple[tuple[Number, ...], ...]:
    if isinstance(b, BipartiteWeighted):
        return b.weights
    rows = tuple(tuple(r) for r in b)
    if any(len(r) != len(rows) for r in rows):
        raise ValueError("matrix must be square")
    return rows


def ryser_permanent(b: BipartiteWeighted | Sequence[Sequence[Number]], cap: int = RYSER_CAP) -> Number:
    """Exact permanent by Ryser's inclusion-exclusion over column subsets,
    visiting subsets in Gray-code order so each step updates the row sums
    by one column.  Integer and Fraction inputs stay exact."""
    a = _rows(b)
    m = len(a)
    if m > cap:
        raise PermanentTooLarge(f"{m}x{m} exceeds the Ryser cap {cap}; use the enumeration or an approximate backend")
    if m == 0:
        return 1
    sums: list[Number] = [0] * m
    total: Number = 0
    in_set = [False] * m
    size = 0
    for k in range(1, 1 << m):
        j = (k & -k).bit_length() - 1
        if in_set[j]:
            in_set[j] = False
            size -= 1
            for i in range(m):
                sums[i] -= a[i][j]
        else:
            in_set[j] = True
            size += 1
            for i in range(m):
                sums[i] += a[i][j]
        prod: Number = 1
        for s in sums:
            if not s:
                prod = 0
                break
            prod *= s
        if prod:
            total += prod if size % 2 == m % 2 else -prod
    return total


def permanent_enum(b: BipartiteWeighted | Sequence[Sequence[Number]]) -> Number:
    """Exact permanent by branching on the row with fewest non-zero choices,
    memoised on the sets of remaining rows and columns.  Fast on sparse
    supports, where Ryser's 2^m is hopeless."""
    a = _rows(b)
    m = len(a)
    support = [[(j, w) for j, w in enumerate(row) if w] for row in a]
    memo: dict[tuple[int, int], Number] = {}

    def rec(rows: int, cols: int) -> Number:
        if rows == 0:
            return 1
        key = (rows, cols)
        got = memo.get(key)
        if got is not None:
            return got
        best, best_opts = -1, None
        r = rows
        while r:
            low = r & -r
            i = low.bit_length() - 1
            r ^= low
            opts = [(j, w) for j, w in support[i] if cols >> j & 1]
            if best_opts is None or len(opts) < len(best_opts):
                best, best_opts = i, opts
                if len(opts) <= 1:
                    break
        total: Number = 0
        rest = rows & ~(1 << best)
        for j, w in best_opts:
            sub = rec(rest, cols & ~(1 << j))
            if sub:
                total += w * sub
        memo[key] = total
        return total

    with _Recursion(m):
        return rec((1 << m) - 1, (1 << m) - 1)


def bipartite_adjacency(g: Graph, left: Sequence[int], right: Sequence[int]) -> BipartiteWeighted:
    rows = tuple(tuple(1 if g.has_edge(x, y) else 0 for y in right) for x in left)
    return BipartiteWeighted(tuple(left), tuple(right), rows)


def bipartition(g: Graph) -> tuple[list[int], list[int]] | None:
    """Two-colouring by id order, or ``None`` if ``g`` has an odd cycle."""
    color: dict[int, int] = {}
    for s in g.order:
        if s in color:
            continue
        color[s] = 0
        stack = [s]
        while stack:
            x = stack.pop()
            for y in g.adj[x]:
                if y not in color:
                    color[y] = 1 - color[x]
                    stack.append(y)
                elif color[y] == color[x]:
                    return None
    left = [v for v in g.order if color[v] == 0]
    right = [v for v in g.order if color[v] == 1]
    return left, right
