"""Seeded graph families shared by the tests, the acceptance runner and the
experiment scripts."""

from __future__ import annotations

import random

from .gadgets import chain_of_boxes, torpid_gadget
from .graph import Graph, build_graph


def cycle(n: int) -> Graph:
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def complete(n: int) -> Graph:
    return build_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def grid(r: int, c: int) -> Graph:
    es = []
    for i in range(r):
        for j in range(c):
            v = i * c + j
            if j + 1 < c:
                es.append((v, v + 1))
            if i + 1 < r:
                es.append((v, v + c))
    return build_graph(r * c, es)


def petersen() -> Graph:
    es = [(i, (i + 1) % 5) for i in range(5)]
    es += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    es += [(i, i + 5) for i in range(5)]
    return build_graph(10, es)


def prism() -> Graph:
    return build_graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)])


def bowtie() -> Graph:
    return build_graph(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    return build_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])


def random_graphs(seed: int, count: int, max_n: int, min_n: int = 0,
                  even: bool = False) -> list[Graph]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(min_n, max_n)
        if even and n % 2:
            n -= 1
        out.append(random_graph(rng, n, rng.uniform(0.15, 0.7)))
    return out


def random_factor_critical(rng: random.Random, max_n: int) -> Graph:
    """Grow a graph by odd ears from a single vertex; the result is
    factor-critical by construction."""
    n = 1
    edges: set[tuple[int, int]] = set()
    target = rng.randint(1, max_n)
    attempts = 0
    while attempts < 50:
        attempts += 1
        inner = rng.choice((0, 2, 2, 4))
        if n + inner > target and inner:
            inner = 0
        a, b = rng.randrange(n), rng.randrange(n)
        if inner == 0:
            if a == b or (min(a, b), max(a, b)) in edges:
                continue
            edges.add((min(a, b), max(a, b)))
        else:
            chain = [a] + list(range(n, n + inner)) + [b]
            n += inner
            for x, y in zip(chain, chain[1:]):
                edges.add((min(x, y), max(x, y)))
        if n >= target and rng.random() < 0.3:
            break
    return build_graph(n, sorted(edges))


def random_factor_critical_graphs(seed: int, count: int, max_n: int, min_n: int = 3) -> list[Graph]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        g = random_factor_critical(rng, max_n)
        if min_n <= len(g) <= max_n:
            out.append(g)
    return out


def random_digraph(rng: random.Random, n: int, p: float) -> tuple[list[int], list[tuple[int, int]]]:
    arcs = [(x, y) for x in range(n) for y in range(n) if x != y and rng.random() < p]
    return list(range(n)), arcs


def chain_corpus() -> list[tuple[str, Graph]]:
    """Small graphs whose full chains are cheap: at least 20, including the
    named gadgets."""
    named = [
        ("C4", cycle(4)), ("C6", cycle(6)), ("C8", cycle(8)), ("P4", path(4)), ("P6", path(6)),
        ("K4", complete(4)), ("K6", complete(6)), ("B1", chain_of_boxes(1).graph),
        ("B2", chain_of_boxes(2).graph), ("B3", chain_of_boxes(3).graph),
        ("H1", torpid_gadget(1).graph), ("grid2x3", grid(2, 3)), ("grid2x4", grid(2, 4)),
        ("grid3x4", grid(3, 4)), ("prism", prism()), ("petersen", petersen()),
        ("C5", cycle(5)), ("bowtie", bowtie()), ("K5", complete(5)),
    ]
    for i, g in enumerate(random_graphs(seed=7, count=40, max_n=9, min_n=4)):
        named.append((f"random{i}", g))
    return named
