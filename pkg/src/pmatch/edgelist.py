"""Plain-text edge-list format.

::

    # comment
    p <n> <m>
    <u> <v>          (m lines)
    l <v> <label>    (optional)

Vertices are ``0..n-1``.  Blank lines and ``#`` lines are ignored.
"""

from __future__ import annotations

from typing import IO, Iterable

from .graph import Graph, GraphError, build_graph


def parse(lines: Iterable[str]) -> Graph:
    n = m = None
    edges = []
    labels = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        try:
            if tok[0] == "p":
                n, m = int(tok[1]), int(tok[2])
            elif tok[0] == "l":
                labels[int(tok[1])] = " ".join(tok[2:])
            else:
                edges.append((int(tok[0]), int(tok[1])))
        except (IndexError, ValueError):
            raise GraphError(f"line {lineno}: cannot parse {line!r}") from None
    if n is None:
        raise GraphError("missing 'p <n> <m>' header")
    if m != len(edges):
        raise GraphError(f"header announces {m} edges, found {len(edges)}")
    for v in labels:
        if not 0 <= v < n:
            raise GraphError(f"label on out-of-range vertex {v}")
    return build_graph(n, edges, labels)


def read(path: str) -> Graph:
    with open(path) as fh:
        return parse(fh)


def format_graph(g: Graph) -> str:
    """Serialise ``g``, compacting its vertex ids to ``0..n-1`` in id order."""
    idx = g.index
    out = [f"p {len(g)} {len(g.edges)}"]
    out += [f"{idx[u]} {idx[v]}" for u, v in sorted(g.edges)]
    out += [f"l {idx[v]} {lab}" for v, lab in sorted(g.labels.items())]
    return "\n".join(out) + "\n"


def write(g: Graph, fh: IO[str]) -> None:
    fh.write(format_graph(g))


def parse_digraph(lines: Iterable[str]) -> tuple[list[int], list[tuple[int, int]]]:
    """Same layout, but each ``u v`` line is the arc u -> v; labels are ignored."""
    n = m = None
    arcs = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("l "):
            continue
        tok = line.split()
        try:
            if tok[0] == "p":
                n, m = int(tok[1]), int(tok[2])
            else:
                arcs.append((int(tok[0]), int(tok[1])))
        except (IndexError, ValueError):
            raise GraphError(f"line {lineno}: cannot parse {line!r}") from None
    if n is None:
        raise GraphError("missing 'p <n> <m>' header")
    if m != len(arcs):
        raise GraphError(f"header announces {m} arcs, found {len(arcs)}")
    for i, (x, y) in enumerate(arcs):
        if not (0 <= x < n and 0 <= y < n):
            raise GraphError(f"arc {i} ({x}, {y}) has an endpoint outside 0..{n - 1}")
    return list(range(n)), arcs
