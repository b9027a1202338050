"""Recursive approximate counting of perfect matchings through Gallai-Edmonds
decompositions, and its fixed-parameter specialisation.

One level of the recursion removes a pivot ``u``, decomposes ``G - u`` into
D, A and C, counts the perfect matchings of every ``H - v`` (H a
D-component, v in H) and of ``G[C]``, and finishes with the permanent of a
weighted bipartite graph between ``A + u`` and the D-components.  Every
perfect matching of G restricts to a maximum matching of ``G - u`` that
misses exactly one vertex of D, which is where the product formula comes
from.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .exact import (RYSER_CAP, BipartiteWeighted, CountEstimate, Number, PermanentTooLarge,
                    count_perfect, count_perfect_masks, permanent_enum, ryser_permanent)
from .graph import Graph, delete_vertices, induced
from .structure import (GallaiEdmonds, NotFactorCritical, allowed_edges, gallai_edmonds,
                        is_factor_critical)

# pivot strategies


class Pivot:
    name = "pivot"

    def choose(self, g: Graph) -> int:  # pragma: no cover - interface
        raise NotImplementedError


class FirstVertex(Pivot):
    """Lowest vertex id."""

    name = "first"

    def choose(self, g: Graph) -> int:
        return min(g.vertices)


def _balance_key(g: Graph, u: int) -> tuple[int, int, int]:
    ge = gallai_edmonds(delete_vertices(g, [u]))
    biggest = max((len(c) for c in ge.d_components), default=0)
    return biggest, -len(ge.A), u


@dataclass
class Balanced(Pivot):
    """The vertex whose removal leaves the smallest largest D-component,
    preferring a large A on ties.  Graphs above ``threshold`` vertices fall
    back to the lowest id, since scoring costs one decomposition per vertex."""

    threshold: int = 40
    name = "balanced"

    def choose(self, g: Graph) -> int:
        if len(g) > self.threshold or len(g) <= 2:
            return min(g.vertices)
        return min(g.vertices, key=lambda u: _balance_key(g, u))


@dataclass
class NamedFirst(Pivot):
    """Vertices whose labels are in ``labels`` first (lowest id among them),
    then ``fallback``."""

    labels: frozenset[str]
    fallback: Pivot = field(default_factory=Balanced)
    name = "named"

    def __post_init__(self):
        self.labels = frozenset(self.labels)

    def choose(self, g: Graph) -> int:
        hits = [v for v, lab in g.labels.items() if lab in self.labels and v in g.vertices]
        if hits:
            return min(hits)
        return self.fallback.choose(g)


@dataclass
class Custom(Pivot):
    fn: Callable[[Graph], int]
    name = "custom"

    def choose(self, g: Graph) -> int:
        u = self.fn(g)
        if u not in g.vertices:
            raise ValueError(f"custom pivot returned {u!r}, not a vertex of the graph")
        return u


# permanent backends


class Backend:
    name = "backend"
    exact = True

    def __call__(self, b: BipartiteWeighted, eps: float) -> Number:  # pragma: no cover
        raise NotImplementedError


class Enumeration(Backend):
    name = "enum"

    def __call__(self, b: BipartiteWeighted, eps: float) -> Number:
        return permanent_enum(b)


@dataclass
class Ryser(Backend):
    cap: int = RYSER_CAP
    name = "ryser"

    def __call__(self, b: BipartiteWeighted, eps: float) -> Number:
        return ryser_permanent(b, self.cap)


@dataclass
class External(Backend):
    """Caller-supplied evaluator ``fn(weights, eps)`` that promises a value
    within a factor ``1 + eps`` of the permanent."""

    fn: Callable[[BipartiteWeighted, float], Number]
    exact: bool = False
    name = "external"

    def __call__(self, b: BipartiteWeighted, eps: float) -> Number:
        return self.fn(b, eps)


BACKENDS = {"enum": Enumeration, "ryser": Ryser}


class SubInstanceError(RuntimeError):
    """A backend failed on a specific sub-instance."""

    def __init__(self, vertices: Iterable[int], size: int, cause: Exception):
        self.vertices = frozenset(vertices)
        self.size = size
        super().__init__(f"permanent of size {size} failed on the sub-instance with vertices "
                         f"{sorted(self.vertices)}: {cause}")


@dataclass
class RecursionStats:
    calls: int = 0
    max_depth: int = 0
    memo_hits: int = 0
    max_d_component: int = 0
    max_permanent: int = 0
    zero_exits: int = 0

    def as_dict(self) -> dict[str, int]:
        return dict(self.__dict__)


# line 10


def line10_matrix(g: Graph, u: int, ge: GallaiEdmonds,
                  m: Mapping[int, Number]) -> BipartiteWeighted:
    """Weighted bipartite graph between ``A(G-u) + u`` and the D-components
    of ``G - u``: the weight of (x, H) sums ``m[v]`` over the neighbours v of
    x in H.  Parallel edges count once, as everywhere in exact counting."""
    left = tuple(sorted(ge.A)) + (u,)
    right = tuple(sorted(ge.d_components, key=min))
    rows = []
    for x in left:
        row = []
        for comp in right:
            row.append(sum((m[v] for v in g.adj[x] if v in comp), 0))
        rows.append(tuple(row))
    return BipartiteWeighted(left, right, tuple(rows))


SubCounter = Callable[[Graph, float], Number]


def recursive_count(g: Graph, eps: float = 0.1, pivot: Pivot | None = None,
                    backend: Backend | None = None, *, subcount: SubCounter | None = None,
                    stats: RecursionStats | None = None) -> CountEstimate:
    """Perfect matchings of ``g`` to within a factor ``1 + eps``.

    With an exact backend the answer is exact and carries ``eps=None``.
    ``subcount(graph, accuracy)``, when given, replaces the recursive calls
    on ``H - v`` and on ``G[C]`` by an outside solver of the stated
    accuracy; this is how error injection is tested.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    pivot = pivot or Balanced()
    backend = backend or Enumeration()
    stats = stats if stats is not None else RecursionStats()
    exact = backend.exact and subcount is None
    # sub-instances are induced subgraphs, so the vertex set names them; an
    # approximate estimate is reused only at the same accuracy
    memo: dict[tuple, Number] = {}

    def rec(h: Graph, e: float, depth: int) -> Number:
        stats.calls += 1
        stats.max_depth = max(stats.max_depth, depth)
        if len(h) == 0:
            return 1
        if len(h) % 2:
            stats.zero_exits += 1
            return 0
        key = (h.vertices, None if exact else e)
        got = memo.get(key)
        if got is not None:
            stats.memo_hits += 1
            return got
        value = level(h, e, depth)
        memo[key] = value
        return value

    def sub(h: Graph, e: float, depth: int) -> Number:
        if subcount is not None:
            return subcount(h, e) if len(h) else 1
        return rec(h, e, depth + 1)

    def level(h: Graph, e: float, depth: int) -> Number:
        n = len(h)
        u = pivot.choose(h)
        hu = delete_vertices(h, [u])
        ge = gallai_edmonds(hu)
        if len(ge.d_components) != len(ge.A) + 1:
            stats.zero_exits += 1
            return 0
        e_v = e / (2 * n)
        m: dict[int, Number] = {}
        for comp in ge.d_components:
            stats.max_d_component = max(stats.max_d_component, len(comp))
            hc = induced(hu, comp)
            for v in sorted(comp):
                m[v] = sub(delete_vertices(hc, [v]), e_v, depth)
        m_c = sub(induced(hu, ge.C), e / 3, depth) if ge.C else 1
        if not m_c:
            stats.zero_exits += 1
            return 0
        b = line10_matrix(h, u, ge, m)
        stats.max_permanent = max(stats.max_permanent, b.size)
        try:
            perm = backend(b, e / 3)
        except PermanentTooLarge as err:
            raise SubInstanceError(h.vertices, b.size, err) from err
        return m_c * perm

    value = rec(g, eps, 0)
    return CountEstimate(value, None if exact else eps)


# fixed-parameter variant


@dataclass(frozen=True)
class Contraction:
    """Outcome of reducing ``H - v``: the count, plus the multigraph left
    for brute force (vertex count and structural edge count)."""

    count: int
    vertices: int
    edges: int


def _contract(vertices: set[int], mult: Counter, weight: dict) -> tuple[int, int]:
    """Shrink in place: forced pairs at single-neighbour vertices, and
    three-way merges at two-neighbour vertices.  Returns (factor, next_id)."""
    factor = 1
    nxt = max(vertices, default=-1) + 1

    def nbrs(x: int) -> dict[int, tuple[int, Number]]:
        out = {}
        for (a, b), c in mult.items():
            if a == x:
                out[b] = (c, weight[(a, b)])
            elif b == x:
                out[a] = (c, weight[(a, b)])
        return out

    def drop(x: int) -> None:
        for e in [e for e in mult if x in e]:
            del mult[e]
            del weight[e]
        vertices.discard(x)

    changed = True
    while changed and vertices:
        changed = False
        for x in sorted(vertices):
            nb = nbrs(x)
            if len(nb) == 0:
                return 0, nxt
            if len(nb) == 1:
                (y, (_, wt)), = nb.items()
                factor *= wt
                drop(x)
                drop(y)
                changed = True
                break
            if len(nb) == 2:
                (w1, (_, wt1)), (w2, (_, wt2)) = sorted(nb.items())
                z = nxt
                nxt += 1
                merged_m: Counter = Counter()
                merged_w: dict = {}
                for w, scale in ((w1, wt2), (w2, wt1)):
                    for y, (c, wt) in nbrs(w).items():
                        if y in (x, w1, w2):
                            continue
                        merged_m[y] += c
                        merged_w[y] = merged_w.get(y, 0) + wt * scale
                for t in (x, w1, w2):
                    drop(t)
                vertices.add(z)
                for y in merged_m:
                    e = (y, z) if y < z else (z, y)
                    mult[e] = merged_m[y]
                    weight[e] = merged_w[y]
                changed = True
                break
    return factor, nxt


def fc_contract(h: Graph, v: int) -> Contraction:
    """Count the perfect matchings of ``H - v`` for factor-critical ``H``.

    Vertices with two neighbours are merged with both of them: each perfect
    matching uses exactly one of the two edges, and the partner of the
    other neighbour becomes the partner of the merged vertex.  Parallel
    edges carry multiplicities and loops vanish.  What survives has few
    edges and is counted by brute force.
    """
    if not is_factor_critical(h):
        raise NotFactorCritical("H must be factor-critical")
    if v not in h.vertices:
        raise ValueError(f"{v} is not a vertex of H")
    hv = delete_vertices(h, [v])
    vertices = set(hv.vertices)
    mult: Counter = Counter()
    for a, b in hv.simple_edges:
        if a != b:
            mult[(a, b)] += 1
    weight: dict = {e: c for e, c in mult.items()}
    factor, _ = _contract(vertices, mult, weight)
    if not factor:
        return Contraction(0, len(vertices), sum(mult.values()))
    order = sorted(vertices)
    pos = {x: i for i, x in enumerate(order)}
    masks = [0] * len(order)
    pw: dict[tuple[int, int], Number] = {}
    for (a, b), wt in weight.items():
        i, j = sorted((pos[a], pos[b]))
        masks[i] |= 1 << j
        masks[j] |= 1 << i
        pw[(i, j)] = wt
    rest = count_perfect_masks(masks, (1 << len(order)) - 1, pw) if order else 1
    return Contraction(factor * rest, len(order), sum(mult.values()))


def fc_exact_count_minus_v(h: Graph, v: int) -> int:
    return fc_contract(h, v).count


class FcOrderExceeded(ValueError):
    def __init__(self, component: frozenset[int], order: int, k_max: int):
        self.component = component
        self.order = order
        super().__init__(f"factor-critical component {sorted(component)} has order {order} > {k_max}")


def fc_order_of(h: Graph) -> int:
    """Ear count from the degree identity (simple graph), for factor-critical ``h``."""
    return 1 + sum(len(h.adj[x]) - 2 for x in h.vertices) // 2


def fpt_count(g: Graph, eps: float = 0.1, k_max: int = 3, pivot: Pivot | None = None,
              backend: Backend | None = None,
              stats: RecursionStats | None = None) -> CountEstimate:
    """Count perfect matchings when every factor-critical D-component met has
    ear count at most ``k_max``.

    Edges in no perfect matching are removed first, and each connected
    component is handled by one level of the recursion with the ``H - v``
    counts done exactly by contraction.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    pivot = pivot or FirstVertex()
    backend = backend or Ryser()
    stats = stats if stats is not None else RecursionStats()
    if len(g) % 2:
        return CountEstimate(0, None if backend.exact else eps)
    keep = allowed_edges(g)
    if not keep and len(g):
        return CountEstimate(0, None if backend.exact else eps)
    pruned = Graph(g.vertices, tuple(e for e in g.edges if e in keep), dict(g.labels), g.next_id)
    n = len(g)
    total: Number = 1
    for comp in pruned.components():
        h = induced(pruned, comp)
        total *= _fpt_component(h, eps / (2 * n), k_max, pivot, backend, stats)
        if not total:
            break
    return CountEstimate(total, None if backend.exact else eps)


def _fpt_component(h: Graph, e: float, k_max: int, pivot: Pivot, backend: Backend,
                   stats: RecursionStats) -> Number:
    stats.calls += 1
    if len(h) == 0:
        return 1
    u = pivot.choose(h)
    hu = delete_vertices(h, [u])
    ge = gallai_edmonds(hu)
    if len(ge.d_components) != len(ge.A) + 1:
        stats.zero_exits += 1
        return 0
    m: dict[int, Number] = {}
    for comp in ge.d_components:
        hc = induced(hu, comp)
        r = fc_order_of(hc)
        if r > k_max:
            raise FcOrderExceeded(comp, r, k_max)
        stats.max_d_component = max(stats.max_d_component, len(comp))
        for v in sorted(comp):
            m[v] = fc_exact_count_minus_v(hc, v)
    m_c: Number = 1
    if ge.C:
        # only reachable if pruning left C non-empty; count it the same way
        m_c = fpt_count(induced(hu, ge.C), 3 * e, k_max, pivot, backend, stats).value
    b = line10_matrix(h, u, ge, m)
    stats.max_permanent = max(stats.max_permanent, b.size)
    try:
        perm = backend(b, e / 3)
    except PermanentTooLarge as err:
        raise SubInstanceError(h.vertices, b.size, err) from err
    return m_c * perm


def perturbing_backend(sign: int = 1) -> External:
    """Exact permanent scaled by ``(1 + eps)^sign`` for the accuracy it is
    asked for: a worst-case approximate backend for accuracy tests."""

    def fn(b: BipartiteWeighted, eps: float) -> Number:
        return permanent_enum(b) * (1 + Fraction(eps).limit_denominator(10**9)) ** sign

    return External(fn)


def perturbing_subcount(sign: int = 1) -> SubCounter:
    """Exact sub-counts scaled by ``(1 + accuracy)^sign``."""

    def fn(h: Graph, e: float) -> Number:
        return count_perfect(h) * (1 + Fraction(e).limit_denominator(10**9)) ** sign

    return fn


__all__: Sequence[str] = (
    "Backend", "Balanced", "Contraction", "Custom", "Enumeration", "External", "FcOrderExceeded",
    "FirstVertex", "NamedFirst", "Pivot", "RecursionStats", "Ryser", "SubInstanceError",
    "fc_contract", "fc_exact_count_minus_v", "fc_order_of", "fpt_count", "line10_matrix",
    "perturbing_backend", "perturbing_subcount", "recursive_count",
)
