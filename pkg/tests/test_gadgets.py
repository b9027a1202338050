import pytest

from pmatch import oracles
from pmatch.exact import count_near, count_omega, count_perfect, iter_omega
from pmatch.gadgets import (blossom_reduction, chain_of_boxes, classify_S, counterexample_graph,
                            torpid_gadget)
from pmatch.graph import GraphError, Matching, NotInOmega, holes, induced


@pytest.mark.parametrize("k", range(1, 9))
def test_boxes_counts(k):
    b = chain_of_boxes(k)
    assert len(b) == 4 * k
    assert count_perfect(b.graph) == 2 ** k
    assert count_near(b.graph, b["v0"], b[f"v{2 * k - 1}"]) == 1


def test_boxes_one_is_a_four_cycle():
    g = chain_of_boxes(1).graph
    assert sorted(g.degree(v) for v in g.vertices) == [2, 2, 2, 2]
    assert len(g.edges) == 4


@pytest.mark.parametrize("k,near_x1v,omega", [(1, 3, 143), (2, 5, 415), (3, 9, 983)])
def test_torpid_gadget(k, near_x1v, omega):
    h = torpid_gadget(k)
    g = h.graph
    assert len(g) == 16 * k + 4
    assert count_perfect(g) == 2
    assert count_near(g, h["u"], h["v"]) == 1
    assert count_near(g, h["x1"], h["v"]) == near_x1v >= 2 ** k
    assert sum(count_omega(g)) == omega


def test_torpid_ring_names():
    h = torpid_gadget(1)
    g = h.graph
    ring = ["a", "x1", "w1", "u", "w2", "x2", "b", "y2", "z2", "v", "z1", "y1"]
    for x, y in zip(ring, ring[1:] + ring[:1]):
        assert g.has_edge(h[x], h[y])
    assert g.has_edge(h["a"], h["b"])
    assert len({h[x] for x in ring}) == 12


def test_torpid_one_matches_oracle():
    g = torpid_gadget(1).graph
    assert count_perfect(g) == len(oracles.perfect_matchings(g))


def test_gadgets_are_deterministic():
    assert counterexample_graph(1).graph == counterexample_graph(1).graph
    assert torpid_gadget(2).named == torpid_gadget(2).named


@pytest.mark.parametrize("fn", [chain_of_boxes, torpid_gadget, counterexample_graph])
def test_k_zero_rejected(fn):
    with pytest.raises(ValueError):
        fn(0)


@pytest.mark.parametrize("k", [1, 2])
def test_counterexample_split(k):
    gk = counterexample_graph(k)
    g = gk.graph
    assert len(g) == 64 * k + 20
    order = g.order
    classes = []
    for pairs in iter_omega(g, holes=0):
        m = Matching.of((order[a], order[b]) for a, b in pairs)
        classes.append(classify_S(gk, m))
    assert len(classes) == 8
    assert classes.count(frozenset({1, 3})) == 4
    assert classes.count(frozenset({2, 4})) == 4


def test_classify_rejects_states_outside_omega():
    gk = counterexample_graph(1)
    with pytest.raises(NotInOmega):
        classify_S(gk, Matching.of([]))


def test_parts_cover_copies():
    gk = counterexample_graph(1)
    sizes = [len(gk.parts[f"H{i}"]) for i in range(1, 5)]
    assert sizes == [20] * 4
    ring = {gk[f"t{i}"] for i in range(1, 5)}
    assert len(gk.graph.vertices - ring) == sum(sizes)


def test_reduction_single_arc():
    r = blossom_reduction(["s", "t"], [("s", "t")], "s", "t")
    g = r.graph
    assert len(g) == 5
    assert holes(g, r.matching) == {r.w}


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_reduction_pairs_have_unique_perfect_matching(ell):
    r = blossom_reduction(["s", "t"], [("s", "t")], "s", "t", ell)
    g = r.graph
    s0, s1 = g.vertex("s_0"), g.vertex("s_1")
    pair = [v for v in g.vertices if g.label(v) and g.label(v).startswith("s")]
    assert count_perfect(induced(g, pair)) == 1
    assert s0 in pair and s1 in pair
    assert len(r.matching) * 2 == len(g) - 1


def test_reduction_errors():
    with pytest.raises(GraphError):
        blossom_reduction([0, 1], [(0, 1)], 0, 0)
    with pytest.raises(GraphError):
        blossom_reduction([0, 1], [(0, 1)], 0, 7)
    with pytest.raises(ValueError):
        blossom_reduction([0, 1], [(0, 1)], 0, 1, ell=-1)


def test_reduction_optional_r():
    r = blossom_reduction([0, 1], [(0, 1)], 0, 1, with_r=True)
    assert r.r is not None and r.graph.degree(r.r) == 0
