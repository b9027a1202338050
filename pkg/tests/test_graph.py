import io

import pytest
from hypothesis import given

from pmatch import edgelist
from pmatch.graph import (PERFECT, GraphError, HolePattern, Matching, NotInOmega, build_graph,
                          delete_vertices, disjoint_union, from_edges, hole_pattern, induced,
                          quotient)

from conftest import graphs


def test_build_rejects_out_of_range_endpoint():
    with pytest.raises(GraphError, match="edge 1"):
        build_graph(3, [(0, 1), (1, 5)])


def test_negative_order_rejected():
    with pytest.raises(GraphError):
        build_graph(-1, [])


def test_multigraph_degree_counts_loops_twice():
    g = build_graph(2, [(0, 1), (0, 1), (1, 1)])
    assert g.degree(0) == 2
    assert g.degree(1) == 4
    assert g.adj[1] == frozenset({0})


def test_labels_resolve():
    g = build_graph(3, [(0, 1)], {0: "a", 2: "c"})
    assert g.vertex("c") == 2
    assert g.label(1) is None
    with pytest.raises(KeyError):
        g.vertex("zz")


def test_delete_unknown_vertex():
    with pytest.raises(GraphError):
        delete_vertices(build_graph(2, [(0, 1)]), [7])


def test_quotient_turns_internal_edges_into_loops():
    g = build_graph(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    q, z = quotient(g, [0, 1, 2], [(0, 1), (1, 2)])
    assert z == 4
    assert sorted(q.edges) == [(3, 4), (4, 4)]
    assert q.next_id == 5


def test_disjoint_union_shifts_ids():
    a = build_graph(2, [(0, 1)], {0: "x"})
    u, mp = disjoint_union(a, a)
    assert len(u) == 4 and len(u.edges) == 2
    assert mp == {0: 2, 1: 3}


def test_from_edges_collects_endpoints():
    g = from_edges([(5, 3)], vertices=[9])
    assert g.vertices == {3, 5, 9}
    assert g.edges == ((3, 5),)


def test_matching_must_be_disjoint():
    with pytest.raises(GraphError):
        Matching.of([(0, 1), (1, 2)])


def test_hole_pattern_rejects_other_hole_counts():
    g = build_graph(4, [(0, 1), (2, 3)])
    assert hole_pattern(g, Matching.of([(0, 1), (2, 3)])) == PERFECT
    assert hole_pattern(g, Matching.of([(0, 1)])) == HolePattern.near(3, 2)
    with pytest.raises(NotInOmega):
        hole_pattern(g, Matching.of([]))
    with pytest.raises(NotInOmega):
        HolePattern((1,))


def test_matching_off_graph_rejected():
    g = build_graph(3, [(0, 1)])
    with pytest.raises(GraphError):
        hole_pattern(g, Matching.of([(1, 2)]))


@given(graphs(multi=True))
def test_edgelist_round_trip(g):
    g = g.relabel({v: f"n{v}" for v in list(g.vertices)[:2]})
    back = edgelist.parse(io.StringIO(edgelist.format_graph(g)))
    assert back == g


@given(graphs())
def test_components_partition_vertices(g):
    comps = g.components()
    assert sorted(v for c in comps for v in c) == sorted(g.vertices)
    for c in comps:
        h = induced(g, c)
        assert len(h.components()) == 1


def test_edgelist_header_mismatch():
    with pytest.raises(GraphError, match="announces"):
        edgelist.parse(["p 2 2", "0 1"])
    with pytest.raises(GraphError, match="header"):
        edgelist.parse(["0 1"])
    with pytest.raises(GraphError, match="line 2"):
        edgelist.parse(["p 2 1", "0 x"])


def test_digraph_keeps_direction():
    vs, arcs = edgelist.parse_digraph(["p 3 2", "2 0", "0 1"])
    assert vs == [0, 1, 2] and arcs == [(2, 0), (0, 1)]
    with pytest.raises(GraphError):
        edgelist.parse_digraph(["p 2 1", "0 4"])
