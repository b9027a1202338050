import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pmatch.blossoms import Blossom, enumerate_blossoms, is_blossom, minimum_blossom, rotate
from pmatch.corpus import cycle, random_graph
from pmatch.gadgets import blossom_reduction
from pmatch.graph import GraphError, Matching, build_graph, delete_vertices, holes
from pmatch.structure import maximum_matching

from conftest import graphs

TRIANGLE = build_graph(3, [(0, 1), (1, 2), (0, 2)])


def test_triangle():
    m = Matching.of([(1, 2)])
    found = enumerate_blossoms(TRIANGLE, m, 0)
    assert found.blossoms == [Blossom((0, 1, 2))]
    assert not found.truncated
    assert minimum_blossom(TRIANGLE, m, 0) == Blossom((0, 2, 1))


def test_triangle_rotation():
    m = Matching.of([(1, 2)])
    b = Blossom((0, 1, 2))
    assert rotate(TRIANGLE, m, b, 0) == m
    assert rotate(TRIANGLE, m, b, 1) == Matching.of([(0, 2)])
    assert rotate(TRIANGLE, m, b, 2) == Matching.of([(0, 1)])


def test_even_cycle_has_none():
    g = cycle(6)
    m = Matching.of([(1, 2), (3, 4)])
    assert len(enumerate_blossoms(g, m, 0)) == 0
    assert minimum_blossom(g, m, 0) is None


def test_blossom_identity_ignores_direction_and_start():
    assert Blossom((0, 1, 2, 3, 4)) == Blossom((0, 4, 3, 2, 1))
    assert Blossom((0, 1, 2, 3, 4)).rooted_at(2) == Blossom((0, 1, 2, 3, 4))
    assert Blossom((0, 4, 3, 2, 1)).cycle == (0, 1, 2, 3, 4)
    with pytest.raises(ValueError):
        Blossom((0, 1, 2, 3))


def test_hole_required():
    with pytest.raises(GraphError):
        enumerate_blossoms(TRIANGLE, Matching.of([(0, 1)]), 0)


def test_rotate_rejects_outside_vertex():
    g = build_graph(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    m = Matching.of([(1, 2)])
    with pytest.raises(GraphError):
        rotate(g, m, Blossom((0, 1, 2)), 3)


def test_three_and_five_cycle_prefers_three():
    # hole 0; triangle 0-1-2 and pentagon 0-3-4-5-6
    g = build_graph(7, [(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (4, 5), (5, 6), (0, 6)])
    m = Matching.of([(1, 2), (3, 4), (5, 6)])
    assert [len(b) for b in enumerate_blossoms(g, m, 0)] == [3, 5]
    assert len(minimum_blossom(g, m, 0)) == 3


def test_reduction_two_paths():
    r = blossom_reduction("sabt", [("s", "a"), ("a", "t"), ("s", "b"), ("b", "t")], "s", "t")
    assert len(enumerate_blossoms(r.graph, r.matching, r.w)) == 2


def test_cap_truncates():
    r = blossom_reduction([0, 1], [(0, 1)], 0, 1, ell=3)
    got = enumerate_blossoms(r.graph, r.matching, r.w, cap=5)
    assert got.truncated and len(got) == 5


@st.composite
def instances(draw):
    g = draw(graphs(min_n=3, max_n=9))
    w = draw(st.sampled_from(sorted(g.vertices)))
    m = maximum_matching(delete_vertices(g, [w]))
    return g, m, w


@given(instances())
def test_enumerated_blossoms_are_valid_and_minimum_agrees(inst):
    g, m, w = inst
    found = enumerate_blossoms(g, m, w).blossoms
    for b in found:
        assert is_blossom(g, m, b)
        assert b.hole == w
        assert sum(1 for e in b.edges if e in m) == b.k
    best = minimum_blossom(g, m, w)
    if not found:
        assert best is None
    else:
        assert len(best) == min(len(b) for b in found)


@given(instances())
def test_rotation_properties(inst):
    g, m, w = inst
    for b in enumerate_blossoms(g, m, w, cap=20):
        for v in b.cycle:
            m2 = rotate(g, m, b, v)
            assert len(m2) == len(m)
            assert all(g.has_edge(*e) for e in m2)
            assert holes(g, m2) == (holes(g, m) - {w}) | {v}
            changed = m.pairs ^ m2.pairs
            assert changed <= b.edges
            # the same cycle is a blossom at the new hole; rotating back restores m
            back = b.rooted_at(v)
            assert is_blossom(g, m2, back)
            assert rotate(g, m2, back, w) == m


def _minimality_breaker():
    rng = random.Random(5)
    for _ in range(5000):
        n = rng.choice((5, 7, 9))
        g = random_graph(rng, n, rng.uniform(0.2, 0.5))
        for w in sorted(g.vertices):
            m = maximum_matching(delete_vertices(g, [w]))
            if 2 * len(m) != n - 1:
                continue
            b = minimum_blossom(g, m, w)
            if b is None:
                continue
            for v in b.cycle[1:]:
                m2 = rotate(g, m, b, v)
                if minimum_blossom(g, m2, v) != b:
                    return g, m, w, b, v, m2
    return None


def test_rotation_can_break_minimality():
    found = _minimality_breaker()
    assert found is not None
    g, m, w, b, v, m2 = found
    after = minimum_blossom(g, m2, v)
    assert is_blossom(g, m2, b.rooted_at(v))
    assert len(after) < len(b)
