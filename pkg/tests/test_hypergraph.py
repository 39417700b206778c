import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperlagrange import hypergraph as hg
from hyperlagrange.hypergraph import HypergraphError, ParseError, make_hypergraph


def graphs(max_n=7, rs=(2, 3, 4)):
    @st.composite
    def build(draw):
        r = draw(st.sampled_from(rs))
        n = draw(st.integers(r, max(r, max_n)))
        cands = list(itertools.combinations(range(1, n + 1), r))
        keep = draw(st.lists(st.booleans(), min_size=len(cands), max_size=len(cands)))
        return make_hypergraph(n, r, [e for e, k in zip(cands, keep) if k])

    return build()


K4 = hg.complete(4, 3)


def test_make_k4():
    G = make_hypergraph(4, 3, [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)])
    assert G.m == 4 and G == K4


def test_make_k4_plus_edge():
    F = make_hypergraph(7, 3, [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4), (5, 6, 7)])
    assert F == hg.k4_plus_edge()


def test_edges_canonical_and_deduplicated():
    G = make_hypergraph(4, 3, [(3, 2, 1), (1, 2, 3), (4, 1, 2)])
    assert G.edges == ((1, 2, 3), (1, 2, 4))


@pytest.mark.parametrize(
    "edges, word",
    [([(1, 1, 2)], "repeats"), ([(1, 2, 9)], "outside"), ([(1, 2)], "vertices")],
)
def test_make_rejects(edges, word):
    with pytest.raises(HypergraphError) as info:
        make_hypergraph(3, 3, edges)
    assert word in str(info.value)
    assert info.value.edge is not None


def test_b2_six_by_inclusion_exclusion():
    G = hg.b2(6)
    assert G.n == 6 and G.m == comb(6, 3) - comb(4, 3) == 16
    assert all({1, 2} & set(e) for e in G.edges)


def test_x2_structure():
    G = hg.x_family(2)
    assert (G.n, G.m) == (6, 8)
    for quad in ((1, 2, 3, 4), (1, 2, 5, 6)):
        assert set(itertools.combinations(quad, 3)) <= G.edge_set


def test_colex_first_examples():
    assert hg.colex_first(3, 4) == K4
    assert hg.colex_first(3, 10) == hg.complete(5, 3)
    assert hg.colex_first(3, 5).edges == ((1, 2, 3), (1, 2, 4), (1, 2, 5), (1, 3, 4), (2, 3, 4))
    assert hg.colex_first(2, 3) == hg.complete(3, 2)


def test_colex_against_symmetric_difference_order():
    # independent definition: A < B iff max(A ^ B) lies in B
    import functools

    def cmp(A, B):
        if A == B:
            return 0
        return -1 if max(set(A) ^ set(B)) in B else 1

    for r, n in ((2, 6), (3, 7), (4, 7)):
        order = sorted(itertools.combinations(range(1, n + 1), r), key=functools.cmp_to_key(cmp))
        for m in range(0, comb(n, r) + 1, 3):
            G = hg.colex_first(r, m)
            assert set(G.edges) == set(order[:m])


@pytest.mark.parametrize("t", range(3, 9))
@pytest.mark.parametrize("r", [2, 3, 4])
def test_colex_full_prefix_is_complete(t, r):
    if t < r:
        return
    assert hg.colex_first(r, comb(t, r)) == hg.complete(t, r)


def test_complement_examples():
    assert hg.complement(K4).m == 0 and hg.complement(K4).n == 4
    assert hg.complement(make_hypergraph(5, 3, [])) == hg.complete(5, 3)
    assert hg.complement(hg.complete_minus(5, 3)).m == 1


def test_induced_and_remove():
    assert hg.induced(hg.b2(6), [1, 2, 3, 4]) == K4
    assert hg.remove_vertices(hg.x_family(2), [5, 6]) == K4
    empty = hg.induced(K4, [])
    assert (empty.n, empty.m) == (0, 0)


def test_link_graph_examples():
    L = hg.link_graph(K4, 1)
    assert L.r == 2 and L.edges == ((2, 3), (2, 4), (3, 4))
    # v1 = 1, v2 = 2, u_j = j + 2
    assert hg.link_graph(hg.s2t(3), 1).edges == ((2, 3), (2, 4), (2, 5))
    assert hg.link_graph(make_hypergraph(4, 3, [(1, 2, 3)]), 4).m == 0


def test_covers_pairs_examples():
    assert hg.covers_pairs(K4)
    F = hg.k4_plus_edge()
    assert not hg.covers_pairs(F) and (1, 5) in hg.uncovered_pairs(F)
    assert not hg.covers_pairs(make_hypergraph(2, 2, []))


def test_extension_counts():
    assert hg.extension(K4) == K4
    H = hg.extension(hg.k4_plus_edge())
    assert (H.n, H.m) == (19, 17)
    assert hg.extension(hg.matching(2, 3)).n == 15


def test_extension_labels_are_deterministic():
    H = hg.extension(hg.k4_plus_edge())
    assert (1, 5, 8) in H.edge_set and (4, 7, 19) in H.edge_set


def test_disjoint_union_examples():
    assert hg.disjoint_union(K4, hg.single_edge(3)) == hg.k4_plus_edge()
    assert hg.disjoint_union(K4, make_hypergraph(0, 3, [])) == K4
    assert hg.disjoint_union(hg.single_edge(3), hg.single_edge(3)) == hg.matching(2, 3)
    with pytest.raises(HypergraphError):
        hg.disjoint_union(K4, hg.complete(3, 2))


def test_serialize_format_and_roundtrip():
    assert hg.serialize(K4) == "4 3\n1 2 3\n1 2 4\n1 3 4\n2 3 4\n"
    G = hg.b2(10)
    assert hg.parse(hg.serialize(G)) == G
    assert hg.from_json(hg.to_json(G)) == G


def test_parse_reports_line():
    with pytest.raises(ParseError) as info:
        hg.parse("3 3\n1 2\n")
    assert info.value.line == 2


def test_parse_comments_and_many():
    text = "# a comment\n4 3\n1 2 3\n\n3 3\n# inner\n1 2 3\n"
    gs = hg.parse_many(text)
    assert [g.m for g in gs] == [1, 1]
    assert hg.parse_many(hg.serialize_many([K4, hg.b2(5)])) == [K4, hg.b2(5)]


def test_link_difference_examples():
    assert hg.link_difference(K4, 1, 2) == frozenset()
    S = hg.s2t(2)  # v1 = 1, v2 = 2, u1 = 3, u2 = 4
    assert hg.link_difference(S, 1, 3) == frozenset()
    assert hg.link_difference(S, 3, 1) == frozenset({(2, 4)})
    assert hg.link_difference(make_hypergraph(4, 3, [(1, 2, 3)]), 1, 4) == frozenset()


def test_costars_examples():
    assert hg.costars(K4, 1, 2) == {3, 4}
    assert hg.costars(hg.b2(6), 3, 4) == {1, 2}
    assert hg.costars(hg.k4_plus_edge(), 1, 5) == frozenset()
    with pytest.raises(HypergraphError):
        hg.costars(hg.complete(4, 2), 1, 2)


@pytest.mark.parametrize("n", [7, 9, 11])
def test_h1_h2_match_set_algebra(n):
    B = set(hg.b2(n).edges)
    rest = range(7, n + 1)
    h1 = (B - {(2, i, j) for i, j in itertools.combinations(rest, 2)}) | {(3, 4, 5), (3, 4, 6)}
    assert set(hg.h1(n).edges) == h1
    D = list(range(5, n + 1))
    h2 = (B - {(2, i, j) for i, j in itertools.combinations(D, 2)}) | {(3, 4, i) for i in D}
    assert set(hg.h2(n).edges) == h2
    D2 = [5, 7]
    h2b = (B - {(2, 5, 7)}) | {(3, 4, 5), (3, 4, 7)}
    assert set(hg.h2(n, D2).edges) == h2b


def test_h2_rejects_small_d():
    with pytest.raises(HypergraphError):
        hg.h2(9, [5])
    with pytest.raises(HypergraphError):
        hg.h2(9, [3, 5])


def test_twin_classes_of_b2():
    assert hg.twin_classes(hg.b2(7)) == [[1, 2], [3, 4, 5, 6, 7]]


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_complement_involution_and_count(G):
    C = hg.complement(G)
    assert hg.complement(C) == G
    assert G.m + C.m == comb(G.n, G.r)


@settings(max_examples=60, deadline=None)
@given(graphs(), st.data())
def test_induced_edges_lift(G, data):
    S = sorted(data.draw(st.sets(st.integers(1, G.n))))
    H = hg.induced(G, S)
    assert H.n == len(S)
    for e in H.edges:
        assert tuple(S[v - 1] for v in e) in G.edge_set


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=6, rs=(3,)))
def test_extension_covers_original_pairs(G):
    H = hg.extension(G)
    missing = hg.uncovered_pairs(G)
    assert H.n == G.n + (G.r - 2) * len(missing)
    assert not [p for p in hg.uncovered_pairs(H) if p[1] <= G.n]
    new_sets = [set(e) - set(range(1, G.n + 1)) for e in H.edges if max(e) > G.n]
    assert all(a.isdisjoint(b) for a, b in itertools.combinations(new_sets, 2))
    if hg.covers_pairs(H):
        assert hg.extension(H) == H


@settings(max_examples=40, deadline=None)
@given(graphs())
def test_serialize_roundtrip(G):
    assert hg.parse(hg.serialize(G)) == G


@settings(max_examples=40, deadline=None)
@given(graphs(rs=(3,)), st.data())
def test_twins_are_automorphisms(G, data):
    for cls in hg.twin_classes(G):
        for i, j in itertools.combinations(cls, 2):
            perm = {v: v for v in range(1, G.n + 1)}
            perm[i], perm[j] = j, i
            assert hg.relabel(G, perm) == G


def test_random_hypergraph_reproducible():
    a = hg.random_hypergraph(7, 3, 0.4, np.random.default_rng(5))
    b = hg.random_hypergraph(7, 3, 0.4, np.random.default_rng(5))
    assert a == b
