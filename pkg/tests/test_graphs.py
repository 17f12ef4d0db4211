from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cggpack.errors import InvalidEdgeError, ParameterError
from cggpack.graphs import (
    Cgg,
    Embedding,
    IntervalPartition,
    OrderedGraph,
    average_edge_length,
    blowup,
    cyclic_chromatic_number,
    edge_length,
    enumerate_embeddings,
    interval_chromatic_number,
    irregular_blowup_k3,
    irregular_blowup_sizes,
    is_order_preserving,
    ordered_path,
    plane_cycle,
)


def brute_chromatic(G):
    """Smallest valid interval partition by trying every set of cut points."""
    n = G.n
    if G.num_edges == 0:
        return 1
    for k in range(1, n + 1):
        for bps in combinations(range(n), k):
            if not G.cyclic and bps[0] != 0:
                continue
            part = IntervalPartition(n, bps, cyclic=G.cyclic)
            if part.is_valid(G):
                return k
    raise AssertionError("unreachable")


def graphs(cls, max_n=8):
    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_n))
        pairs = list(combinations(range(n), 2))
        chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
        return cls.from_edges(n, chosen)

    return build()


def test_edge_lengths():
    K7 = Cgg.complete_graph(7)
    assert edge_length(K7, (0, 6)) == 1
    assert edge_length(K7, (0, 3)) == 3
    L = OrderedGraph.complete_graph(7)
    assert edge_length(L, (0, 6)) == 6
    with pytest.raises(InvalidEdgeError):
        edge_length(K7, (2, 2))


def test_average_length_enumeration():
    for n in range(3, 30):
        total = sum(min(v - u, n - v + u) for u, v in combinations(range(n), 2))
        assert average_edge_length(n) == Fraction(total, n * (n - 1) // 2)


def test_known_chromatic_numbers():
    assert cyclic_chromatic_number(plane_cycle(5))[0] == 5
    assert cyclic_chromatic_number(plane_cycle(4))[0] == 4
    assert cyclic_chromatic_number(Cgg.complete_graph(3))[0] == 3
    assert cyclic_chromatic_number(Cgg.from_edges(4, []))[0] == 1
    assert interval_chromatic_number(ordered_path(4))[0] == 4
    assert interval_chromatic_number(ordered_path(3))[0] == 3


@settings(max_examples=150, deadline=None)
@given(graphs(Cgg))
def test_cyclic_chromatic_matches_brute_force(G):
    chi, part = cyclic_chromatic_number(G)
    assert chi == brute_chromatic(G)
    assert part.is_valid(G) and part.k == chi


@settings(max_examples=150, deadline=None)
@given(graphs(OrderedGraph))
def test_interval_chromatic_matches_brute_force(G):
    chi, part = interval_chromatic_number(G)
    assert chi == brute_chromatic(G)
    assert part.is_valid(G) and part.k == chi


def test_partition_parts_wrap():
    part = IntervalPartition(6, (1, 4))
    assert part.parts() == [[1, 2, 3], [4, 5, 0]]
    assert part.part_index() == [1, 0, 0, 0, 1, 1]
    with pytest.raises(ParameterError):
        IntervalPartition(5, (2, 1))
    with pytest.raises(ParameterError):
        IntervalPartition(5, (1,), cyclic=False)


def test_order_preservation():
    assert is_order_preserving((3, 4, 0, 1), 5, True)
    assert not is_order_preserving((0, 4, 3, 2, 1), 5, True)  # reflection
    assert not is_order_preserving((1, 0), 5, False)
    assert not is_order_preserving((1, 1, 2), 5, True)


def test_embedding_check_rejects_reflected_cycle():
    C5 = plane_cycle(5)
    K = Cgg.complete_graph(9)
    assert Embedding(K, (0, 2, 4, 6, 8)).check(C5)
    assert not Embedding(K, (8, 6, 4, 2, 0)).check(C5)


def test_enumerate_embeddings_counts():
    K3, K5 = Cgg.complete_graph(3), Cgg.complete_graph(5)
    maps = enumerate_embeddings(K3, K5)
    assert len(maps) == 30  # 10 triangles, 3 rotations each
    assert len(enumerate_embeddings(K3, K5, distinct=True)) == 10
    assert all(e.check(K3) for e in maps)
    assert len(enumerate_embeddings(K3, K5, limit=4)) == 4
    P = ordered_path(3)
    L = OrderedGraph.complete_graph(5)
    assert len(enumerate_embeddings(P, L)) == 10
    assert enumerate_embeddings(plane_cycle(5), plane_cycle(5), distinct=True)[0].vertex_map == (0, 1, 2, 3, 4)


def test_blowups():
    B = blowup(Cgg.complete_graph(3), 4)
    assert B.n == 12 and B.num_edges == 3 * 16
    assert not B.has_edge(0, 3) and B.has_edge(3, 4)
    assert irregular_blowup_sizes(2, 1, 1, 5) == (10, 10, 5)
    K = irregular_blowup_k3(2, 1, 1, 2)
    assert K.n == 10 and K.num_edges == 4 * 4 + 4 * 2 + 4 * 2
    with pytest.raises(ParameterError):
        irregular_blowup_sizes(0, 1, 1, 3)


def test_graph_validation():
    with pytest.raises(InvalidEdgeError):
        Cgg.from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(InvalidEdgeError):
        Cgg.from_edges(3, [(0, 3)])
    G = Cgg.from_edges(4, [(2, 0), (1, 3)])
    assert G.edge_list() == [(0, 2), (1, 3)]
    assert G.edge_ids().tolist() == [2, 7]
    with pytest.raises(ValueError):
        G.edge_ids()[0] = 5
