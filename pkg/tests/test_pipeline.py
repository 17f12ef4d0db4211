import numpy as np
import pytest

from cggpack.errors import ParameterError, RouteError
from cggpack.graphs import Cgg, OrderedGraph, ordered_path, plane_cycle
from cggpack.packing import verify_packing
from cggpack.pipeline import default_cutoff, pack_chi_le4, pack_ordered_chi3

TRI = OrderedGraph.from_edges(3, [(0, 1), (0, 2), (1, 2)])
# parts {0} | {1, 2} | {3}: e12 = 2, e13 = 1, e23 = 1
E211 = OrderedGraph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 3)])


def check_levels(rep, e12, e13, e23):
    q = e12 * e13 + e12 * e23 + e13 * e23
    assert rep["q"] == q
    for lev in rep["levels"]:
        np_ = lev["size"] // q
        assert lev["n_prime"] == np_
        assert lev["sizes"] == [e12 * e13 * np_, e12 * e23 * np_, e13 * e23 * np_]
        assert lev["I4"] == lev["size"] - q * np_ < q


def test_k3_route():
    P, rep = pack_chi_le4(Cgg.complete_graph(3), 49, seed=0)
    assert rep["route"] == "chi3-triangle" and rep["chi_c"] == 3
    assert verify_packing(P).ok
    assert P.host.n == 49


def test_c4_route():
    P, rep = pack_chi_le4(plane_cycle(4), 45, seed=0)
    assert rep["route"] == "chi4-c4"
    assert rep["W_prime_lengths"]["2"] == "0/1"
    assert verify_packing(P).ok and P.num_copies > 0


def test_c4_with_diagonal_route():
    G = Cgg.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2), (1, 3)])
    P, rep = pack_chi_le4(G, 30, seed=0, m_cap=9)
    assert rep["route"] == "chi4-km" and rep["m"] == 5
    assert verify_packing(P).ok


def test_c5_rejected():
    with pytest.raises(RouteError, match="long_edge_condition"):
        pack_chi_le4(plane_cycle(5), 101)


def test_bipartite_and_edgeless_routes():
    G = Cgg.from_edges(4, [(0, 1), (2, 3)])  # parts {1, 2} and {3, 0}
    P, rep = pack_chi_le4(G, 15, seed=1)
    assert rep["chi_c"] == 2 and rep["route"] == "greedy"
    assert verify_packing(P).ok
    P, rep = pack_chi_le4(Cgg.from_edges(3, []), 9)
    assert rep["route"] == "edgeless" and P.num_copies == 0


def test_t_too_large_rejected():
    with pytest.raises(ParameterError):
        pack_chi_le4(Cgg.complete_graph(3), 20, t=10)


def test_ordered_triangle_levels():
    P, rep = pack_ordered_chi3(TRI, 300, seed=0)
    assert rep["e"] == [1, 1, 1] and rep["q"] == 3
    check_levels(rep, 1, 1, 1)
    top = rep["levels"][0]
    assert top["sizes"] == [100, 100, 100]
    assert verify_packing(P).ok


def test_ordered_211_levels():
    P, rep = pack_ordered_chi3(E211, 500, seed=0)
    assert rep["e"] == [2, 1, 1] and rep["q"] == 5
    assert rep["cutoff"] == default_cutoff(E211, (2, 1, 1)) == 3 * 4 * 4
    check_levels(rep, 2, 1, 1)
    assert rep["levels"][0]["sizes"] == [200, 200, 100]
    assert verify_packing(P).ok
    losses = rep["losses"]
    total = 500 * 499 // 2
    assert P.covered_edges + sum(losses.values()) == total


def test_ordered_below_cutoff_empty():
    P, rep = pack_ordered_chi3(E211, 40, seed=0)
    assert P.num_copies == 0 and rep["levels"] == []
    assert rep["losses"]["below_cutoff_edges"] == 40 * 39 // 2


def test_ordered_zero_cross_count_rejected():
    # parts {0} | {1} | {2, 3} with no edge between parts 1 and 3
    G = OrderedGraph.from_edges(4, [(0, 1), (1, 2), (1, 3)])
    with pytest.raises(RouteError, match="cross-edge counts"):
        pack_ordered_chi3(G, 200)


def test_ordered_routes():
    with pytest.raises(RouteError):
        pack_ordered_chi3(ordered_path(4), 100)
    P, rep = pack_ordered_chi3(OrderedGraph.from_edges(2, [(0, 1)]), 12)
    assert rep["route"] == "greedy" and P.coverage == 1


def test_ordered_deterministic():
    a, _ = pack_ordered_chi3(E211, 700, seed=4)
    b, _ = pack_ordered_chi3(E211, 700, seed=4)
    assert np.array_equal(a.copies, b.copies)
