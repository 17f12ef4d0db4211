import warnings
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from cggpack.errors import PreconditionError
from cggpack.graphs import Cgg, IntervalPartition, blowup, cyclic_chromatic_number
from cggpack.hypergraph import (
    CopyHypergraph,
    build_copy_hypergraph,
    check_fractional_packing,
    default_delta_max,
    nibble_matching,
)
from cggpack.lp import compressed_matrix, fractional_packing_from_solution, solve_feasibility
from cggpack.weighted import RotationClass, WeightedCgg

K3 = Cgg.complete_graph(3)


def k9_phi():
    M = compressed_matrix(WeightedCgg.unit(3), 9)
    x = {RotationClass(g): Fraction(1, 3) for g in [(1, 1, 7), (2, 2, 5), (1, 4, 4), (3, 3, 3)]}
    return fractional_packing_from_solution(M, x)


def assert_maximal_matching(hg, m):
    used = np.zeros(hg.num_vertices, dtype=np.int64)
    for e in hg.edges[m.selected]:
        used[e] += 1
    assert used.max(initial=0) <= 1
    free = np.ones(hg.num_edges, dtype=bool)
    free[m.selected] = False
    for e in hg.edges[free]:
        assert used[e].any()


def test_disjoint_edges_all_selected():
    hg = CopyHypergraph.from_edges(12, np.arange(12).reshape(4, 3))
    m = nibble_matching(hg, seed=3)
    assert sorted(m.selected.tolist()) == [0, 1, 2, 3]
    assert m.matched_fraction == 1.0 and m.target_met


def test_star_selects_one():
    hg = CopyHypergraph.from_edges(21, [[0, 2 * i + 1, 2 * i + 2] for i in range(10)])
    for seed in range(5):
        assert nibble_matching(hg, seed=seed).size == 1


def test_matching_is_maximal_and_deterministic():
    rng = np.random.default_rng(0)
    edges = np.array([rng.choice(300, 4, replace=False) for _ in range(2000)])
    hg = CopyHypergraph.from_edges(300, edges)
    a = nibble_matching(hg, seed=11)
    assert_maximal_matching(hg, a)
    assert np.array_equal(a.selected, nibble_matching(hg, seed=11).selected)


def test_near_regular_graph_matching():
    n, d = 2000, 50
    for seed in range(10):
        rng = np.random.default_rng(seed)
        pairs = set()
        for _ in range(d // 2):
            perm = rng.permutation(n)
            for i in range(n):
                a, b = perm[i], perm[(i + 1) % n]
                pairs.add((min(a, b), max(a, b)))
        hg = CopyHypergraph.from_edges(n, sorted(pairs))
        deg = hg.degrees()
        assert deg.min() >= 40
        m = nibble_matching(hg, seed=seed)
        assert_maximal_matching(hg, m)
        assert m.matched_fraction >= 0.9


def test_check_fractional_packing():
    w = WeightedCgg.unit(3)
    phi = k9_phi()
    check_fractional_packing(Cgg.complete_graph(9), w, phi)
    bad = dict(phi)
    bad[(0, 3, 6)] = Fraction(1, 2)
    with pytest.raises(PreconditionError):
        check_fractional_packing(Cgg.complete_graph(9), w, bad)
    with pytest.raises(PreconditionError):
        check_fractional_packing(Cgg.complete_graph(9), w, {(2, 1, 0): 1})


def test_zero_phi_gives_empty():
    part = cyclic_chromatic_number(K3)[1]
    hg = build_copy_hypergraph(Cgg.from_edges(3, []), K3, part, {(0, 1, 2): 0}, 5)
    assert hg.num_edges == 0 and hg.stats["realized_edges"] == 0


def test_small_t_warns_and_is_empty():
    # a 4-cycle split into two parts of two vertices needs t >= 2
    G = Cgg.from_edges(4, [(0, 2), (1, 2), (1, 3), (0, 3)])
    part = IntervalPartition(4, (0, 2))
    host = Cgg.from_edges(2, [(0, 1)])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        hg = build_copy_hypergraph(host, G, part, {(0, 1): Fraction(1, 4)}, 1)
    assert hg.num_edges == 0
    assert any("empty" in str(c.message) for c in caught)


def test_edges_are_valid_copies_and_uniform_prob_is_exact():
    part = cyclic_chromatic_number(K3)[1]
    M = compressed_matrix(WeightedCgg.unit(3), 5)
    phi = fractional_packing_from_solution(M, solve_feasibility(M).x)
    t = 8
    hg = build_copy_hypergraph(Cgg.complete_graph(5), K3, part, phi, t)
    # all weights equal, so every placement is kept: 10 triangles, t^3 per delta,
    # singleton parts make delta irrelevant and the duplicates merge
    assert hg.stats["delta_max"] == default_delta_max(t) == 2
    assert int(Fraction(hg.stats["expected_edges"])) == 2 * 10 * t**3
    assert hg.stats["realized_edges"] == 10 * t**3
    big = blowup(Cgg.complete_graph(5), t)
    for row, e in zip(hg.copies[:200].tolist(), hg.edges[:200]):
        assert all(big.has_edge(*sorted((row[a], row[b]))) for a, b in combinations(range(3), 2))
        assert len(set(e.tolist())) == 3
    m = nibble_matching(hg, seed=0)
    assert_maximal_matching(hg, m)


def test_expected_count_over_seeds():
    part = cyclic_chromatic_number(K3)[1]
    phi = k9_phi()
    t = 6
    counts = [build_copy_hypergraph(Cgg.complete_graph(9), K3, part, phi, t, seed=s).stats for s in range(20)]
    expected = float(Fraction(counts[0]["expected_edges"]))
    realized = np.array([c["realized_edges"] for c in counts])
    # copies fixed by rotation have weight 1 and are always kept; the rest are Bernoulli(1/3)
    sd = np.sqrt(expected * (2 / 3) / 20)
    assert abs(realized.mean() - expected) < 5 * sd
