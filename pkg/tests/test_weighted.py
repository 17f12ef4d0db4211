from fractions import Fraction

import pytest

from cggpack.errors import ParameterError, PreconditionError
from cggpack.graphs import Cgg, IntervalPartition, cyclic_chromatic_number, plane_cycle
from cggpack.weighted import (
    RotationClass,
    WeightedCgg,
    figure_configurations,
    long_edge_condition,
    uniformize_by_rotation,
    verify_weighted_packing,
    weighted_representation,
)


def test_representation_of_plane_cycle():
    C5 = plane_cycle(5)
    _, part = cyclic_chromatic_number(C5)
    w = weighted_representation(C5, part)
    assert w.k == 5
    assert w.length_weights() == {1: 1, 2: 0}


def test_representation_counts_cross_edges():
    # two parts {0,1} and {2,3}; every edge crosses
    G = Cgg.from_edges(4, [(0, 2), (1, 2), (1, 3), (0, 3)])
    w = weighted_representation(G, IntervalPartition(4, (0, 2)))
    assert w.weight(0, 1) == 4
    with pytest.raises(PreconditionError):
        weighted_representation(G, IntervalPartition(4, (0, 1)))


def test_uniformize_nonuniform():
    w = WeightedCgg.from_edge_map(4, {(0, 1): 3, (1, 2): 1, (0, 2): 2})
    assert not w.is_length_uniform()
    wp, packing = uniformize_by_rotation(w)
    assert wp.is_length_uniform()
    assert wp.length_weights() == {1: 4, 2: 4}
    assert sum(packing.values()) == 4
    assert verify_weighted_packing(wp, packing)


def test_uniformize_uniform_scales_by_k():
    w = WeightedCgg.from_lengths(5, {1: 2, 2: Fraction(1, 3)})
    wp, _ = uniformize_by_rotation(w)
    assert wp.weights == tuple(5 * x for x in w.weights)


def test_nonuniform_length_weights_raise():
    w = WeightedCgg.from_edge_map(3, {(0, 1): 1})
    with pytest.raises(PreconditionError):
        w.length_weights()


def test_rotation_class_symmetry():
    rc = RotationClass((2, 1, 2, 1))
    assert rc.gaps == (1, 2, 1, 2)
    assert rc.period == 2 and rc.stabilizer_order == 2 and rc.orbit_size == 3
    assert len(rc.copies()) == 3
    plain = RotationClass((3, 1, 1))
    assert plain.gaps == (1, 1, 3)
    assert plain.orbit_size == 5
    assert plain.chord_lengths() == {(0, 1): 1, (0, 2): 2, (1, 2): 1}
    with pytest.raises(ParameterError):
        RotationClass((0, 3))


def test_figure_configurations():
    m = 31  # largest length 15
    s = figure_configurations("S_i", m, i=2, i_max=15)
    assert s.m == m and sorted(s.side_lengths()) == sorted((2, 13, 2, 14))
    hx = figure_configurations("hexS_i", m, i=7, k=3)
    assert hx.k == 6 and hx.m == m
    hij = figure_configurations("hexS_ij", m, i=2, j=2, k=3)
    assert hij.k == 6 and sorted(hij.gaps)[:4] == [2, 2, 2, 2]
    with pytest.raises(ParameterError):
        figure_configurations("hexS_ij", m, i=3, j=1, k=3)
    with pytest.raises(ParameterError):
        figure_configurations("S_i", 30, i=1, i_max=5)


def test_long_edge_condition():
    # six parts, all edges joining opposite parts except a few short ones
    n = 6 * 40
    part = IntervalPartition(n, tuple(range(0, n, 40)))
    edges = [(a, a + 120) for a in range(120)]
    edges += [(0, 40)]
    G = Cgg.from_edges(n, edges)
    rep = long_edge_condition(G, part, 3)
    assert rep.sizes == {1: 1, 2: 0, 3: 120}
    assert rep.constant == 48 and rep.holds
    G2 = Cgg.from_edges(n, edges + [(1, 41), (2, 42), (3, 43)])
    assert not long_edge_condition(G2, part, 3).holds
