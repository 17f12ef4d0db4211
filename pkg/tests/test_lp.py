import random
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from cggpack.errors import ParameterError, PreconditionError
from cggpack.graphs import cyclic_length
from cggpack.lp import (
    canonical_gap_vectors,
    compressed_matrix,
    fractional_packing_from_solution,
    k4_witness_m,
    kk_witness_m,
    minimal_feasible_m,
    solve_feasibility,
    verify_fractional_packing,
    verify_outcome,
)
from cggpack.simplex import primitive_vector
from cggpack.weighted import RotationClass, WeightedCgg


def brute_matrix(w, m):
    """Columns keyed by canonical gaps, built from every k-subset of Z_m."""
    lw = w.length_weights()
    cols = {}
    for S in combinations(range(m), w.k):
        gaps = tuple((S[(i + 1) % w.k] - S[i]) % m or m for i in range(w.k))
        rc = RotationClass(gaps)
        if rc.gaps in cols:
            continue
        col = {}
        for i, j in combinations(range(w.k), 2):
            wt = lw[cyclic_length(j - i, w.k)]
            if wt:
                l = cyclic_length(S[j] - S[i], m)
                col[l] = col.get(l, 0) + wt
        cols[rc.gaps] = col
    return cols


@pytest.mark.parametrize("k,m", [(3, 5), (3, 9), (4, 9), (4, 11), (5, 11), (5, 13), (6, 13)])
def test_compressed_matrix_matches_enumeration(k, m):
    rnd = random.Random(k * 100 + m)
    w = WeightedCgg.from_lengths(k, {l: Fraction(rnd.randint(1, 4), rnd.randint(1, 3)) for l in range(1, k // 2 + 1)})
    M = compressed_matrix(w, m)
    oracle = brute_matrix(w, m)
    assert M.num_cols == len(oracle)
    for c in range(M.num_cols):
        got = {l: v for l, v in M.column(c).items() if v}
        want = {l: Fraction(v) for l, v in oracle[M.rotation_class(c).gaps].items() if v}
        assert got == want


def test_canonical_gaps_sorted_and_minimal():
    g = canonical_gap_vectors(4, 12)
    rows = [tuple(r) for r in g.tolist()]
    assert rows == sorted(rows)
    assert all(RotationClass(r).gaps == r for r in rows)
    assert len(set(rows)) == len(rows)


def test_unit_triangle_k5():
    w = WeightedCgg.unit(3)
    M = compressed_matrix(w, 5)
    assert sorted(map(tuple, zip(*M.dense()))) == [(1, 2), (2, 1)]
    out = solve_feasibility(M)
    assert out.feasible
    assert sorted(out.x.values()) == [Fraction(1, 3), Fraction(1, 3)]
    phi = fractional_packing_from_solution(M, out.x)
    assert verify_fractional_packing(w, 5, phi)
    assert verify_outcome(M, out) == (True, False)


def test_index_of_and_errors():
    M = compressed_matrix(WeightedCgg.unit(3), 7)
    for c in range(M.num_cols):
        assert M.index_of(M.rotation_class(c)) == c
    with pytest.raises(KeyError):
        M.index_of(RotationClass((1, 1, 1, 4)))
    with pytest.raises(ParameterError):
        compressed_matrix(WeightedCgg.unit(3), 8)
    with pytest.raises(PreconditionError):
        compressed_matrix(WeightedCgg.from_edge_map(3, {(0, 1): 1}), 7)


def test_wrong_solution_rejected():
    M = compressed_matrix(WeightedCgg.unit(3), 5)
    with pytest.raises(PreconditionError):
        fractional_packing_from_solution(M, [Fraction(1, 2), Fraction(1, 3)])


def test_stabilizer_scaling():
    # in K_9 the class (3,3,3) is fixed by three rotations and has only 3 copies
    w = WeightedCgg.unit(3)
    M = compressed_matrix(w, 9)
    x = {RotationClass(g): Fraction(1, 3) for g in [(1, 1, 7), (2, 2, 5), (1, 4, 4), (3, 3, 3)]}
    load = {}
    for rc, v in x.items():
        for l, wt in M.column(M.index_of(rc)).items():
            load[l] = load.get(l, 0) + wt * v
    assert load == {1: 1, 2: 1, 3: 1, 4: 1}
    phi = fractional_packing_from_solution(M, x)
    assert phi[(0, 3, 6)] == 1
    assert phi[(0, 1, 2)] == Fraction(1, 3)
    assert verify_fractional_packing(w, 9, phi)
    # without the stabiliser factor the length-3 edges would get only 1/3
    halved = dict(phi)
    for c in RotationClass((3, 3, 3)).copies():
        halved[c] = Fraction(1, 3)
    assert not verify_fractional_packing(w, 9, halved)


def test_infeasible_certificate():
    w = WeightedCgg.from_lengths(4, {1: 1, 2: 0})
    M = compressed_matrix(w, 9)
    out = solve_feasibility(M)
    assert not out.feasible
    y = out.y
    assert sum(y) < 0
    for c in range(M.num_cols):
        assert sum(M.entry(l, c) * y[l - 1] for l in range(1, M.num_rows + 1)) >= 0
    assert verify_outcome(M, out) == (False, True)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 5).flatmap(
        lambda r: st.lists(st.lists(st.integers(0, 4), min_size=r, max_size=r), min_size=1, max_size=12)
    )
)
def test_matches_scipy_feasibility(cols):
    A = [list(r) for r in zip(*cols)]
    out = solve_feasibility(A)
    res = linprog(np.zeros(len(cols)), A_eq=np.array(A, float), b_eq=np.ones(len(A)), bounds=(0, None), method="highs")
    assert out.feasible == (res.status == 0)
    assert verify_outcome(A, out) == (out.feasible, not out.feasible)


def test_rhs_scaling():
    A = [[2, 0], [0, 3]]
    out = solve_feasibility(A, rhs=Fraction(1, 2))
    assert out.x == {0: Fraction(1, 4), 1: Fraction(1, 6)}


def test_primitive_vector():
    assert primitive_vector([Fraction(2, 3), Fraction(-4, 3)]) == [1, -2]


def test_witness_formulas():
    assert k4_witness_m(1, 1) == 97
    assert k4_witness_m(2, 1) == 109
    assert k4_witness_m(1, 3) == 2 * 64 + 1
    rep = kk_witness_m([1, 1, 96], 3)
    assert rep.holds and rep.m_half == 63504 and rep.m == 127009
    assert not kk_witness_m([1, 1, 1], 3).holds
    with pytest.raises(ParameterError):
        k4_witness_m(1, 0)


def test_minimal_feasible_small():
    found = minimal_feasible_m(WeightedCgg.unit(3), 15)
    assert found is not None and found[0] == 3
    assert minimal_feasible_m(WeightedCgg.from_lengths(4, {1: 1, 2: 0}), 21) is None
    m, out = minimal_feasible_m(WeightedCgg.from_lengths(4, {1: 1, 2: 1}), 21)
    assert m == 5 and out.feasible
