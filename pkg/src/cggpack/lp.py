"""Compressed matrices over rotation classes and exact feasibility of ``M x = 1``."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ParameterError, PreconditionError
from .graphs import cyclic_length
from .simplex import ColumnSet, check_certificate, check_primal, phase1
from .weighted import RotationClass, WeightedCgg


def _compositions(total: int, parts: int, lo: int = 1) -> np.ndarray:
    """All compositions of ``total`` into ``parts`` parts, each at least ``lo``."""
    if parts == 1:
        return np.array([[total]], dtype=np.int64) if total >= lo else np.zeros((0, 1), dtype=np.int64)
    if parts == 2:
        first = np.arange(lo, total - lo + 1, dtype=np.int64)
        return np.stack([first, total - first], axis=1)
    chunks = []
    for first in range(lo, total - lo * (parts - 1) + 1):
        rest = _compositions(total - first, parts - 1, lo)
        if len(rest):
            chunks.append(np.hstack([np.full((len(rest), 1), first, dtype=np.int64), rest]))
    if not chunks:
        return np.zeros((0, parts), dtype=np.int64)
    return np.vstack(chunks)


def canonical_gap_vectors(k: int, m: int) -> np.ndarray:
    """Lexicographically minimal gap vectors of all ``k``-subsets of ``Z_m`` up to rotation.

    Rows are sorted lexicographically; that order is the column order of the
    compressed matrix.
    """
    if k < 1 or k > m:
        return np.zeros((0, max(k, 1)), dtype=np.int64)
    if k == 1:
        return np.array([[m]], dtype=np.int64)
    chunks = []
    for g0 in range(1, m // k + 1):
        rest = _compositions(m - g0, k - 1, lo=g0)
        if not len(rest):
            continue
        g = np.hstack([np.full((len(rest), 1), g0, dtype=np.int64), rest])
        keep = np.ones(len(g), dtype=bool)
        for s in range(1, k):
            rot = np.roll(g, -s, axis=1)
            diff = rot - g
            nz = diff != 0
            first = np.argmax(nz, axis=1)
            has = nz.any(axis=1)
            sign = diff[np.arange(len(g)), first]
            keep &= ~has | (sign > 0)
        chunks.append(g[keep])
    out = np.vstack(chunks)
    order = np.lexsort(out.T[::-1])
    return out[order]


@dataclass(eq=False)
class CompressedMatrix:
    """Rows are lengths ``1..(m-1)/2`` of ``K_m``; columns are rotation classes.

    Entry ``(l, c)`` is the total weight a copy in class ``c`` puts on
    length-``l`` edges of ``K_m``.  Columns are stored sparsely: for each
    nonzero-weight edge of the pattern, the row it lands in.
    """

    weighted: WeightedCgg
    m: int
    classes: np.ndarray
    edge_pairs: Tuple[Tuple[int, int], ...]
    edge_weights: Tuple[Fraction, ...]
    rows: np.ndarray
    _colset: Optional[ColumnSet] = field(default=None, repr=False)

    @property
    def num_rows(self) -> int:
        return (self.m - 1) // 2

    @property
    def num_cols(self) -> int:
        return len(self.classes)

    def rotation_class(self, c: int) -> RotationClass:
        return RotationClass(tuple(int(g) for g in self.classes[c]))

    def index_of(self, rc: RotationClass) -> int:
        key = np.array(rc.gaps, dtype=np.int64)
        if len(key) != self.classes.shape[1] or int(key.sum()) != self.m:
            raise KeyError(rc)
        lo, hi = 0, self.num_cols
        while lo < hi:  # binary search in lexicographic order
            mid = (lo + hi) // 2
            if tuple(self.classes[mid]) < rc.gaps:
                lo = mid + 1
            else:
                hi = mid
        if lo < self.num_cols and tuple(int(g) for g in self.classes[lo]) == rc.gaps:
            return lo
        raise KeyError(rc)

    def column(self, c: int) -> Dict[int, Fraction]:
        out: Dict[int, Fraction] = {}
        for r, w in zip(self.rows[c].tolist(), self.edge_weights):
            out[r + 1] = out.get(r + 1, Fraction(0)) + w
        return dict(sorted(out.items()))

    def entry(self, length: int, c: int) -> Fraction:
        return self.column(c).get(length, Fraction(0))

    def dense(self) -> list:
        out = [[Fraction(0)] * self.num_cols for _ in range(self.num_rows)]
        for c in range(self.num_cols):
            for l, w in self.column(c).items():
                out[l - 1][c] = w
        return out

    @property
    def scale(self) -> int:
        """Common denominator that makes every entry an integer."""
        den = 1
        for w in self.edge_weights:
            den = den * w.denominator // gcd(den, w.denominator)
        return den

    def column_set(self) -> ColumnSet:
        if self._colset is None:
            L = self.scale
            vals = np.array([int(w * L) for w in self.edge_weights], dtype=np.int64)
            self._colset = ColumnSet(self.num_rows, self.rows, vals)
        return self._colset


def compressed_matrix(w: WeightedCgg, m: int) -> CompressedMatrix:
    """Build ``M`` for a length-uniform ``w`` inside ``K_m`` (``m`` odd)."""
    if m % 2 == 0:
        raise ParameterError("m must be odd: equal-length edges of K_m are then related by a unique rotation")
    if m < 3:
        raise ParameterError("m must be at least 3")
    if w.k > m:
        raise ParameterError(f"pattern has {w.k} vertices, more than m={m}")
    lw = w.length_weights()
    pairs = [(i, j) for i, j in combinations(range(w.k), 2) if lw[cyclic_length(j - i, w.k)] != 0]
    weights = tuple(lw[cyclic_length(j - i, w.k)] for i, j in pairs)
    classes = canonical_gap_vectors(w.k, m)
    prefix = np.zeros((len(classes), w.k), dtype=np.int64)
    if w.k > 1:
        prefix[:, 1:] = np.cumsum(classes[:, :-1], axis=1)
    rows = np.zeros((len(classes), max(len(pairs), 1)), dtype=np.int64)
    for e, (i, j) in enumerate(pairs):
        d = prefix[:, j] - prefix[:, i]
        rows[:, e] = np.minimum(d, m - d) - 1
    if not pairs:
        weights = (Fraction(0),)
    return CompressedMatrix(w, m, classes, tuple(pairs), weights, rows)


@dataclass(frozen=True)
class FeasibilityOutcome:
    """Exactly one of ``x`` (support of a solution) and ``y`` (Farkas vector) is set."""

    feasible: bool
    x: Optional[Dict[int, Fraction]] = None
    y: Optional[Tuple[Fraction, ...]] = None
    m: Optional[int] = None
    classes: Optional[Dict[int, RotationClass]] = None
    pivots: int = 0
    pricing_rounds: int = 0

    def solution_by_class(self) -> Dict[RotationClass, Fraction]:
        if not self.feasible or self.classes is None:
            raise ValueError("no rotation-class solution available")
        return {self.classes[j]: v for j, v in self.x.items()}


def _dense_columns(matrix: Sequence[Sequence[object]]):
    rows = [[Fraction(v) for v in r] for r in matrix]
    den = 1
    for r in rows:
        for v in r:
            den = den * v.denominator // gcd(den, v.denominator)
    ints = [[int(v * den) for v in r] for r in rows]
    return ColumnSet.from_dense(ints), den


def solve_feasibility(matrix: Union[CompressedMatrix, Sequence[Sequence[object]]], rhs: object = 1) -> FeasibilityOutcome:
    """Decide ``{x >= 0 : M x = rhs * 1}`` exactly.

    Returns a nonnegative solution or a Farkas vector ``y`` with
    ``1^T y < 0`` and ``M^T y >= 0``; the returned branch is re-verified in
    exact arithmetic before it is handed back.
    """
    rhs = Fraction(rhs)
    if rhs < 0:
        raise ParameterError("right-hand side must be nonnegative")
    if isinstance(matrix, CompressedMatrix):
        cols, den = matrix.column_set(), matrix.scale
    else:
        cols, den = _dense_columns(matrix)
    n_rows = cols.n_rows
    b_scaled = [rhs * den] * n_rows
    bden = rhs.denominator
    # scale the right-hand side to integers as well; x is unaffected
    cols_b = [int(v * bden) for v in b_scaled]
    if bden != 1:
        cols = ColumnSet(cols.n_rows, cols.rows, np.asarray(cols.vals) * bden)
    res = phase1(cols, cols_b)
    classes = None
    m = None
    if isinstance(matrix, CompressedMatrix):
        m = matrix.m
    if res.feasible:
        if not check_primal(cols, res.x, cols_b):
            raise AssertionError("simplex returned a solution that fails exact verification")
        if isinstance(matrix, CompressedMatrix):
            classes = {j: matrix.rotation_class(j) for j in res.x}
        return FeasibilityOutcome(True, x=res.x, m=m, classes=classes, pivots=res.pivots, pricing_rounds=res.pricing_rounds)
    if not check_certificate(cols, res.y, cols_b):
        raise AssertionError("simplex returned a certificate that fails exact verification")
    return FeasibilityOutcome(False, y=tuple(res.y), m=m, pivots=res.pivots, pricing_rounds=res.pricing_rounds)


def verify_outcome(matrix: Union[CompressedMatrix, Sequence[Sequence[object]]], outcome: FeasibilityOutcome, rhs: object = 1) -> Tuple[bool, bool]:
    """Independent exact check of both branches: ``(primal_ok, certificate_ok)``."""
    dense = matrix.dense() if isinstance(matrix, CompressedMatrix) else [[Fraction(v) for v in r] for r in matrix]
    rhs = Fraction(rhs)
    a = len(dense)
    b = len(dense[0]) if a else 0
    primal_ok = False
    if outcome.x is not None:
        x = [outcome.x.get(j, Fraction(0)) for j in range(b)]
        primal_ok = all(v >= 0 for v in x) and all(
            sum((dense[i][j] * x[j] for j in range(b)), Fraction(0)) == rhs for i in range(a)
        )
    cert_ok = False
    if outcome.y is not None:
        y = outcome.y
        cert_ok = sum(y, Fraction(0)) * rhs < 0 and all(
            sum((dense[i][j] * y[i] for i in range(a)), Fraction(0)) >= 0 for j in range(b)
        )
    return primal_ok, cert_ok


def _solution_vector(matrix: CompressedMatrix, x) -> Dict[int, Fraction]:
    if isinstance(x, Mapping):
        out = {}
        for key, v in x.items():
            j = matrix.index_of(key) if isinstance(key, RotationClass) else int(key)
            out[j] = out.get(j, Fraction(0)) + Fraction(v)
        return out
    return {j: Fraction(v) for j, v in enumerate(x) if Fraction(v) != 0}


def fractional_packing_from_solution(matrix: CompressedMatrix, x, host_weight: object = 1) -> Dict[Tuple[int, ...], Fraction]:
    """Spread a class solution over individual copies of ``W`` in ``K_m``.

    Every copy in class ``c`` gets ``x_c`` times the number of rotations
    fixing it; for classes with trivial stabiliser this is just ``x_c``.  The
    scaling is what makes ``sum_S phi(S) w_S(e)`` equal ``(M x)_l`` when a
    copy is invariant under a nontrivial rotation (possible when
    ``gcd(m, k) > 1``).  Copies are keyed by their sorted vertex tuples and
    the result is checked exactly on every edge of ``K_m``.
    """
    host_weight = Fraction(host_weight)
    xs = _solution_vector(matrix, x)
    if any(v < 0 for v in xs.values()):
        raise PreconditionError("solution has a negative entry")
    acc = [Fraction(0)] * (matrix.num_rows + 1)
    for j, v in xs.items():
        for l, w in matrix.column(j).items():
            acc[l] += w * v
    if any(acc[l] != host_weight for l in range(1, matrix.num_rows + 1)):
        raise PreconditionError("x does not satisfy M x = 1")
    phi: Dict[Tuple[int, ...], Fraction] = {}
    for j, v in sorted(xs.items()):
        if v == 0:
            continue
        rc = matrix.rotation_class(j)
        val = v * rc.stabilizer_order
        for copy in rc.copies():
            phi[copy] = phi.get(copy, Fraction(0)) + val
    if not verify_fractional_packing(matrix.weighted, matrix.m, phi, host_weight):
        raise AssertionError("fractional packing fails the exact per-edge check")  # pragma: no cover
    return phi


def verify_fractional_packing(w: WeightedCgg, m: int, phi: Mapping[Tuple[int, ...], Fraction], host_weight: object = 1) -> bool:
    """Exact per-edge check that copies of length-uniform ``w`` in ``K_m`` sum to ``host_weight``."""
    lw = w.length_weights()
    k = w.k
    acc: Dict[Tuple[int, int], Fraction] = {}
    for copy, val in phi.items():
        if val < 0 or len(copy) != k:
            return False
        for i, j in combinations(range(k), 2):
            wt = lw[cyclic_length(j - i, k)]
            if wt:
                e = (copy[i], copy[j])
                acc[e] = acc.get(e, Fraction(0)) + val * wt
    target = Fraction(host_weight)
    total_edges = m * (m - 1) // 2
    if target == 0:
        return all(v == 0 for v in acc.values())
    return len(acc) == total_edges and all(v == target for v in acc.values())


def _ceil_fraction(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def k4_witness_half(w1, w2) -> int:
    w1, w2 = Fraction(w1), Fraction(w2)
    if w1 <= 0 or w2 <= 0:
        raise ParameterError("both weights must be positive")
    return _ceil_fraction(12 * (w1 + w2) ** 2 / (w1 * w2))


def k4_witness_m(w1, w2) -> int:
    """Odd host size at which the 4-vertex (w1, w2) pattern is fractionally packable."""
    return 2 * k4_witness_half(w1, w2) + 1


@dataclass(frozen=True)
class WitnessReport:
    k: int
    constant: int
    holds: bool
    m_half: Optional[int]
    m: Optional[int]


def kk_witness_m(weights: Sequence[object], k: int) -> WitnessReport:
    """Long-edge witness for a length-uniform pattern on ``2k`` vertices with weights ``w_1..w_k``."""
    if k <= 2:
        raise ParameterError("need k > 2")
    w = [Fraction(v) for v in weights]
    if len(w) != k:
        raise ParameterError(f"expected {k} weights, got {len(w)}")
    if any(v < 0 for v in w):
        raise ParameterError("weights must be nonnegative")
    ck = 16 * k
    holds = w[0] > 0 and w[k - 1] >= ck * sum(w[: k - 1], Fraction(0))
    if not holds:
        return WitnessReport(k, ck, False, None, None)
    half = _ceil_fraction(24 * k**3 * sum(w, Fraction(0)) / w[0])
    return WitnessReport(k, ck, True, half, 2 * half + 1)


def minimal_feasible_m(w: WeightedCgg, m_max: int, m_min: Optional[int] = None):
    """Smallest odd ``m`` in ``[m_min, m_max]`` with ``M x = 1`` feasible.

    Returns ``(m, outcome)`` or ``None`` when every ``m`` up to the cap is
    infeasible.
    """
    start = m_min if m_min is not None else max(3, w.k)
    if start % 2 == 0:
        start += 1
    for m in range(start, m_max + 1, 2):
        out = solve_feasibility(compressed_matrix(w, m))
        if out.feasible:
            return m, out
    return None
