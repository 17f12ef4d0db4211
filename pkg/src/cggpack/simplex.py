"""Exact phase-1 simplex for ``{x >= 0 : A x = b}`` with Farkas certificates.

The matrix is given column-wise in a padded sparse layout so that very wide
column families (tens of thousands of rotation classes, or more) can be
priced with numpy.  Floating point is used only to *screen* candidate
columns; every pivot decision and every returned object is exact.

Solving is column generation: a restricted master problem (RMP) holds the
columns seen so far and is solved by revised simplex (Dantzig pricing with a
Bland fallback); the pricing pass then scans the full family for columns
with negative reduced cost and adds them.  The RMP only grows, so the loop terminates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence

import numpy as np

try:  # gmpy2 rationals are several times faster than fractions.Fraction
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

_PRICE_BATCH = 64
_DEGENERATE_SWITCH = 50


class ColumnSet:
    """Integer sparse columns: column ``j`` has value ``vals[j, e]`` in row ``rows[j, e]``.

    Padding entries carry value 0.  ``vals`` may be an int64 array or an
    object array of Python ints.
    """

    def __init__(self, n_rows: int, rows: np.ndarray, vals: np.ndarray):
        self.n_rows = n_rows
        self.rows = np.asarray(rows, dtype=np.int64)
        if self.rows.ndim != 2:
            raise ValueError("rows must be 2-D (columns x entries)")
        vals = np.asarray(vals)
        if vals.shape != self.rows.shape:
            vals = np.broadcast_to(vals, self.rows.shape)
        self.vals = vals
        self.fvals = vals.astype(np.float64)
        self.absf = np.abs(self.fvals)

    @property
    def n_cols(self) -> int:
        return self.rows.shape[0]

    def column(self, j: int) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for r, v in zip(self.rows[j].tolist(), self.vals[j].tolist()):
            if v:
                out[r] = out.get(r, 0) + int(v)
        return out

    @classmethod
    def from_dense(cls, matrix: Sequence[Sequence[int]]) -> "ColumnSet":
        a = len(matrix)
        b = len(matrix[0]) if a else 0
        rows = np.tile(np.arange(a, dtype=np.int64), (b, 1))
        vals = np.empty((b, a), dtype=object)
        for i in range(a):
            for j in range(b):
                vals[j, i] = int(matrix[i][j])
        if all(abs(v) < 2**40 for v in vals.flat):
            vals = vals.astype(np.int64)
        return cls(a, rows, vals)


@dataclass
class SimplexResult:
    feasible: bool
    x: Dict[int, Fraction]
    y: Optional[List[Fraction]]
    pivots: int
    pricing_rounds: int


def _to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def primitive_vector(y: Sequence[Fraction]) -> List[Fraction]:
    """Positive multiple of ``y`` with coprime integer entries."""
    den = 1
    for v in y:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in y]
    g = 0
    for v in ints:
        g = gcd(g, v)
    g = g or 1
    return [Fraction(v // g) for v in ints]


class _Phase1:
    def __init__(self, cols: ColumnSet, b: Sequence[int]):
        self.cols = cols
        self.a = cols.n_rows
        self.C = cols.n_cols
        self.b = [int(v) for v in b]
        if any(v < 0 for v in self.b):
            raise ValueError("right-hand side must be nonnegative")
        a = self.a
        self.basis = [self.C + r for r in range(a)]
        self.pos = {v: i for i, v in enumerate(self.basis)}
        self.Binv = [[_Q(1) if i == j else _Q(0) for j in range(a)] for i in range(a)]
        self.xB = [_Q(v) for v in self.b]
        self.pivots = 0
        self._E = cols.rows.shape[1]
        self._maxval = int(np.abs(cols.vals).max(initial=0)) if cols.vals.dtype != object else 0

    def column_exact(self, j: int) -> Dict[int, int]:
        if j >= self.C:
            return {j - self.C: 1}
        return self.cols.column(j)

    def duals(self) -> List:
        a = self.a
        pi = [_Q(0)] * a
        for i, var in enumerate(self.basis):
            if var >= self.C:
                row = self.Binv[i]
                pi = [p + q for p, q in zip(pi, row)]
        return pi

    def reduced_cost(self, j: int, pi) -> object:
        if j >= self.C:
            return 1 - pi[j - self.C]
        s = _Q(0)
        for r, v in self.column_exact(j).items():
            s += v * pi[r]
        return -s

    def _int_duals(self, pi):
        """Duals scaled to int64 by a positive common denominator, or None on overflow."""
        den = 1
        for p in pi:
            d = int(p.denominator)
            den = den * d // gcd(den, d)
        ints = [int(p * den) for p in pi]
        bound = max((abs(v) for v in ints), default=0)
        if self.cols.vals.dtype == object or bound * (self._maxval + 1) * (self._E + 1) >= 2**62:
            return None
        return np.array(ints, dtype=np.int64)

    def reduced_costs(self, idx, pi, pint=None):
        """Reduced costs of columns ``idx``.

        Returns ``(sign_exact, d)``: with ``sign_exact`` the array ``d`` is an
        exact positive multiple of the reduced costs; otherwise ``d`` is a
        float estimate and the caller must confirm signs exactly.
        """
        if pint is not None:
            rows = self.cols.rows[idx]
            vals = self.cols.vals[idx]
            return True, -(vals * pint[rows]).sum(axis=1)
        pf = np.array([float(p) for p in pi], dtype=np.float64)
        if not np.all(np.isfinite(pf)):
            return False, np.full(len(idx), -np.inf)
        rows = self.cols.rows[idx]
        d = -(self.cols.fvals[idx] * pf[rows]).sum(axis=1)
        scale = (self.cols.absf[idx] * np.abs(pf)[rows]).sum(axis=1)
        # anything above the screening band is certainly nonnegative
        return False, np.where(d < 1e-9 * scale + 1e-300, d, np.inf)

    def pivot(self, enter: int) -> bool:
        a = self.a
        col = self.column_exact(enter)
        u = [_Q(0)] * a
        for i in range(a):
            row = self.Binv[i]
            s = _Q(0)
            for r, v in col.items():
                if row[r]:
                    s += row[r] * v
            u[i] = s
        best = None
        for i in range(a):
            if u[i] > 0:
                ratio = self.xB[i] / u[i]
                key = (ratio, self.basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:  # pragma: no cover - phase 1 is bounded below
            raise RuntimeError("unbounded phase-1 problem")
        r = best[1]
        piv = u[r]
        rowr = [v / piv for v in self.Binv[r]]
        xr = self.xB[r] / piv
        self.Binv[r] = rowr
        self.xB[r] = xr
        for i in range(a):
            if i != r and u[i]:
                f = u[i]
                self.Binv[i] = [x - f * y if y else x for x, y in zip(self.Binv[i], rowr)]
                self.xB[i] -= f * xr
        del self.pos[self.basis[r]]
        self.basis[r] = enter
        self.pos[enter] = r
        self.pivots += 1
        return True

    def solve_rmp(self, rmp: np.ndarray):
        """Dantzig's rule over the RMP columns, switching to Bland's rule
        (smallest index) during runs of degenerate pivots; artificials last.

        Cycling needs an unbroken run of degenerate pivots, and Bland's rule
        cannot cycle, so this terminates.
        """
        degenerate = 0
        while True:
            pi = self.duals()
            bland = degenerate >= _DEGENERATE_SWITCH
            enter = None
            if len(rmp):
                nonbasic = np.array([j not in self.pos for j in rmp.tolist()], dtype=bool)
                cand = rmp[nonbasic]
                exact, d = self.reduced_costs(cand, pi, self._int_duals(pi))
                if exact:
                    neg = np.nonzero(d < 0)[0]
                    if len(neg):
                        pick = neg[0] if bland else neg[np.argmin(d[neg])]
                        enter = int(cand[pick])
                else:
                    order = np.nonzero(np.isfinite(d))[0]
                    if not bland:
                        order = order[np.argsort(d[order], kind="stable")]
                    for j in cand[order].tolist():
                        if self.reduced_cost(j, pi) < 0:
                            enter = j
                            break
            if enter is None:
                for r in range(self.a):
                    j = self.C + r
                    if j not in self.pos and 1 - pi[r] < 0:
                        enter = j
                        break
            if enter is None:
                return pi
            before = self._objective()
            self.pivot(enter)
            degenerate = degenerate + 1 if self._objective() == before else 0

    def _objective(self):
        return sum((self.xB[i] for i, v in enumerate(self.basis) if v >= self.C), _Q(0))

    def price(self, pi, in_rmp: np.ndarray, limit: int) -> List[int]:
        """Up to ``limit`` columns outside the RMP with exactly negative reduced cost."""
        pint = self._int_duals(pi)
        found: List[int] = []
        step = 1 << 18
        for s in range(0, self.C, step):
            idx = np.arange(s, min(s + step, self.C))
            exact, d = self.reduced_costs(idx, pi, pint)
            if exact:
                neg = np.nonzero((d < 0) & ~in_rmp[idx])[0]
                neg = neg[np.argsort(d[neg], kind="stable")]
                found.extend((idx[neg[:limit]]).tolist())
            else:
                cand = np.nonzero(np.isfinite(d) & ~in_rmp[idx])[0]
                cand = cand[np.argsort(d[cand], kind="stable")]
                for j in idx[cand].tolist():
                    if self.reduced_cost(j, pi) < 0:
                        found.append(j)
                        if len(found) >= limit:
                            break
        if len(found) > limit:
            # keep the most negative ones across chunks (float ranking is fine here)
            exact, d = self.reduced_costs(np.array(found), pi, pint)
            order = np.argsort(d.astype(np.float64), kind="stable")[:limit]
            found = [found[i] for i in sorted(order.tolist())]
        return found

    def run(self) -> SimplexResult:
        in_rmp = np.zeros(self.C, dtype=bool)
        rmp = np.zeros(0, dtype=np.int64)
        rounds = 0
        while True:
            pi = self.solve_rmp(rmp)
            rounds += 1
            new = self.price(pi, in_rmp, _PRICE_BATCH)
            if not new:
                break
            in_rmp[new] = True
            rmp = np.nonzero(in_rmp)[0]
        if self._objective() == 0:
            x = {}
            for i, var in enumerate(self.basis):
                if var < self.C and self.xB[i] != 0:
                    x[var] = _to_fraction(self.xB[i])
            return SimplexResult(True, dict(sorted(x.items())), None, self.pivots, rounds)
        y = primitive_vector([-_to_fraction(p) for p in pi])
        return SimplexResult(False, {}, y, self.pivots, rounds)


def phase1(cols: ColumnSet, b: Sequence[int]) -> SimplexResult:
    return _Phase1(cols, b).run()


def check_primal(cols: ColumnSet, x: Dict[int, Fraction], b: Sequence[Fraction]) -> bool:
    """Exact check of ``x >= 0`` and ``A x = b``."""
    acc = [Fraction(0)] * cols.n_rows
    for j, v in x.items():
        if v < 0:
            return False
        for r, a in cols.column(j).items():
            acc[r] += a * v
    return acc == [Fraction(v) for v in b]


def check_certificate(cols: ColumnSet, y: Sequence[Fraction], b: Sequence[Fraction]) -> bool:
    """Exact check of ``b^T y < 0`` and ``A^T y >= 0`` over every column."""
    if len(y) != cols.n_rows:
        return False
    if sum(Fraction(bi) * yi for bi, yi in zip(b, y)) >= 0:
        return False
    den = 1
    for v in y:
        den = den * v.denominator // gcd(den, v.denominator)
    Y = [int(v * den) for v in y]
    maxY = max((abs(v) for v in Y), default=0)
    vals = cols.vals
    E = cols.rows.shape[1]
    if vals.dtype != object and maxY * (int(np.abs(vals).max(initial=0)) + 1) * (E + 1) < 2**62:
        Ya = np.array(Y, dtype=np.int64)
        tot = (vals.astype(np.int64) * Ya[cols.rows]).sum(axis=1)
        return bool(np.all(tot >= 0))
    for j in range(cols.n_cols):
        if sum(int(a) * Y[r] for r, a in cols.column(j).items()) < 0:
            return False
    return True
