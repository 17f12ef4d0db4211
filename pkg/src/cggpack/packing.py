"""Explicit packings, an independent checker, and the non-hypergraph packers."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Tuple

import numpy as np

from ._kernels import copy_edge_ids, lex_first_greedy, order_ok, pattern_edge_array, scan_placements
from .errors import CompositionError, ParameterError, PreconditionError, VerificationError
from .graphs import Cgg, Embedding, blowup
from .lp import CompressedMatrix, _solution_vector, compressed_matrix
from .weighted import RotationClass, WeightedCgg

_MAX_LISTED = 20


@dataclass(frozen=True, eq=False)
class Packing:
    """Copies of ``pattern`` in ``host``; row ``i`` of ``copies`` is a vertex map.

    Construction does not check anything: use :func:`verify_packing`.
    """

    host: object
    pattern: object
    copies: np.ndarray
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        arr = np.asarray(self.copies)
        if arr.size == 0:
            arr = np.zeros((0, self.pattern.n), dtype=np.int64)
        if arr.dtype.kind not in "iu":
            raise ParameterError("copies must be integer vertex maps")
        arr = arr.reshape(-1, self.pattern.n).view()
        arr.setflags(write=False)
        object.__setattr__(self, "copies", arr)

    @property
    def num_copies(self) -> int:
        return len(self.copies)

    @property
    def covered_edges(self) -> int:
        return self.num_copies * self.pattern.num_edges

    @property
    def coverage(self) -> Fraction:
        total = self.host.num_edges
        return Fraction(self.covered_edges, total) if total else Fraction(0)

    def embeddings(self) -> List[Embedding]:
        return [Embedding(self.host, tuple(row)) for row in self.copies.tolist()]


@dataclass
class VerificationReport:
    num_copies: int
    covered_edges: int
    coverage: Fraction
    claimed_coverage: Fraction
    order_violations: List[int]
    edge_violations: List[int]
    overlaps: List[Tuple[int, int, Tuple[int, int]]]

    @property
    def ok(self) -> bool:
        return (
            not self.order_violations
            and not self.edge_violations
            and not self.overlaps
            and self.coverage == self.claimed_coverage
        )

    def summary(self) -> str:
        if self.ok:
            return f"ok: {self.num_copies} copies, coverage {self.coverage}"
        parts = []
        if self.order_violations:
            parts.append(f"copies not order-preserving: {self.order_violations}")
        if self.edge_violations:
            parts.append(f"copies using non-edges: {self.edge_violations}")
        if self.overlaps:
            pairs = ", ".join(f"{i}&{j} share {e}" for i, j, e in self.overlaps)
            parts.append(f"edge-disjointness broken: {pairs}")
        if self.coverage != self.claimed_coverage:
            parts.append(f"coverage {self.coverage} != claimed {self.claimed_coverage}")
        return "; ".join(parts)


def verify_packing(packing: Packing) -> VerificationReport:
    """Recheck a packing from scratch: order, edge membership, disjointness, coverage."""
    host, pattern = packing.host, packing.pattern
    C = packing.copies
    N = host.n
    if pattern.cyclic != host.cyclic:
        raise ParameterError("pattern and host disagree on cyclic vs linear order")
    good_order = order_ok(C, N, host.cyclic)
    order_bad = np.nonzero(~good_order)[0]
    pe = pattern_edge_array(pattern)
    ids = copy_edge_ids(np.clip(C, 0, max(N - 1, 0)), pe, N)
    if len(pe) and len(C):
        u, v = ids // N, ids % N
        present = host.has_edges(u.ravel(), v.ravel()).reshape(ids.shape).all(axis=1)
    else:
        present = np.ones(len(C), dtype=bool)
    edge_bad = np.nonzero(~present & good_order)[0]
    flat = ids.ravel()
    sorted_ids = np.sort(flat)
    dup = sorted_ids[1:] == sorted_ids[:-1]
    distinct = len(sorted_ids) - int(dup.sum())
    overlaps: List[Tuple[int, int, Tuple[int, int]]] = []
    if dup.any():
        del sorted_ids
        order = np.argsort(flat, kind="stable")
        sid = flat[order]
        where = np.nonzero(sid[1:] == sid[:-1])[0][:_MAX_LISTED]
        E = max(len(pe), 1)
        for w in where.tolist():
            a, b = int(order[w]) // E, int(order[w + 1]) // E
            e = int(sid[w])
            overlaps.append((min(a, b), max(a, b), (e // N, e % N)))
    total = host.num_edges
    coverage = Fraction(distinct, total) if total else Fraction(0)
    return VerificationReport(
        num_copies=len(C),
        covered_edges=distinct,
        coverage=coverage,
        claimed_coverage=packing.coverage,
        order_violations=order_bad[:_MAX_LISTED].tolist(),
        edge_violations=edge_bad[:_MAX_LISTED].tolist(),
        overlaps=overlaps,
    )


def require_valid(packing: Packing) -> VerificationReport:
    report = verify_packing(packing)
    if not report.ok:
        raise VerificationError(report.summary())
    return report


def _shift_tables(pattern):
    """Distinct ways to lay the pattern on a sorted vertex set.

    For a cgg, shift ``s`` sends pattern vertex ``i`` to the ``(i+s) mod p``-th
    smallest chosen host vertex.  Shifts giving the same edge set on positions
    are the same copies and are dropped.
    """
    p = pattern.n
    edges = pattern.edge_list()
    shifts = range(p) if pattern.cyclic and p > 1 else [0]
    seen = set()
    tables = []
    for s in shifts:
        pos = np.array([(i + s) % p for i in range(p)], dtype=np.int64)
        pedges = sorted((min(pos[a], pos[b]), max(pos[a], pos[b])) for a, b in edges)
        key = tuple(pedges)
        if key in seen:
            continue
        seen.add(key)
        tables.append((pos, np.array(pedges, dtype=np.int64).reshape(-1, 2)))
    return tables


def _random_phase(tables, p, N, blocked, rng, batch, stop_rate, out):
    while True:
        draw = np.sort(rng.integers(0, N, size=(batch, p)), axis=1)
        if p > 1:
            draw = draw[(np.diff(draw, axis=1) > 0).all(axis=1)]
        which = rng.integers(0, len(tables), size=len(draw))
        ids = np.empty((len(draw), len(tables[0][1])), dtype=np.int64)
        maps = np.empty_like(draw)
        for t, (pos, pedges) in enumerate(tables):
            sel = which == t
            ids[sel] = draw[sel][:, pedges[:, 0]] * N + draw[sel][:, pedges[:, 1]]
            maps[sel] = draw[sel][:, pos]
        acc = lex_first_greedy(ids, blocked)
        out.append(maps[acc])
        if len(acc) < stop_rate * batch:
            return


def _greedy_once(pattern, host, rng, batch, stop_rate) -> np.ndarray:
    p, N = pattern.n, host.n
    # flat over u*N + v; only entries with u < v are ever consulted
    blocked = (~host.adjacency_matrix()).ravel()
    tables = _shift_tables(pattern)
    out: List[np.ndarray] = []
    if host.complete and N >= 2 * p:
        _random_phase(tables, p, N, blocked, rng, batch, stop_rate, out)
    # one lexicographic pass over all remaining placements leaves the packing
    # maximal: blocked edges are never released, so a rejected placement stays
    # invalid
    subsets, tags = scan_placements(N, tables, blocked, host.num_edges // max(pattern.num_edges, 1))
    for t, (pos, _) in enumerate(tables):
        out.append(subsets[tags == t][:, pos])
    return np.vstack(out) if out else np.zeros((0, p), dtype=np.int64)


def greedy_maximal_packing(
    pattern, host, seed: int = 0, restarts: int = 1, batch: int = 4096, stop_rate: float = 0.02
) -> Packing:
    """Random greedy packing, finished by a systematic pass so the result is maximal.

    Copies are first drawn uniformly at random (rejection sampling against
    used edges) until a batch accepts fewer than ``stop_rate`` of its draws;
    then every remaining placement is scanned once.  With ``restarts > 1``
    the best of several runs is kept, stopping early on a perfect packing.
    """
    if pattern.cyclic != host.cyclic:
        raise ParameterError("pattern and host must both be cyclic or both linear")
    rng = np.random.default_rng(seed)
    E = pattern.num_edges
    if E == 0 or pattern.n > host.n:
        return Packing(host, pattern, np.zeros((0, pattern.n), dtype=np.int64), {"maximal": E > 0, "restarts": 0})
    ceiling = host.num_edges // E
    best = None
    runs = 0
    for _ in range(max(1, restarts)):
        runs += 1
        copies = _greedy_once(pattern, host, rng, batch, stop_rate)
        if best is None or len(copies) > len(best):
            best = copies
        if len(best) >= ceiling:
            break
    return Packing(host, pattern, best, {"maximal": True, "restarts": runs, "seed": seed})


def _support_pattern(w: WeightedCgg) -> Cgg:
    positive = [v for v in w.weights if v > 0]
    if any(v != 1 for v in positive):
        raise PreconditionError("rotation schedules need 0/1 weights (the pattern is the weight-1 support)")
    return w.support()


def _matrix_for(w: WeightedCgg, n: int, matrix: Optional[CompressedMatrix]) -> CompressedMatrix:
    if matrix is not None:
        if matrix.m != n or matrix.weighted != w:
            raise ParameterError("matrix does not match the pattern and host size")
        return matrix
    return compressed_matrix(w, n)


def disjoint_length_design(
    w: WeightedCgg, n: int, seed: int = 0, restarts: int = 5, matrix: Optional[CompressedMatrix] = None
) -> Dict[RotationClass, Fraction]:
    """A 0/1 solution of ``M x <= 1``: rotation classes with pairwise disjoint edge lengths.

    Only classes whose pattern edges all have different ``K_n`` lengths are
    used, so each chosen class contributes all ``n`` rotations without any
    collision.  The search repeatedly takes the uncovered length with the
    fewest usable classes and a random class through it; the best of
    ``restarts`` runs is returned.
    """
    _support_pattern(w)
    M = _matrix_for(w, n, matrix)
    rows = M.rows
    L = M.num_rows
    if rows.shape[1] > 1:
        s = np.sort(rows, axis=1)
        usable = np.nonzero((np.diff(s, axis=1) > 0).all(axis=1))[0]
    else:
        usable = np.arange(M.num_cols)
    rng = np.random.default_rng(seed)
    best: List[int] = []
    big = np.iinfo(np.int64).max
    for _ in range(max(1, restarts)):
        free = np.ones(L, dtype=bool)
        cand = usable
        chosen: List[int] = []
        while True:
            cand = cand[free[rows[cand]].all(axis=1)]
            if not len(cand):
                break
            cnt = np.bincount(rows[cand].ravel(), minlength=L)
            cnt = np.where(free & (cnt > 0), cnt, big)
            length = int(np.argmin(cnt))
            opts = cand[(rows[cand] == length).any(axis=1)]
            c = int(opts[rng.integers(len(opts))])
            chosen.append(c)
            free[rows[c]] = False
        if len(chosen) > len(best):
            best = chosen
        if len(best) * rows.shape[1] > L - rows.shape[1]:
            break
    return {M.rotation_class(c): Fraction(1) for c in sorted(best)}


def rotation_schedule_packing(w: WeightedCgg, x, n: int, matrix: Optional[CompressedMatrix] = None) -> Packing:
    """Integral packing of ``K_n`` from a class solution ``x`` with ``M x <= 1``.

    Classes are taken in column order; class ``c`` receives up to
    ``floor(x_c * n)`` rotation offsets, tried in increasing order and kept
    only if none of their edges is used yet.  Losses from rounding, from
    rejected offsets and from rows with ``(M x)_l < 1`` are reported in
    ``stats``.
    """
    pattern = _support_pattern(w)
    M = _matrix_for(w, n, matrix)
    xs = _solution_vector(M, x)
    if any(v < 0 for v in xs.values()):
        raise PreconditionError("x has a negative entry")
    load = [Fraction(0)] * (M.num_rows + 1)
    for j, v in xs.items():
        for l, wt in M.column(j).items():
            load[l] += wt * v
    over = [l for l in range(1, M.num_rows + 1) if load[l] > 1]
    if over:
        raise PreconditionError(f"M x exceeds 1 at lengths {over[:10]}")
    pe = pattern_edge_array(pattern)
    E = len(pe)
    blocked = np.zeros(n * n, dtype=bool)
    out = []
    per_class = []
    rounding = Fraction(0)
    rejected = 0
    for j in sorted(xs):
        v = xs[j]
        if v == 0:
            continue
        rc = M.rotation_class(j)
        want = min(int(v * n), rc.orbit_size)
        rounding += (v * n - int(v * n)) * E
        base = np.array(rc.positions(0), dtype=np.int64)
        offs = np.arange(rc.orbit_size, dtype=np.int64)
        maps = (base[None, :] + offs[:, None]) % n
        ids = copy_edge_ids(maps, pe, n)
        acc = lex_first_greedy(ids, blocked)
        if len(acc) > want:
            blocked[ids[acc[want:]].ravel()] = False
            acc = acc[:want]
        out.append(maps[acc])
        rejected += want - len(acc)
        per_class.append({"gaps": list(rc.gaps), "x": str(v), "target": want, "placed": int(len(acc))})
    copies = np.vstack(out) if out else np.zeros((0, pattern.n), dtype=np.int64)
    slack = sum((1 - load[l] for l in range(1, M.num_rows + 1)), Fraction(0)) * n
    used_by_length = np.zeros(M.num_rows + 1, dtype=np.int64)
    if len(copies):
        d = np.abs(copies[:, pe[:, 0]] - copies[:, pe[:, 1]])
        np.add.at(used_by_length, np.minimum(d, n - d).ravel(), 1)
    stats = {
        "classes": per_class,
        "rounding_loss_edges": str(rounding),
        "rejected_offset_edges": rejected * E,
        "slack_edges": str(slack),
        "used_edges_by_length": used_by_length[1:].tolist(),
    }
    return Packing(Cgg.complete_graph(n), pattern, copies, stats)


def compose_packings(outer: Packing, inner: Packing, t: Optional[int] = None) -> Packing:
    """Lift ``inner`` (a packing of ``H[t]``) through every copy of ``H`` in ``outer``.

    Host vertex ``h`` of ``K_n`` becomes the interval ``[h*t, (h+1)*t)`` of
    ``K_{n*t}``.  Uncovered edges of the result fall into three disjoint
    groups, reported in ``stats``: pairs inside one interval (not in the
    blowup), blowup edges over outer-uncovered pairs, and edges of used
    ``H[t]`` copies left uncovered by ``inner``.
    """
    H = outer.pattern
    if not (outer.host.complete and outer.host.cyclic == H.cyclic):
        raise CompositionError("outer packing must live in a complete host of the same kind")
    if t is None:
        if H.n == 0 or inner.host.n % H.n:
            raise CompositionError("inner host size is not a multiple of |V(H)|")
        t = inner.host.n // H.n
    expected = blowup(H, t)
    if inner.host.n != expected.n or not np.array_equal(inner.host.edge_ids(), expected.edge_ids()):
        raise CompositionError(f"inner packing is not hosted on the blowup H[{t}]")
    n = outer.host.n
    O = np.asarray(outer.copies, dtype=np.int64)
    I = np.asarray(inner.copies, dtype=np.int64)
    p = inner.pattern.n
    comp = (O[:, I // t] * t + (I % t)[None, :, :]).reshape(-1, p) if len(O) and len(I) else np.zeros((0, p), dtype=np.int64)
    N = n * t
    blown = comb(n, 2) * t * t
    stats = {
        "n_outer": n,
        "t": t,
        "non_blowup_edges": comb(N, 2) - blown,
        "outer_uncovered_edges": (outer.host.num_edges - outer.covered_edges) * t * t,
        "inner_uncovered_edges": outer.num_copies * (expected.num_edges - inner.covered_edges),
    }
    host = type(outer.host).complete_graph(N)
    return Packing(host, inner.pattern, comp, stats)
