"""Copy hypergraphs inside blowups and randomized greedy matchings on them."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, log, prod
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from ._kernels import copy_edge_ids, lex_first_greedy, order_ok, pattern_edge_array
from .errors import ParameterError, PreconditionError
from .graphs import IntervalPartition, blowup, is_order_preserving
from .weighted import WeightedCgg, weighted_representation

WCopy = Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class CopyHypergraph:
    """Hyperedges are edge sets of pattern copies; vertices are host edges.

    ``edges[i]`` holds vertex indices in ``0..num_vertices-1``.  When the
    hypergraph comes from a host, ``copies[i]`` is the vertex map behind
    hyperedge ``i``.
    """

    num_vertices: int
    edges: np.ndarray
    copies: Optional[np.ndarray] = None
    host: object = None
    pattern: object = None
    stats: dict = field(default_factory=dict)

    @classmethod
    def from_edges(cls, num_vertices: int, edges) -> "CopyHypergraph":
        arr = np.asarray(edges, dtype=np.int64)
        if arr.ndim != 2:
            raise ParameterError("hyperedges must form a 2-D array")
        if arr.size and (arr.min() < 0 or arr.max() >= num_vertices):
            raise ParameterError("hyperedge vertex out of range")
        return cls(num_vertices, arr)

    @property
    def r(self) -> int:
        return self.edges.shape[1]

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.num_vertices)

    def max_codegree(self) -> int:
        """Largest number of hyperedges through a pair of vertices."""
        if self.r < 2 or not len(self.edges):
            return 0
        s = np.sort(self.edges, axis=1)
        keys = []
        for a in range(self.r):
            for b in range(a + 1, self.r):
                keys.append(s[:, a] * self.num_vertices + s[:, b])
        _, counts = np.unique(np.concatenate(keys), return_counts=True)
        return int(counts.max())


def check_fractional_packing(host, w: WeightedCgg, phi: Mapping[WCopy, object]) -> None:
    """Exact check that ``phi`` on copies of ``w`` in ``host`` reproduces unit weights.

    A copy is a tuple ``f`` sending vertex ``i`` of ``w`` to ``f[i]``; it must
    preserve the cyclic order and put positive weight only on host edges.
    Raises :class:`PreconditionError` otherwise.
    """
    acc: Dict[Tuple[int, int], Fraction] = {}
    for f, val in phi.items():
        val = Fraction(val)
        if val < 0:
            raise PreconditionError(f"negative weight on copy {f}")
        if val == 0:
            continue
        if len(f) != w.k or not is_order_preserving(f, host.n, host.cyclic):
            raise PreconditionError(f"copy {f} is not an order-preserving map of {w.k} vertices")
        for (i, j), wt in w.edge_weights().items():
            if wt == 0:
                continue
            a, b = sorted((f[i], f[j]))
            if not host.has_edge(a, b):
                raise PreconditionError(f"copy {f} puts weight on the non-edge {(a, b)}")
            acc[(a, b)] = acc.get((a, b), Fraction(0)) + val * wt
    bad = [e for e in host.iter_edges() if acc.get(e, Fraction(0)) != 1]
    if bad:
        raise PreconditionError(f"fractional packing misses unit weight on edges {bad[:5]}")


def default_delta_max(t: int) -> int:
    return max(1, int(log(t))) if t > 1 else 1


def build_copy_hypergraph(
    host,
    pattern,
    partition: IntervalPartition,
    phi: Mapping[WCopy, object],
    t: int,
    seed: int = 0,
    delta_max: Optional[int] = None,
    max_candidates: int = 20_000_000,
) -> CopyHypergraph:
    """Random hypergraph of evenly spaced pattern copies in ``host[t]``.

    Part ``V_i`` of the pattern goes into the interval of ``f(i)`` for a
    weighted copy ``f`` with ``phi(f) > 0``, its vertices spaced exactly
    ``delta`` apart, ``1 <= delta <= delta_max`` (default ``max(1, floor(ln t))``).
    Each such copy is kept with probability ``phi(f) / max(phi)``; copies
    with the same edge set are merged.
    """
    if t < 1:
        raise ParameterError("blowup factor must be >= 1")
    w = weighted_representation(pattern, partition)
    check_fractional_packing(host, w, phi)
    big = blowup(host, t)
    pe = pattern_edge_array(pattern)
    r = len(pe)
    empty = CopyHypergraph(big.num_edges, np.zeros((0, r), dtype=np.int64), np.zeros((0, pattern.n), dtype=np.int64), big, pattern)
    support = sorted((f, Fraction(v)) for f, v in phi.items() if Fraction(v) > 0)
    if not support:
        empty.stats.update({"expected_edges": "0", "realized_edges": 0})
        return empty
    Phi = max(v for _, v in support)
    parts = partition.parts()
    sizes = [len(p) for p in parts]
    dmax = delta_max if delta_max is not None else default_delta_max(t)
    rng = np.random.default_rng(seed)
    chunks, deltas = [], []
    expected = Fraction(0)
    per_delta: Dict[int, int] = {}
    for f, val in support:
        prob = val / Phi
        for d in range(1, dmax + 1):
            counts = [t - (s - 1) * d for s in sizes]
            if min(counts) <= 0:
                continue
            total = prod(counts)
            if total > max_candidates:
                raise ParameterError(f"{total} candidate placements exceed max_candidates={max_candidates}")
            expected += prob * total
            if prob == 1:
                idx = np.arange(total)
            else:
                idx = np.nonzero(rng.random(total) < float(prob))[0]
            starts = np.unravel_index(idx, counts)
            maps = np.empty((len(idx), pattern.n), dtype=np.int64)
            for i, part in enumerate(parts):
                for j, v in enumerate(part):
                    maps[:, v] = f[i] * t + starts[i] + j * d
            chunks.append(maps)
            deltas.append(np.full(len(idx), d, dtype=np.int64))
            per_delta[d] = per_delta.get(d, 0) + len(idx)
    if not chunks or not sum(len(c) for c in chunks):
        warnings.warn(f"no evenly spaced placements fit in host[{t}]; hypergraph is empty")
        empty.stats.update({"expected_edges": str(expected), "realized_edges": 0, "warning": "t too small"})
        return empty
    maps = np.vstack(chunks)
    dl = np.concatenate(deltas)
    ids = copy_edge_ids(maps, pe, big.n)
    key = np.sort(ids, axis=1)
    _, first = np.unique(key, axis=0, return_index=True)
    first.sort()
    maps, dl, ids = maps[first], dl[first], ids[first]
    ok = order_ok(maps, big.n, big.cyclic)
    if r:
        ok &= big.has_edges(ids.ravel() // big.n, ids.ravel() % big.n).reshape(ids.shape).all(axis=1)
    if not ok.all():  # pragma: no cover - the construction never produces these
        raise AssertionError("a spaced placement failed the embedding check")
    vertex_ids = big.edge_ids()
    verts = np.searchsorted(vertex_ids, ids)
    hg = CopyHypergraph(big.num_edges, verts, maps, big, pattern)
    deg = hg.degrees()
    hg.stats.update(
        {
            "t": t,
            "delta_max": dmax,
            "Phi": str(Phi),
            "r": r,
            "expected_edges": str(expected),
            "realized_edges": int(len(maps)),
            "per_delta": {str(k): v for k, v in sorted(per_delta.items())},
            "mean_degree": float(deg.mean()) if len(deg) else 0.0,
            "max_degree": int(deg.max()) if len(deg) else 0,
        }
    )
    object.__setattr__(hg, "deltas", dl)
    return hg


@dataclass
class Matching:
    selected: np.ndarray
    num_vertices: int
    r: int
    epsilon: float
    bites: int

    @property
    def size(self) -> int:
        return len(self.selected)

    @property
    def matched_fraction(self) -> float:
        return self.r * self.size / self.num_vertices if self.num_vertices else 0.0

    @property
    def target_met(self) -> bool:
        return self.size >= (1 - self.epsilon) * self.num_vertices / self.r if self.r else True


def nibble_matching(hg: CopyHypergraph, epsilon: float = 0.05, seed: int = 0, beta: float = 0.05) -> Matching:
    """Randomized greedy matching processed in bites of ``beta * |V| / r`` hyperedges.

    Hyperedges are visited in a uniformly random order; within a bite every
    hyperedge still disjoint from all earlier accepted ones is accepted.  The
    result is a maximal matching; ``epsilon`` only sets the reported target
    ``(1 - epsilon) |V| / r``.
    """
    if not 0 <= epsilon < 1:
        raise ParameterError("epsilon must lie in [0, 1)")
    r = hg.r
    E = hg.num_edges
    rng = np.random.default_rng(seed)
    if E == 0 or r == 0:
        return Matching(np.zeros(0, dtype=np.int64), hg.num_vertices, r, epsilon, 0)
    order = rng.permutation(E)
    bite = max(1, ceil(beta * hg.num_vertices / r))
    blocked = np.zeros(hg.num_vertices, dtype=bool)
    chosen = []
    bites = 0
    for s in range(0, E, bite):
        idx = order[s : s + bite]
        acc = lex_first_greedy(hg.edges[idx], blocked)
        chosen.append(idx[acc])
        bites += 1
    sel = np.concatenate(chosen) if chosen else np.zeros(0, dtype=np.int64)
    return Matching(sel, hg.num_vertices, r, epsilon, bites)
