"""Convex geometric graphs, ordered graphs and the interval machinery on them.

Vertices are always the integers ``0..n-1``.  For a :class:`Cgg` they are read
clockwise around a circle, for an :class:`OrderedGraph` left to right.  Rotations
of a cgg are never identified implicitly; operations that care about rotation
classes say so.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import ClassVar, Iterable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InvalidEdgeError, ParameterError

Edge = Tuple[int, int]


def _normalize_edges(n: int, edges: Iterable[Sequence[int]]) -> frozenset:
    seen = set()
    for e in edges:
        if len(e) != 2:
            raise InvalidEdgeError(f"edge {e!r} does not have two endpoints")
        u, v = int(e[0]), int(e[1])
        if u == v:
            raise InvalidEdgeError(f"self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidEdgeError(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise InvalidEdgeError(f"duplicate edge {key}")
        seen.add(key)
    return frozenset(seen)


@dataclass(frozen=True)
class _Graph:
    n: int
    edges: frozenset = field(default_factory=frozenset)
    complete: bool = False

    cyclic: ClassVar[bool] = True
    kind: ClassVar[str] = ""

    def __post_init__(self):
        if self.n < 0:
            raise ParameterError("vertex count must be nonnegative")
        if self.complete:
            if self.edges:
                raise ParameterError("a complete graph is stored without an explicit edge list")
        elif not isinstance(self.edges, frozenset) or any(
            not (isinstance(e, tuple) and len(e) == 2 and 0 <= e[0] < e[1] < self.n) for e in self.edges
        ):
            object.__setattr__(self, "edges", _normalize_edges(self.n, self.edges))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]):
        """Strict constructor: duplicates (in either orientation) are rejected."""
        return cls(n, _normalize_edges(n, edges))

    @classmethod
    def complete_graph(cls, n: int):
        return cls(n, frozenset(), True)

    @property
    def num_edges(self) -> int:
        return comb(self.n, 2) if self.complete else len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        if self.complete:
            return 0 <= u < self.n and 0 <= v < self.n
        return ((u, v) if u < v else (v, u)) in self.edges

    def iter_edges(self) -> Iterator[Edge]:
        if self.complete:
            return combinations(range(self.n), 2)
        return iter(sorted(self.edges))

    def edge_list(self) -> list:
        return list(self.iter_edges())

    @cached_property
    def _ids(self) -> np.ndarray:
        if self.complete:
            iu, iv = np.triu_indices(self.n, 1)
            ids = iu.astype(np.int64) * self.n + iv
        elif not self.edges:
            ids = np.zeros(0, dtype=np.int64)
        else:
            arr = np.array(sorted(self.edges), dtype=np.int64)
            ids = arr[:, 0] * self.n + arr[:, 1]
        ids.setflags(write=False)
        return ids

    def edge_ids(self) -> np.ndarray:
        """Sorted array of ``u*n + v`` (``u < v``) over the edges (read-only, cached)."""
        return self._ids

    def adjacency_matrix(self) -> np.ndarray:
        """Symmetric boolean adjacency matrix (a fresh copy)."""
        if self.complete:
            adj = np.ones((self.n, self.n), dtype=bool)
            np.fill_diagonal(adj, False)
            return adj
        adj = np.zeros((self.n, self.n), dtype=bool)
        ids = self._ids
        u, v = ids // max(self.n, 1), ids % max(self.n, 1)
        adj[u, v] = True
        adj[v, u] = True
        return adj

    def has_edges(self, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        ok = (us != vs) & (us >= 0) & (vs >= 0) & (us < self.n) & (vs < self.n)
        if self.complete:
            return ok
        lo = np.minimum(us, vs)
        hi = np.maximum(us, vs)
        ids = self.edge_ids()
        q = lo * self.n + hi
        pos = np.searchsorted(ids, q)
        pos = np.minimum(pos, max(len(ids) - 1, 0))
        found = ids[pos] == q if len(ids) else np.zeros(len(q), dtype=bool)
        return ok & found

    def neighbors(self, v: int) -> list:
        if self.complete:
            return [u for u in range(self.n) if u != v]
        return sorted({a if b == v else b for a, b in self.edges if v in (a, b)})

    def length(self, u: int, v: int) -> int:
        return edge_length(self, (u, v))


@dataclass(frozen=True)
class Cgg(_Graph):
    """Graph whose vertices ``0..n-1`` sit clockwise on a circle."""

    cyclic: ClassVar[bool] = True
    kind: ClassVar[str] = "cgg"


@dataclass(frozen=True)
class OrderedGraph(_Graph):
    """Graph whose vertices ``0..n-1`` carry the natural linear order."""

    cyclic: ClassVar[bool] = False
    kind: ClassVar[str] = "ordered"


Graph = Union[Cgg, OrderedGraph]


def plane_cycle(k: int) -> Cgg:
    return Cgg.from_edges(k, [(i, (i + 1) % k) for i in range(k)])


def ordered_path(k: int) -> OrderedGraph:
    """Ordered path on ``k`` vertices (``k - 1`` edges)."""
    return OrderedGraph.from_edges(k, [(i, i + 1) for i in range(k - 1)])


def edge_length(host, e: Sequence[int]) -> int:
    """Length of the pair ``e`` in ``host``.

    Cyclic hosts measure around the shorter arc, linear hosts by plain
    distance.  ``e`` need not be an edge of ``host``.
    """
    u, v = int(e[0]), int(e[1])
    n = host.n
    if u == v:
        raise InvalidEdgeError(f"pair ({u}, {v}) has identical endpoints")
    if not (0 <= u < n and 0 <= v < n):
        raise InvalidEdgeError(f"pair ({u}, {v}) is outside [0, {n})")
    d = abs(u - v)
    return min(d, n - d) if host.cyclic else d


def cyclic_length(d: int, n: int) -> int:
    d %= n
    return min(d, n - d)


def average_edge_length(n: int, cyclic: bool = True) -> Fraction:
    """Exact average length over all edges of ``K_n``."""
    if n < 3:
        raise ParameterError("average_edge_length needs n >= 3")
    if cyclic:
        total = sum(cyclic_length(d, n) * n for d in range(1, n)) // 2
    else:
        total = sum(d * (n - d) for d in range(1, n))
    return Fraction(total, comb(n, 2))


@dataclass(frozen=True)
class IntervalPartition:
    """Partition of the vertex circle (or line) into contiguous intervals.

    ``breakpoints`` lists the first vertex of every interval.  On a circle the
    last interval wraps around to the first breakpoint; on a line the first
    breakpoint must be ``0``.
    """

    n: int
    breakpoints: Tuple[int, ...]
    cyclic: bool = True

    def __post_init__(self):
        bp = tuple(int(b) for b in self.breakpoints)
        object.__setattr__(self, "breakpoints", bp)
        if self.n < 1:
            raise ParameterError("partition of an empty vertex set")
        if not bp:
            raise ParameterError("partition needs at least one breakpoint")
        if any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])) or bp[0] < 0 or bp[-1] >= self.n:
            raise ParameterError(f"breakpoints {bp} must be strictly increasing in [0, {self.n})")
        if not self.cyclic and bp[0] != 0:
            raise ParameterError("a linear partition starts at vertex 0")

    @property
    def k(self) -> int:
        return len(self.breakpoints)

    def parts(self) -> list:
        """Vertex lists of the intervals, each in clockwise (or left-right) order."""
        bp = self.breakpoints
        out = []
        for i, b in enumerate(bp):
            if i + 1 < len(bp):
                out.append(list(range(b, bp[i + 1])))
            elif self.cyclic:
                out.append([(b + j) % self.n for j in range((bp[0] - b) % self.n or self.n)])
            else:
                out.append(list(range(b, self.n)))
        return out

    def part_index(self) -> list:
        idx = [0] * self.n
        for i, part in enumerate(self.parts()):
            for v in part:
                idx[v] = i
        return idx

    def pair_length(self, i: int, j: int) -> int:
        """Length of the pair of parts ``{V_i, V_j}`` in the induced order on parts."""
        d = abs(i - j)
        return min(d, self.k - d) if self.cyclic else d

    def is_valid(self, graph) -> bool:
        """True when no edge of ``graph`` lies inside one interval."""
        if graph.n != self.n:
            return False
        idx = self.part_index()
        return all(idx[u] != idx[v] for u, v in graph.iter_edges())


def _greedy_linear_cover(order: Sequence[int], adj: list) -> list:
    """Greedy left-to-right interval cover of ``order``; returns interval starts.

    Each interval is extended while the next vertex has no neighbour inside
    it.  Because every sub-interval of a valid interval is valid, this greedy
    uses the fewest intervals for the given linear order.
    """
    starts = [0]
    current = {order[0]}
    for pos in range(1, len(order)):
        v = order[pos]
        if adj[v] & current:
            starts.append(pos)
            current = {v}
        else:
            current.add(v)
    return starts


def _adjacency(graph) -> list:
    adj = [set() for _ in range(graph.n)]
    for u, v in graph.iter_edges():
        adj[u].add(v)
        adj[v].add(u)
    return adj


def interval_chromatic_number(graph: OrderedGraph) -> Tuple[int, IntervalPartition]:
    """Minimum number of intervals with no edge inside a part, plus a witness."""
    if graph.n == 0:
        raise ParameterError("empty graph")
    starts = _greedy_linear_cover(list(range(graph.n)), _adjacency(graph))
    part = IntervalPartition(graph.n, tuple(starts), cyclic=False)
    return part.k, part


def cyclic_chromatic_number(graph: Cgg) -> Tuple[int, IntervalPartition]:
    """Cyclic chromatic number and a witness partition.

    An optimal partition has a cut somewhere; for each of the ``n`` possible
    cut positions the remaining linear problem is solved exactly by the
    greedy cover, so the minimum over cut positions is exact.  Ties keep the
    smallest first cut.  Edgeless graphs get 1.
    """
    n = graph.n
    if n == 0:
        raise ParameterError("empty graph")
    if graph.num_edges == 0:
        return 1, IntervalPartition(n, (0,), cyclic=True)
    adj = _adjacency(graph)
    best = None
    for s in range(n):
        order = [(s + i) % n for i in range(n)]
        starts = _greedy_linear_cover(order, adj)
        if best is None or len(starts) < len(best):
            best = [order[p] for p in starts]
    part = IntervalPartition(n, tuple(sorted(best)), cyclic=True)
    return part.k, part


def chromatic_number(graph) -> Tuple[int, IntervalPartition]:
    if graph.cyclic:
        return cyclic_chromatic_number(graph)
    return interval_chromatic_number(graph)


@dataclass(frozen=True)
class Embedding:
    """Order-preserving map of a pattern's vertices into ``target``."""

    target: object
    vertex_map: Tuple[int, ...]

    def check(self, pattern) -> bool:
        return is_order_preserving(self.vertex_map, self.target.n, self.target.cyclic) and all(
            self.target.has_edge(self.vertex_map[u], self.vertex_map[v]) for u, v in pattern.iter_edges()
        )


def is_order_preserving(vertex_map: Sequence[int], n: int, cyclic: bool) -> bool:
    """Independent order check: strictly increasing, or cyclically increasing."""
    p = len(vertex_map)
    if len(set(vertex_map)) != p or any(not 0 <= x < n for x in vertex_map):
        return False
    if not cyclic:
        return all(a < b for a, b in zip(vertex_map, vertex_map[1:]))
    if p <= 2:
        return True
    descents = sum(1 for i in range(p) if vertex_map[(i + 1) % p] < vertex_map[i])
    return descents == 1


def enumerate_embeddings(pattern, host, limit: Optional[int] = None, distinct: bool = False) -> list:
    """All order-preserving maps of ``pattern`` into ``host`` carrying edges to edges.

    Maps are counted, not copies: a pattern with rotational symmetry yields
    one map per symmetry for each image.  ``distinct=True`` keeps only the
    first map (in enumeration order) of each image sub-graph.  For cggs,
    pattern vertex 0 is tried at every host vertex in turn and the remaining
    vertices follow clockwise; ordered graphs use increasing maps.
    """
    if pattern.cyclic != host.cyclic:
        raise ParameterError("pattern and host must both be cyclic or both linear")
    p, N = pattern.n, host.n
    out: list = []
    if p == 0 or p > N:
        return out
    back = [[] for _ in range(p)]
    for u, v in pattern.iter_edges():
        back[max(u, v)].append(min(u, v))
    seen = set()
    pedges = pattern.edge_list()

    def emit(img):
        if distinct:
            key = (tuple(sorted(img)), frozenset(tuple(sorted((img[a], img[b]))) for a, b in pedges))
            if key in seen:
                return False
            seen.add(key)
        out.append(Embedding(host, tuple(img)))
        return limit is not None and len(out) >= limit

    img = [0] * p

    def extend(i, lo, base):
        # offsets relative to ``base`` are strictly increasing in [lo, N)
        for off in range(lo, N - (p - 1 - i)):
            v = (base + off) % N if host.cyclic else off
            if all(host.has_edge(v, img[j]) for j in back[i]):
                img[i] = v
                if i + 1 == p:
                    if emit(img):
                        return True
                elif extend(i + 1, off + 1, base):
                    return True
        return False

    if host.cyclic:
        for h0 in range(N):
            img[0] = h0
            if p == 1:
                if emit(img):
                    break
            elif extend(1, 1, h0):
                break
    else:
        extend(0, 0, 0)
    return out


def blowup(graph: Cgg, t: int) -> Cgg:
    """Regular blowup: vertex ``v`` becomes the interval ``[v*t, (v+1)*t)``."""
    if t < 1:
        raise ParameterError("blowup factor must be >= 1")
    edges = set()
    for u, v in graph.iter_edges():
        for a in range(u * t, (u + 1) * t):
            for b in range(v * t, (v + 1) * t):
                edges.add((a, b) if a < b else (b, a))
    return type(graph)(graph.n * t, frozenset(edges))


def irregular_blowup_sizes(e12: int, e13: int, e23: int, t: int) -> Tuple[int, int, int]:
    if min(e12, e13, e23) < 1 or t < 1:
        raise ParameterError("irregular blowup needs positive cross-edge counts and t >= 1")
    return e12 * e13 * t, e12 * e23 * t, e13 * e23 * t


def irregular_blowup_k3(e12: int, e13: int, e23: int, t: int) -> OrderedGraph:
    """Three consecutive intervals, every cross pair an edge, nothing inside."""
    a, b, c = irregular_blowup_sizes(e12, e13, e23, t)
    bounds = [(0, a), (a, a + b), (a + b, a + b + c)]
    edges = set()
    for (s1, f1), (s2, f2) in combinations(bounds, 2):
        for u in range(s1, f1):
            for v in range(s2, f2):
                edges.add((u, v))
    return OrderedGraph(a + b + c, frozenset(edges))
