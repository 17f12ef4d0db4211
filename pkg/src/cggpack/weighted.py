"""Weighted complete cggs, rotation classes and the configurations used as fixtures."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, Mapping, Sequence, Tuple

from .errors import ParameterError, PreconditionError
from .graphs import Cgg, IntervalPartition, cyclic_length


def _pairs(k: int):
    return list(combinations(range(k), 2))


@dataclass(frozen=True)
class WeightedCgg:
    """Complete cgg on ``k`` vertices with nonnegative rational edge weights.

    ``weights`` is aligned with ``itertools.combinations(range(k), 2)``.
    """

    k: int
    weights: Tuple[Fraction, ...]

    def __post_init__(self):
        w = tuple(Fraction(x) for x in self.weights)
        if len(w) != self.k * (self.k - 1) // 2:
            raise ParameterError(f"need {self.k * (self.k - 1) // 2} weights for k={self.k}, got {len(w)}")
        if any(x < 0 for x in w):
            raise ParameterError("edge weights must be nonnegative")
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_edge_map(cls, k: int, weights: Mapping[Tuple[int, int], object]) -> "WeightedCgg":
        w = {}
        for (u, v), x in weights.items():
            key = (min(u, v), max(u, v))
            if key[0] == key[1] or key[1] >= k or key[0] < 0:
                raise ParameterError(f"bad edge {key} for k={k}")
            w[key] = Fraction(x)
        return cls(k, tuple(w.get(e, Fraction(0)) for e in _pairs(k)))

    @classmethod
    def from_lengths(cls, k: int, length_weights: Mapping[int, object]) -> "WeightedCgg":
        """Length-uniform weighted cgg: every length-``l`` edge gets ``length_weights[l]``."""
        top = k // 2
        extra = set(length_weights) - set(range(1, top + 1))
        if extra:
            raise ParameterError(f"lengths {sorted(extra)} do not occur in K_{k}")
        return cls(k, tuple(Fraction(length_weights.get(cyclic_length(v - u, k), 0)) for u, v in _pairs(k)))

    @classmethod
    def unit(cls, k: int) -> "WeightedCgg":
        return cls(k, (Fraction(1),) * (k * (k - 1) // 2))

    def weight(self, u: int, v: int) -> Fraction:
        if u > v:
            u, v = v, u
        # index of (u, v) in combinations order
        idx = u * (2 * self.k - u - 1) // 2 + (v - u - 1)
        return self.weights[idx]

    def edge_weights(self) -> Dict[Tuple[int, int], Fraction]:
        return dict(zip(_pairs(self.k), self.weights))

    def length(self, u: int, v: int) -> int:
        return cyclic_length(v - u, self.k)

    @property
    def total_weight(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    def is_length_uniform(self) -> bool:
        seen: Dict[int, Fraction] = {}
        for (u, v), w in zip(_pairs(self.k), self.weights):
            l = self.length(u, v)
            if seen.setdefault(l, w) != w:
                return False
        return True

    def length_weights(self) -> Dict[int, Fraction]:
        """``{l: w_l}`` for a length-uniform weighting; raises otherwise."""
        if not self.is_length_uniform():
            raise PreconditionError("weights are not constant per length; call uniformize_by_rotation first")
        out = {}
        for (u, v), w in zip(_pairs(self.k), self.weights):
            out[self.length(u, v)] = w
        return dict(sorted(out.items()))

    def rotate(self, r: int) -> "WeightedCgg":
        """Weighting moved ``r`` steps clockwise: new weight of ``{u+r, v+r}`` is the old ``{u, v}``."""
        k = self.k
        new = {}
        for (u, v), w in zip(_pairs(k), self.weights):
            a, b = (u + r) % k, (v + r) % k
            new[(min(a, b), max(a, b))] = w
        return WeightedCgg(k, tuple(new[e] for e in _pairs(k)))

    def support(self) -> Cgg:
        return Cgg.from_edges(self.k, [e for e, w in zip(_pairs(self.k), self.weights) if w != 0])


def weighted_representation(graph: Cgg, partition: IntervalPartition) -> WeightedCgg:
    """Complete weighted cgg on the parts, weighted by cross-edge counts."""
    if not partition.cyclic or partition.n != graph.n:
        raise PreconditionError("partition must be a cyclic partition of the graph's vertices")
    if not partition.is_valid(graph):
        raise PreconditionError("partition has an edge inside one interval")
    idx = partition.part_index()
    counts: Dict[Tuple[int, int], int] = {}
    for u, v in graph.iter_edges():
        a, b = sorted((idx[u], idx[v]))
        counts[(a, b)] = counts.get((a, b), 0) + 1
    return WeightedCgg.from_edge_map(partition.k, counts)


@dataclass(frozen=True)
class LongEdgeReport:
    k: int
    sizes: Dict[int, int]
    constant: int
    holds: bool


def long_edge_condition(graph: Cgg, partition: IntervalPartition, k: int) -> LongEdgeReport:
    """Sizes of ``E_1..E_k`` for a ``2k``-part partition and the long-edge test with ``C_k = 16k``."""
    if k <= 2:
        raise ParameterError("long-edge condition needs k > 2")
    if partition.k != 2 * k:
        raise ParameterError(f"partition has {partition.k} parts, expected {2 * k}")
    if not partition.is_valid(graph):
        raise PreconditionError("partition has an edge inside one interval")
    idx = partition.part_index()
    sizes = {l: 0 for l in range(1, k + 1)}
    for u, v in graph.iter_edges():
        sizes[partition.pair_length(idx[u], idx[v])] += 1
    ck = 16 * k
    holds = sizes[1] > 0 and sizes[k] >= ck * sum(sizes[l] for l in range(1, k))
    return LongEdgeReport(k, sizes, ck, holds)


def uniformize_by_rotation(w: WeightedCgg):
    """Length-uniform ``W'`` built from the rotations of ``w``, with its packing by ``w``.

    Returns ``(w_prime, packing)`` where ``packing`` maps each distinct rotated
    copy of ``w`` to its multiplicity.  Every rotation gets weight 1, which
    reproduces ``W'`` exactly; the check is done here before returning.
    """
    k = w.k
    totals: Dict[int, Fraction] = {}
    for (u, v), x in zip(_pairs(k), w.weights):
        l = w.length(u, v)
        totals[l] = totals.get(l, Fraction(0)) + x
    if k % 2 == 0 and k >= 2:
        totals[k // 2] = 2 * totals.get(k // 2, Fraction(0))
    w_prime = WeightedCgg.from_lengths(k, totals)
    packing: Dict[WeightedCgg, Fraction] = {}
    for r in range(k):
        rot = w.rotate(r)
        packing[rot] = packing.get(rot, Fraction(0)) + 1
    if not verify_weighted_packing(w_prime, packing):
        raise AssertionError("rotation packing does not reproduce W'")  # pragma: no cover
    return w_prime, packing


def verify_weighted_packing(host: WeightedCgg, packing: Mapping[WeightedCgg, Fraction]) -> bool:
    """Exact check that copies on the host's own vertex set sum to the host weights."""
    acc = [Fraction(0)] * len(host.weights)
    for copy, phi in packing.items():
        if copy.k != host.k or phi < 0:
            return False
        for i, x in enumerate(copy.weights):
            acc[i] += phi * x
    return tuple(acc) == host.weights


def _min_rotation(gaps: Sequence[int]) -> Tuple[int, ...]:
    g = tuple(gaps)
    return min(g[i:] + g[:i] for i in range(len(g)))


@dataclass(frozen=True)
class RotationClass:
    """Rotation class of a ``k``-vertex copy in ``K_m``, stored as its minimal gap vector."""

    gaps: Tuple[int, ...]

    def __post_init__(self):
        g = tuple(int(x) for x in self.gaps)
        if not g or any(x < 1 for x in g):
            raise ParameterError(f"gap vector {g} must be nonempty with positive entries")
        object.__setattr__(self, "gaps", _min_rotation(g))

    @property
    def m(self) -> int:
        return sum(self.gaps)

    @property
    def k(self) -> int:
        return len(self.gaps)

    @property
    def period(self) -> int:
        g = self.gaps
        for p in range(1, self.k + 1):
            if self.k % p == 0 and g[p:] + g[:p] == g:
                return p
        return self.k  # pragma: no cover

    @property
    def stabilizer_order(self) -> int:
        """Number of rotations of ``K_m`` fixing a copy in this class."""
        return self.k // self.period

    @property
    def orbit_size(self) -> int:
        return self.m // self.stabilizer_order

    def positions(self, offset: int = 0) -> Tuple[int, ...]:
        out, p = [], 0
        for g in self.gaps:
            out.append((p + offset) % self.m)
            p += g
        return tuple(out)

    def chord_lengths(self) -> Dict[Tuple[int, int], int]:
        """``K_m`` length of the chord between copy vertices ``i < j``."""
        pos = [0]
        for g in self.gaps[:-1]:
            pos.append(pos[-1] + g)
        return {(i, j): cyclic_length(pos[j] - pos[i], self.m) for i, j in _pairs(self.k)}

    def side_lengths(self) -> Tuple[int, ...]:
        return tuple(cyclic_length(g, self.m) for g in self.gaps)

    def copies(self):
        """All distinct vertex sets in the orbit, as sorted tuples."""
        return sorted({tuple(sorted(self.positions(r))) for r in range(self.orbit_size)})


def _half(m: int) -> int:
    if m % 2 == 0 or m < 3:
        raise ParameterError("host size m must be odd and at least 3")
    return (m - 1) // 2


def figure_configurations(kind: str, m: int, **params) -> RotationClass:
    """Rotation classes of the quadrilateral and hexagon configurations.

    Kinds and parameters (``mh = (m-1)/2`` is the largest length in ``K_m``):

    * ``"S_i"`` (``i``, ``i_max``): sides ``i, i_max-i, i, min(i_max+i, m-i_max-i)``.
    * ``"S'_i"`` (``i``, ``i0``): sides ``i, i0, i, i0+2i``; needs ``i <= mh/4``, ``i0 <= mh/2``.
    * ``"S''_i"`` (``i``, ``i0``): sides ``i, i0, i, i0-2i``; needs ``i <= mh/4``, ``i0 > mh/2``.
    * ``"hexS_i"`` (``i``, ``k``): ``2k`` vertices, sides ``q`` (k-1 times), ``q+r``,
      ``q`` (k-1 times) and the closing side, where ``i = kq + r``; needs ``i >= k``.
    * ``"hexS_ij"`` (``i``, ``j``, ``k``): sides ``j`` (k-1 times), ``i``, ``j`` (k-1 times),
      ``i+(2k-2)j``; needs ``i < k`` and ``j <= mh/(2k)``.
    """
    mh = _half(m)
    if kind == "S_i":
        i, imax = params["i"], params["i_max"]
        if not (1 <= i < imax <= mh):
            raise ParameterError("S_i needs 1 <= i < i_max <= (m-1)/2")
        gaps = (i, imax - i, i, m - imax - i)
    elif kind == "S'_i":
        i, i0 = params["i"], params["i0"]
        if not (1 <= i and 4 * i <= mh and 1 <= i0 and 2 * i0 <= mh):
            raise ParameterError("S'_i needs 1 <= i <= mh/4 and 1 <= i0 <= mh/2")
        gaps = (i, i0, i, m - i0 - 2 * i)
    elif kind == "S''_i":
        i, i0 = params["i"], params["i0"]
        if not (1 <= i and 4 * i <= mh and mh < 2 * i0 and i0 <= mh):
            raise ParameterError("S''_i needs 1 <= i <= mh/4 and mh/2 < i0 <= mh")
        gaps = (i, i0 - 2 * i, i, m - i0)
    elif kind == "hexS_i":
        i, k = params["i"], params["k"]
        if not (k > 2 and k <= i <= mh):
            raise ParameterError("hexS_i needs k > 2 and k <= i <= (m-1)/2")
        q, r = divmod(i, k)
        head = [q] * (k - 1) + [q + r] + [q] * (k - 1)
        gaps = tuple(head) + (m - sum(head),)
    elif kind == "hexS_ij":
        i, j, k = params["i"], params["j"], params["k"]
        if not (k > 2 and 1 <= i < k and 1 <= j and 2 * k * j <= mh and i + (2 * k - 2) * j <= mh):
            raise ParameterError("hexS_ij needs 1 <= i < k, 1 <= j <= mh/(2k), i+(2k-2)j <= mh")
        head = [j] * (k - 1) + [i] + [j] * (k - 1)
        gaps = tuple(head) + (m - sum(head),)
    else:
        raise ParameterError(f"unknown configuration kind {kind!r}")
    return RotationClass(gaps)

