"""Edge-length counting bounds on how much of ``K_n`` a packing can cover.

A copy of ``G`` in ``K_n`` has total edge length at most ``L``.  Covering
``M`` edges with ``M / |E(G)|`` copies therefore uses total length at most
``M * L / |E(G)|``, while any ``M`` edges of ``K_n`` have total length at
least that of the ``M`` shortest ones.  Since the running average of the
sorted lengths never decreases, the feasible ``M`` form a prefix and the
largest one bounds the coverage.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, Optional

import numba as _nb
import numpy as np

from .errors import ModeError, ParameterError
from .graphs import Cgg

EXACT_MAX_VERTICES = 8
EXACT_MAX_N = 60
# searches no larger than the biggest one allowed by the two limits above
EXACT_MAX_LEAVES = comb(EXACT_MAX_N - 1, EXACT_MAX_VERTICES - 1)


@dataclass(frozen=True)
class LengthProfile:
    n: int
    counts_per_length: Dict[int, int]
    total_length: int

    @property
    def num_edges(self) -> int:
        return sum(self.counts_per_length.values())


def length_profile(n: int) -> LengthProfile:
    """Exact number of ``K_n`` edges of every cyclic length."""
    if n < 3:
        raise ParameterError("length profile needs n >= 3")
    counts = {l: n for l in range(1, (n - 1) // 2 + 1)}
    if n % 2 == 0:
        counts[n // 2] = n // 2
    return LengthProfile(n, counts, sum(l * c for l, c in counts.items()))


def is_plane_cycle(G: Cgg) -> bool:
    k = G.n
    if k < 3 or G.num_edges != k:
        return False
    return all(G.has_edge(i, (i + 1) % k) for i in range(k))


@_nb.njit(cache=True)
def _max_total(p, n, back, rem):
    half = n // 2
    pos = np.zeros(p, np.int64)
    acc = np.zeros(p, np.int64)
    best = -1
    i = 1
    pos[1] = 0
    while i >= 1:
        pos[i] += 1
        if pos[i] > n - (p - i):
            i -= 1
            continue
        s = acc[i - 1]
        for a in range(i):
            if back[i, a]:
                d = pos[i] - pos[a]
                s += d if d <= n - d else n - d
        acc[i] = s
        if s + rem[i] * half <= best:
            continue
        if i == p - 1:
            best = s
            continue
        i += 1
        pos[i] = pos[i - 1]
    return best


def exact_search_size(G: Cgg, n: int) -> int:
    return comb(n - 1, G.n - 1) if G.n >= 1 else 0


def max_copy_total_length(G: Cgg, n: int, mode: str = "auto") -> int:
    """Largest total cyclic edge length of a copy of ``G`` in ``K_n``.

    ``mode="exact"`` searches every placement with vertex 0 at position 0
    (branch and bound); ``mode="cycle-bound"`` returns ``n`` for a plane
    cycle, which is exact once ``n >= 2|V(G)|``.  ``"auto"`` picks exact when
    the search is small enough, else the cycle bound.
    """
    if not isinstance(G, Cgg):
        raise ParameterError("length bounds are defined for cgg patterns")
    p = G.n
    if p > n:
        raise ParameterError(f"pattern on {p} vertices does not fit in K_{n}")
    exact_ok = p <= 2 or (p <= EXACT_MAX_VERTICES and exact_search_size(G, n) <= EXACT_MAX_LEAVES)
    if mode == "auto":
        mode = "exact" if exact_ok else "cycle-bound"
    if mode == "cycle-bound":
        if not is_plane_cycle(G):
            raise ModeError("cycle-bound mode applies to plane cycles only; use exact mode for small cases")
        return n
    if mode != "exact":
        raise ParameterError(f"unknown mode {mode!r}")
    if not exact_ok:
        raise ModeError(
            f"exact search over {exact_search_size(G, n)} placements is too large; "
            "use mode='cycle-bound' for plane cycles"
        )
    if G.num_edges == 0:
        return 0
    if p == 2:
        return n // 2
    back = np.zeros((p, p), dtype=np.bool_)
    for a, b in G.iter_edges():
        back[b, a] = True
    rem = np.array([sum(1 for _, b in G.iter_edges() if b > i) for i in range(p)], dtype=np.int64)
    return int(_max_total(p, n, back, rem))


def shortest_edges_total(n: int, M: int) -> int:
    """Total length of the ``M`` shortest edges of ``K_n`` (odd ``n``)."""
    q, rem = divmod(M, n)
    return n * q * (q + 1) // 2 + rem * (q + 1)


def coverage_upper_bound(G: Cgg, n: int, mode: str = "auto", L: Optional[int] = None) -> Fraction:
    """Largest coverage of ``K_n`` (odd ``n``) compatible with the length budget."""
    if n % 2 == 0:
        raise ParameterError("the coverage bound needs odd n")
    if n < 3:
        raise ParameterError("the coverage bound needs n >= 3")
    E = G.num_edges
    total = comb(n, 2)
    if E == 0:
        return Fraction(1)
    if L is None:
        L = max_copy_total_length(G, n, mode)
    lo, hi = 0, total
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if shortest_edges_total(n, mid) * E <= mid * L:
            lo = mid
        else:
            hi = mid - 1
    return Fraction(lo, total)


def bound_report(G: Cgg, n: int, mode: str = "auto") -> dict:
    p = G.n
    exact_ok = p <= 2 or (p <= EXACT_MAX_VERTICES and exact_search_size(G, n) <= EXACT_MAX_LEAVES)
    used = mode if mode != "auto" else ("exact" if exact_ok else "cycle-bound")
    L = max_copy_total_length(G, n, used)
    b = coverage_upper_bound(G, n, L=L)
    return {"n": n, "L": L, "bound": f"{b.numerator}/{b.denominator}", "mode": used}
