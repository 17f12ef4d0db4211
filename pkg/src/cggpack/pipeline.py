"""End-to-end packers: the cyclic route for chi_c <= 4 and the ordered recursion for chi_< = 3."""

from __future__ import annotations

import math
from fractions import Fraction
from math import comb, isqrt
from typing import Dict, List, Optional, Tuple

import numpy as np

from ._kernels import lex_first_greedy, pattern_edge_array
from .errors import CggError, ParameterError, RouteError
from .graphs import Cgg, OrderedGraph, cyclic_chromatic_number, interval_chromatic_number, plane_cycle
from .hypergraph import build_copy_hypergraph, default_delta_max, nibble_matching
from .lp import compressed_matrix, fractional_packing_from_solution, k4_witness_m, minimal_feasible_m
from .packing import (
    Packing,
    compose_packings,
    disjoint_length_design,
    greedy_maximal_packing,
    require_valid,
    rotation_schedule_packing,
)
from .weighted import WeightedCgg, uniformize_by_rotation, weighted_representation


def _frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _empty(host, pattern, **stats) -> Packing:
    return Packing(host, pattern, np.zeros((0, pattern.n), dtype=np.int64), stats)


def _pad(packing: Packing, n: int) -> Packing:
    """Same copies, viewed inside the larger complete host ``K_n``."""
    if packing.host.n == n:
        return packing
    host = type(packing.host).complete_graph(n)
    return Packing(host, packing.pattern, packing.copies, dict(packing.stats))


# --- cyclic route -------------------------------------------------------------


def _rotation_phi(k: int, value: Fraction) -> Dict[Tuple[int, ...], Fraction]:
    return {tuple((i + r) % k for i in range(k)): value for r in range(k)}


def _outer_packing(H: Cgg, n_outer: int, seed: int) -> Tuple[Packing, str]:
    """Best of a rotation design and greedy for packing ``H`` into ``K_{n_outer}``."""
    host = Cgg.complete_graph(n_outer)
    cands = []
    if H.n == n_outer:
        return Packing(host, H, np.arange(H.n, dtype=np.int64)[None, :], {}), "identity"
    if n_outer % 2 == 1 and H.n <= 6:
        w = WeightedCgg.from_edge_map(H.n, {e: 1 for e in H.iter_edges()})
        try:
            M = compressed_matrix(w, n_outer)
            x = disjoint_length_design(w, n_outer, seed=seed, restarts=50, matrix=M)
            cands.append((rotation_schedule_packing(w, x, n_outer, matrix=M), "rotation-design"))
        except CggError:  # the design is optional; greedy below is always available
            pass
    cands.append((greedy_maximal_packing(H, host, seed=seed, restarts=3), "greedy"))
    best = max(cands, key=lambda pc: pc[0].num_copies)
    return best


def _choose_t(n: int, h: int, min_t: int) -> int:
    best = None
    for t in range(min_t, isqrt(n) + 1):
        if n % t == 0 and n // t >= h:
            best = t
    if best is None:
        for t in range(min_t, n // h + 1):
            if n // t >= h:
                best = t
    if best is None:
        raise ParameterError(f"n={n} is too small for a host on {h} vertices blown up by t>={min_t}")
    return best


def pack_chi_le4(
    G: Cgg,
    n: int,
    seed: int = 0,
    t: Optional[int] = None,
    epsilon: float = 0.05,
    m_cap: Optional[int] = None,
    inner_restarts: int = 16,
) -> Tuple[Packing, dict]:
    """Pack a cgg with ``chi_c <= 4`` into ``K_n`` by the blowup route.

    A host ``H`` (``K_3``, the plane ``C_4`` or a complete ``K_m``) carrying a
    perfect fractional packing of the pattern's weighted representation is
    packed into ``K_{n/t}``; evenly spaced copies in ``H[t]`` are matched by
    the nibble (best of ``inner_restarts`` runs); both are composed.  Returns
    the verified packing and a report of every stage.
    """
    if not isinstance(G, Cgg):
        raise ParameterError("pack_chi_le4 takes a cgg")
    if n < 1:
        raise ParameterError("n must be positive")
    chi, part = cyclic_chromatic_number(G)
    report: dict = {"chi_c": chi, "partition": list(part.breakpoints), "n": n, "seed": seed}
    host = Cgg.complete_graph(n)
    if chi > 4:
        raise RouteError(
            f"chi_c = {chi} > 4: no packing route; check long_edge_condition for the long-edge case"
        )
    if G.num_edges == 0:
        report["route"] = "edgeless"
        P = _empty(host, G)
        report["coverage"] = "1/1"
        return P, report
    if chi <= 2:
        report["route"] = "greedy"
        P = greedy_maximal_packing(G, host, seed=seed)
        require_valid(P)
        report["coverage"] = _frac(P.coverage)
        return P, report

    w = weighted_representation(G, part)
    wp, _ = uniformize_by_rotation(w)
    lw = wp.length_weights()
    report["W"] = [_frac(x) for x in w.weights]
    report["W_prime_lengths"] = {str(l): _frac(v) for l, v in sorted(lw.items())}
    if chi == 3:
        report["route"] = "chi3-triangle"
        H = Cgg.complete_graph(3)
        phi = _rotation_phi(3, 1 / lw[1])
    elif lw.get(2, 0) == 0:
        report["route"] = "chi4-c4"
        H = plane_cycle(4)
        phi = _rotation_phi(4, 1 / lw[1])
    else:
        report["route"] = "chi4-km"
        cap = m_cap if m_cap is not None else k4_witness_m(lw[1], lw[2])
        found = minimal_feasible_m(wp, cap)
        if found is None:  # pragma: no cover - the witness m is always feasible
            raise RouteError(f"no feasible K_m up to m={cap}")
        m, outcome = found
        M = compressed_matrix(wp, m)
        phi_p = fractional_packing_from_solution(M, outcome.x)
        phi = {}
        for S, v in phi_p.items():
            for r in range(4):
                f = tuple(S[(u + r) % 4] for u in range(4))
                phi[f] = phi.get(f, Fraction(0)) + v
        H = Cgg.complete_graph(m)
        report["m"] = m
    report["H"] = {"n": H.n, "edges": H.num_edges}

    sizes = [len(p) for p in part.parts()]
    if t is None:
        t = _choose_t(n, H.n, max(sizes))
    n_outer = n // t
    if n_outer < H.n:
        raise ParameterError(f"n // t = {n_outer} is smaller than |V(H)| = {H.n}")
    outer, how = _outer_packing(H, n_outer, seed)
    require_valid(outer)
    report["outer"] = {"n": n_outer, "method": how, "copies": outer.num_copies, "coverage": _frac(outer.coverage)}

    hg = build_copy_hypergraph(H, G, part, phi, t, seed=seed)
    match = None
    perfect = hg.num_vertices // max(hg.r, 1)
    for s in np.random.default_rng(seed).integers(0, 2**31, size=max(1, inner_restarts)).tolist():
        cand = nibble_matching(hg, epsilon=epsilon, seed=s)
        if match is None or cand.size > match.size:
            match = cand
        if match.size >= perfect:
            break
    inner = Packing(hg.host, G, hg.copies[np.sort(match.selected)], {})
    require_valid(inner)
    report["hypergraph"] = hg.stats
    report["nibble"] = {
        "selected": match.size,
        "matched_fraction": round(match.matched_fraction, 6),
        "target_met": match.target_met,
        "bites": match.bites,
    }
    comp = compose_packings(outer, inner, t)
    P = _pad(comp, n)
    require_valid(P)
    losses = dict(comp.stats)
    losses["leftover_vertex_edges"] = comb(n, 2) - comb(n_outer * t, 2)
    report["losses"] = losses
    report["coverage"] = _frac(P.coverage)
    return P, report


# --- ordered recursion --------------------------------------------------------


def _ordered_parts(G: OrderedGraph):
    chi, part = interval_chromatic_number(G)
    return chi, part, part.parts()


def _cross_counts(G: OrderedGraph, parts) -> Tuple[int, int, int]:
    idx = {v: i for i, p in enumerate(parts) for v in p}
    e = {(0, 1): 0, (0, 2): 0, (1, 2): 0}
    for u, v in G.iter_edges():
        a, b = sorted((idx[u], idx[v]))
        e[(a, b)] += 1
    return e[(0, 1)], e[(0, 2)], e[(1, 2)]


def default_cutoff(G: OrderedGraph, e: Tuple[int, int, int]) -> int:
    return 3 * max(e) ** 2 * G.n


def _pack_level(local_edges, part_sizes, starts, sizes, cross, rng, epsilon, budget, chunk, dmax):
    """Random greedy over evenly spaced copies in one irregular blowup.

    ``starts``/``sizes`` give the three intervals (local coordinates).  Returns
    ``(maps, covered, samples)``.
    """
    L = starts[2] + sizes[2]
    blocked = np.zeros(L * L, dtype=bool)
    deltas = []
    weights = []
    for d in range(1, dmax + 1):
        counts = [sizes[i] - (part_sizes[i] - 1) * d for i in range(3)]
        if min(counts) > 0:
            deltas.append(d)
            weights.append(float(np.prod(np.array(counts, dtype=np.float64))))
    if not deltas:
        return np.zeros((0, sum(part_sizes)), dtype=np.int64), 0, 0
    probs = np.array(weights) / sum(weights)
    deltas = np.array(deltas, dtype=np.int64)
    target = (1 - epsilon) * cross
    r = len(local_edges)
    out = []
    covered = 0
    samples = 0
    offs = [np.arange(s, dtype=np.int64) for s in part_sizes]
    while samples < budget and covered < target:
        k = int(min(chunk, budget - samples))
        d = deltas[rng.choice(len(deltas), size=k, p=probs)]
        cols = []
        for i in range(3):
            span = sizes[i] - (part_sizes[i] - 1) * d
            s0 = (rng.random(k) * span).astype(np.int64)
            cols.append(starts[i] + s0[:, None] + d[:, None] * offs[i][None, :])
        maps = np.concatenate(cols, axis=1)
        u = maps[:, local_edges[:, 0]]
        v = maps[:, local_edges[:, 1]]
        acc = lex_first_greedy(u * L + v, blocked)
        out.append(maps[acc])
        covered += len(acc) * r
        samples += k
    maps = np.vstack(out) if out else np.zeros((0, sum(part_sizes)), dtype=np.int64)
    return maps, covered, samples


def pack_ordered_chi3(
    G: OrderedGraph,
    n: int,
    epsilon: float = 0.05,
    seed: int = 0,
    cutoff: Optional[int] = None,
    budget_factor: float = 24.0,
    chunk: int = 1 << 20,
) -> Tuple[Packing, dict]:
    """Recursive packing of an ordered graph with ``chi_< = 3`` into ``K_n``.

    An interval of size ``N`` splits into ``I_1, I_2, I_3, I_4`` with sizes
    ``e12*e13*n'``, ``e12*e23*n'``, ``e13*e23*n'`` and ``N - q*n'`` where
    ``q = e12*e13 + e12*e23 + e13*e23`` and ``n' = N // q``.  The cross edges
    of ``I_1..I_3`` are packed by random greedy over evenly spaced copies
    (sampled, about ``budget_factor * |cross| / |E(G)|`` draws, stopping early
    at a ``1 - epsilon`` fraction); then ``I_1, I_2, I_3`` recurse until their
    size drops below ``cutoff``.
    """
    if not isinstance(G, OrderedGraph):
        raise ParameterError("pack_ordered_chi3 takes an ordered graph")
    if not 0 <= epsilon < 1:
        raise ParameterError("epsilon must lie in [0, 1)")
    chi, part, parts = _ordered_parts(G)
    host = OrderedGraph.complete_graph(n)
    report: dict = {"chi_lt": chi, "partition": list(part.breakpoints), "n": n, "seed": seed}
    if G.num_edges == 0:
        report["route"] = "edgeless"
        report["coverage"] = "1/1"
        return _empty(host, G), report
    if chi <= 2:
        report["route"] = "greedy"
        P = greedy_maximal_packing(G, host, seed=seed)
        require_valid(P)
        report["coverage"] = _frac(P.coverage)
        return P, report
    if chi > 3:
        raise RouteError(f"chi_< = {chi} > 3: the ordered recursion needs three intervals")
    e12, e13, e23 = _cross_counts(G, parts)
    if min(e12, e13, e23) == 0:
        raise RouteError(
            f"cross-edge counts (e12, e13, e23) = {(e12, e13, e23)}: the irregular blowup needs all three positive"
        )
    q = e12 * e13 + e12 * e23 + e13 * e23
    cutoff = cutoff if cutoff is not None else default_cutoff(G, (e12, e13, e23))
    report.update({"route": "ordered-recursion", "e": [e12, e13, e23], "q": q, "cutoff": cutoff})
    part_sizes = [len(p) for p in parts]
    # pattern vertices are parts[0] + parts[1] + parts[2] in order, i.e. 0..p-1
    local_edges = pattern_edge_array(G)
    r = len(local_edges)
    rng = np.random.default_rng(seed)
    levels: List[dict] = []
    out: List[np.ndarray] = []
    i4_edges = below_edges = uncovered = 0
    stack = [(0, n, 0)]
    while stack:
        start, size, depth = stack.pop(0)
        np_ = size // q
        if size < cutoff or np_ < 1:
            below_edges += comb(size, 2)
            continue
        sizes = [e12 * e13 * np_, e12 * e23 * np_, e13 * e23 * np_]
        rest = size - sum(sizes)
        i4_edges += comb(size, 2) - comb(size - rest, 2)
        starts = [0, sizes[0], sizes[0] + sizes[1]]
        cross = sizes[0] * sizes[1] + sizes[0] * sizes[2] + sizes[1] * sizes[2]
        budget = int(math.ceil(budget_factor * cross / r))
        dmax = default_delta_max(np_)
        maps, covered, samples = _pack_level(local_edges, part_sizes, starts, sizes, cross, rng, epsilon, budget, chunk, dmax)
        out.append((maps + start).astype(np.int32))
        uncovered += cross - covered
        levels.append(
            {
                "depth": depth,
                "start": start,
                "size": size,
                "n_prime": np_,
                "sizes": sizes,
                "I4": rest,
                "cross_edges": cross,
                "covered": covered,
                "copies": int(len(maps)),
                "samples": samples,
                "delta_max": dmax,
            }
        )
        for i in range(3):
            stack.append((start + starts[i], sizes[i], depth + 1))
    copies = np.vstack(out) if out else np.zeros((0, G.n), dtype=np.int32)
    P = Packing(host, G, copies, {})
    require_valid(P)
    report["levels"] = levels
    report["losses"] = {
        "i4_edges": i4_edges,
        "below_cutoff_edges": below_edges,
        "uncovered_cross_edges": uncovered,
    }
    report["coverage"] = _frac(P.coverage)
    return P, report
