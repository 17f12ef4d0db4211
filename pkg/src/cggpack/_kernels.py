"""Vectorised building blocks shared by the packers and the checker."""

from __future__ import annotations

import numba as _nb
import numpy as np


def lex_first_greedy(cands: np.ndarray, blocked: np.ndarray) -> np.ndarray:
    """Sequential greedy over the rows of ``cands`` in order.

    ``cands[i]`` lists the (flat) resource ids row ``i`` needs; ``blocked`` is
    a flat boolean array of resources already taken.  A row is accepted when
    none of its resources is blocked, and its resources are then marked.
    Accepted row positions are returned in increasing order.
    """
    cands = np.asarray(cands)
    if cands.ndim != 2 or len(cands) == 0:
        return np.zeros(0, dtype=np.int64)
    if cands.shape[1] == 0:
        return np.arange(len(cands), dtype=np.int64)
    out = np.empty(len(cands), dtype=np.int64)
    k = _greedy_rows(np.ascontiguousarray(cands, dtype=np.int64), blocked, out)
    return out[:k].copy()


def copy_edge_ids(copies: np.ndarray, pattern_edges: np.ndarray, n: int) -> np.ndarray:
    """Host edge ids ``min*n + max`` of every pattern edge of every copy (rows x |E|)."""
    if len(pattern_edges) == 0:
        return np.zeros((len(copies), 0), dtype=np.int64)
    u = copies[:, pattern_edges[:, 0]].astype(np.int64)
    v = copies[:, pattern_edges[:, 1]].astype(np.int64)
    return np.minimum(u, v) * n + np.maximum(u, v)


def order_ok(copies: np.ndarray, n: int, cyclic: bool) -> np.ndarray:
    """Per-row check: distinct, in range, and increasing (linearly or around the circle)."""
    c = np.asarray(copies)
    if c.ndim != 2:
        raise ValueError("copies must be 2-D")
    rows, p = c.shape
    ok = ((c >= 0) & (c < n)).all(axis=1)
    if p <= 1:
        return ok
    if not cyclic:
        return ok & (np.diff(c, axis=1) > 0).all(axis=1)
    s = np.sort(c, axis=1)
    ok &= (np.diff(s, axis=1) > 0).all(axis=1)
    if p == 2:
        return ok
    descents = (np.roll(c, -1, axis=1) < c).sum(axis=1)
    return ok & (descents == 1)


def pattern_edge_array(pattern) -> np.ndarray:
    return np.array(pattern.edge_list(), dtype=np.int64).reshape(-1, 2)


# --- systematic placement scan (numba) ---------------------------------------


_DEBRUIJN = np.uint64(0x03F79D71B4CB0A89)


def _debruijn_table() -> np.ndarray:
    table = np.full(64, -1, dtype=np.int64)
    for i in range(64):
        bb = 1 << i
        key = (((bb ^ (bb - 1)) * 0x03F79D71B4CB0A89) & ((1 << 64) - 1)) >> 58
        table[key] = i
    assert (table >= 0).all()
    return table


_BITPOS = _debruijn_table()


@_nb.njit(cache=True)
def _greedy_rows(cands, blocked, out):
    k = 0
    r = cands.shape[1]
    for i in range(cands.shape[0]):
        ok = True
        for j in range(r):
            if blocked[cands[i, j]]:
                ok = False
                break
        if ok:
            for j in range(r):
                blocked[cands[i, j]] = True
            out[k] = i
            k += 1
    return k


@_nb.njit(cache=True)
def _lowest_bit(x, table):
    return table[((x ^ (x - np.uint64(1))) * _DEBRUIJN) >> np.uint64(58)]


@_nb.njit(cache=True)
def _fill_candidates(cand, j, t, rows, back, free, lo, hi, W):
    """cand[j] = free common neighbours of the back positions, restricted to (lo, hi)."""
    for k in range(W):
        cand[j, k] = ~np.uint64(0)
    for q in range(j):
        if back[t, j, q]:
            u = rows[q]
            for k in range(W):
                cand[j, k] &= free[u, k]
    for k in range(W):
        base = k * 64
        word = cand[j, k]
        if base + 63 <= lo or base >= hi:
            word = np.uint64(0)
        else:
            if lo >= base:
                sh = lo - base + 1
                if sh >= 64:
                    word = np.uint64(0)
                else:
                    word &= ~((np.uint64(1) << np.uint64(sh)) - np.uint64(1))
            if hi < base + 64:
                sh = hi - base
                word &= (np.uint64(1) << np.uint64(sh)) - np.uint64(1)
        cand[j, k] = word


@_nb.njit(cache=True)
def _is_free(free, u, w):
    return (free[u, w >> 6] >> np.uint64(w & 63)) & np.uint64(1)


@_nb.njit(cache=True)
def _block(free, u, w):
    free[u, w >> 6] &= ~(np.uint64(1) << np.uint64(w & 63))


@_nb.njit(cache=True)
def _scan(N, back, first_edge_level, free, out_rows, out_tags, table):
    T, p = back.shape[0], back.shape[1]
    W = free.shape[1]
    rows = np.empty(p, np.int64)
    cand = np.empty((p, W), np.uint64)
    n_out = 0
    for v0 in range(N - p + 1):
        for t in range(T):
            rows[0] = v0
            if p == 1:
                out_rows[n_out, 0] = v0
                out_tags[n_out] = t
                n_out += 1
                continue
            _fill_candidates(cand, 1, t, rows, back, free, v0, N - (p - 2), W)
            j = 1
            while j >= 1:
                # next candidate at level j
                w = -1
                k = 0
                while k < W:
                    if cand[j, k] != 0:
                        x = cand[j, k]
                        bit = _lowest_bit(x, table)
                        cand[j, k] = x & (x - np.uint64(1))
                        w = k * 64 + bit
                        break
                    k += 1
                if w < 0:
                    j -= 1
                    continue
                ok = True
                for q in range(j):
                    if back[t, j, q] and _is_free(free, rows[q], w) == 0:
                        ok = False
                        break
                if not ok:
                    continue
                rows[j] = w
                if j == p - 1:
                    for a in range(p):
                        out_rows[n_out, a] = rows[a]
                    out_tags[n_out] = t
                    n_out += 1
                    for b in range(p):
                        for a in range(b):
                            if back[t, b, a]:
                                _block(free, rows[a], rows[b])
                    j = first_edge_level[t]
                    continue
                _fill_candidates(cand, j + 1, t, rows, back, free, w, N - (p - 2 - j), W)
                j += 1
    return n_out


def scan_placements(N: int, tables, blocked: np.ndarray, capacity: int):
    """Lexicographic greedy over every placement not yet blocked.

    ``tables`` is a list of ``(pos, pedges)`` with pedges given on sorted
    positions; ``blocked`` is the flat ``u*N + v`` array, updated in place.
    Returns ``(subsets, tags)`` of the accepted placements.
    """
    T = len(tables)
    p = len(tables[0][0])
    back = np.zeros((T, p, p), dtype=np.bool_)
    first = np.zeros(T, dtype=np.int64)
    for t, (_, pedges) in enumerate(tables):
        for a, b in pedges.tolist():
            back[t, b, a] = True
        first[t] = int(pedges[:, 1].min()) if len(pedges) else max(p - 1, 1)
    W = (N + 63) // 64
    B = blocked.reshape(N, N)
    freebits = np.zeros((N, W * 64), dtype=np.bool_)
    freebits[:, :N] = ~B
    freebits[np.tril_indices(N)] = False
    free = np.packbits(freebits.reshape(N, W, 64)[:, :, ::-1], axis=2, bitorder="big").view(">u8").reshape(N, W).astype(np.uint64)
    out_rows = np.empty((capacity + 1, p), dtype=np.int64)
    out_tags = np.empty(capacity + 1, dtype=np.int64)
    n = _scan(N, back, first, free, out_rows, out_tags, _BITPOS)
    subsets, tags = out_rows[:n].copy(), out_tags[:n].copy()
    for t, (_, pedges) in enumerate(tables):
        sel = tags == t
        if len(pedges):
            blocked[subsets[sel][:, pedges[:, 0]] * N + subsets[sel][:, pedges[:, 1]]] = True
    return subsets, tags
