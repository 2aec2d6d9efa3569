"""Isomorph-free generation of connected graphs with a given order and size.

Trees on ``n`` vertices are grown leaf by leaf (there are few of them).  From
the trees, edges are added one at a time by canonical augmentation: a child
``G = P + e`` is kept only when ``e`` could be the canonical deletion edge of
``G``.  That edge is the non-bridge edge maximising a cheap invariant, ties
resolved by canonical labels, so most children are rejected before any
canonical labelling is computed.  Children of one parent are deduplicated
locally; nothing is kept across parents.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Iterator

from .canon import canonical_labelling
from .graph import Graph

log = logging.getLogger(__name__)

MAX_ENUM_ORDER = 10


def _edge_key(adj, deg, u, v):
    # cheap isomorphism-invariant score for an edge
    du, dv = deg[u], deg[v]
    lo = du if du < dv else dv
    return ((du + dv) * 32 + lo) * 32 + (adj[u] & adj[v]).bit_count()


def _is_bridge(adj, u, v):
    bu, bv = 1 << u, 1 << v
    seen = frontier = bu
    while frontier:
        nxt = 0
        while frontier:
            low = frontier & -frontier
            w = low.bit_length() - 1
            nb = adj[w]
            if w == u:
                nb &= ~bv
            elif w == v:
                nb &= ~bu
            nxt |= nb
            frontier ^= low
        if nxt & bv:
            return False
        frontier = nxt & ~seen
        seen |= frontier
    return True


def _code_to_adj(n, code):
    adj = [0] * n
    j, base = 1, 0
    while code >> base:
        row = (code >> base) & ((1 << j) - 1)
        while row:
            low = row & -row
            i = low.bit_length() - 1
            adj[i] |= 1 << j
            adj[j] |= 1 << i
            row ^= low
        base += j
        j += 1
    return adj


def _children(n, parent_code):
    """Canonical codes of accepted one-edge extensions of a canonical parent."""
    adj = _code_to_adj(n, parent_code)
    deg = [a.bit_count() for a in adj]
    pedges = [(i, j) for j in range(n) for i in range(j) if adj[j] >> i & 1]
    seen = set()
    out = []
    for j in range(1, n):
        for i in range(j):
            if adj[j] >> i & 1:
                continue
            adj[i] |= 1 << j
            adj[j] |= 1 << i
            deg[i] += 1
            deg[j] += 1
            key = _edge_key(adj, deg, i, j)
            rivals = []
            ok = True
            for u, v in pedges:
                kv = _edge_key(adj, deg, u, v)
                if kv < key:
                    continue
                if _is_bridge(adj, u, v):
                    continue
                if kv > key:
                    ok = False
                    break
                rivals.append((u, v))
            if ok:
                lab, code = canonical_labelling(adj, n)
                if code not in seen:
                    if rivals:
                        ok = _accept_tie(adj, n, lab, (i, j), rivals, parent_code)
                    if ok:
                        seen.add(code)
                        out.append(code)
            adj[i] &= ~(1 << j)
            adj[j] &= ~(1 << i)
            deg[i] -= 1
            deg[j] -= 1
    return out


def _accept_tie(adj, n, lab, added, rivals, parent_code):
    def pos(e):
        a, b = lab[e[0]], lab[e[1]]
        return (a, b) if a > b else (b, a)

    best = max(rivals + [added], key=pos)
    if best == added:
        return True
    u, v = best
    reduced = list(adj)
    reduced[u] &= ~(1 << v)
    reduced[v] &= ~(1 << u)
    return canonical_labelling(reduced, n)[1] == parent_code


def _trees(n):
    level = {0}
    for order in range(2, n + 1):
        nxt = set()
        for code in level:
            adj = _code_to_adj(order - 1, code) + [0]
            for v in range(order - 1):
                adj[v] |= 1 << (order - 1)
                adj[order - 1] = 1 << v
                nxt.add(canonical_labelling(adj, order)[1])
                adj[v] &= ~(1 << (order - 1))
        level = nxt
    return sorted(level)


def _expand_many(args):
    n, codes = args
    out = []
    for c in codes:
        out.extend(_children(n, c))
    return out


def _chunks(seq, size):
    for start in range(0, len(seq), size):
        yield seq[start:start + size]


def connected_codes(n: int, m: int, jobs: int = 1) -> list[int]:
    """Sorted canonical edge codes of all connected graphs with n vertices, m edges."""
    if not 1 <= n <= MAX_ENUM_ORDER:
        raise ValueError(f"n must be in 1..{MAX_ENUM_ORDER}")
    if m < 0 or m > n * (n - 1) // 2:
        raise ValueError(f"m must be in 0..{n * (n - 1) // 2}")
    if m < n - 1:
        return []
    level = _trees(n)
    pool = ProcessPoolExecutor(jobs) if jobs > 1 else None
    try:
        for size in range(n - 1, m):
            log.info("n=%d m=%d: %d classes", n, size, len(level))
            if pool is None:
                nxt = _expand_many((n, level))
            else:
                chunk = max(1, len(level) // (jobs * 16))
                nxt = []
                for part in pool.map(_expand_many, ((n, c) for c in _chunks(level, chunk))):
                    nxt.extend(part)
            level = sorted(nxt)
    finally:
        if pool is not None:
            pool.shutdown()
    return level


def default_jobs() -> int:
    env = os.environ.get("OPTDESIGN_JOBS")
    return int(env) if env else 1


def enumerate_connected(n: int, m: int, jobs: int | None = None) -> Iterator[Graph]:
    """One canonical representative per isomorphism class of connected (n, m) graphs."""
    for code in connected_codes(n, m, jobs or default_jobs()):
        yield Graph(n, code)


def connected_cubic_count(n: int = 10, include_disconnected: bool = False, jobs: int | None = None) -> int:
    if n % 2 or n < 4:
        return 0
    m = 3 * n // 2
    count = sum(1 for g in enumerate_connected(n, m, jobs) if g.is_regular(3))
    if include_disconnected:
        count += _disconnected_cubic_count(n, jobs)
    return count


def _disconnected_cubic_count(n, jobs):
    # partitions of n into even parts >= 4, each part a connected cubic graph
    counts = {k: connected_cubic_count(k, jobs=jobs) for k in range(4, n - 3, 2)}

    def multisets(remaining, smallest):
        if remaining == 0:
            yield []
            return
        for part in range(smallest, remaining + 1, 2):
            if part in counts:
                for rest in multisets(remaining - part, part):
                    yield [part] + rest

    from collections import Counter
    from math import comb

    total = 0
    for parts in multisets(n, 4):
        if len(parts) < 2:
            continue
        ways = 1
        for size, mult in Counter(parts).items():
            ways *= comb(counts[size] + mult - 1, mult)
        total += ways
    return total
