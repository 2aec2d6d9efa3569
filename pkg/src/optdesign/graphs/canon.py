"""Canonical labelling of small graphs.

Colour refinement (equitable partition by neighbour counts per cell) followed
by individualisation of vertices in the first smallest non-singleton cell.
Every leaf of that search tree is a vertex ordering; the canonical form is the
leaf whose relabelled edge bitset is largest.  Swapping two twin vertices is
an automorphism that fixes every node of the tree below their common cell, so
only one twin per class is individualised at each node.
"""
from __future__ import annotations

from .graph import Graph, encode_graph6

MAX_CANON_ORDER = 16


def _refine(nbrs, colors, n):
    # colors: ranks 0..k-1; returns the coarsest equitable refinement, ranked.
    # Sorted neighbour colours carry the same information as per-cell counts.
    k = max(colors) + 1
    while k < n:
        sigs = [(colors[v], sorted([colors[w] for w in nbrs[v]])) for v in range(n)]
        distinct = sorted(set((c, tuple(t)) for c, t in sigs))
        if len(distinct) == k:
            break
        rank = {s: i for i, s in enumerate(distinct)}
        colors = [rank[(c, tuple(t))] for c, t in sigs]
        k = len(distinct)
    return colors


def _twin_classes(adj, n):
    twin = list(range(n))
    for u in range(n):
        if twin[u] != u:
            continue
        for w in range(u + 1, n):
            if twin[w] == w:
                bu, bw = 1 << u, 1 << w
                if adj[u] & ~bw == adj[w] & ~bu:
                    twin[w] = u
    return twin


def _leaf_code(edges, colors):
    code = 0
    for i, j in edges:
        a, b = colors[i], colors[j]
        if a > b:
            a, b = b, a
        code |= 1 << (b * (b - 1) // 2 + a)
    return code


def canonical_labelling(adj, n=None):
    """Return ``(lab, code)`` where ``lab[v]`` is the canonical position of v.

    ``code`` is the edge bitset of the relabelled graph, so two graphs are
    isomorphic exactly when their codes agree.
    """
    if n is None:
        n = len(adj)
    if n > MAX_CANON_ORDER:
        raise ValueError(f"canonical form limited to n <= {MAX_CANON_ORDER}")
    if n == 0:
        return [], 0
    edges = [(i, j) for j in range(n) for i in range(j) if adj[j] >> i & 1]
    twin = _twin_classes(adj, n)
    nbrs = [[w for w in range(n) if adj[v] >> w & 1] for v in range(n)]
    degs = [len(nb) for nb in nbrs]
    order = sorted(set(degs))
    colors = _refine(nbrs, [order.index(d) for d in degs], n)

    best_code = -1
    best_lab = None
    stack = [colors]
    while stack:
        cols = stack.pop()
        k = max(cols) + 1
        if k == n:
            code = _leaf_code(edges, cols)
            if code > best_code:
                best_code, best_lab = code, cols
            continue
        sizes = [0] * k
        for c in cols:
            sizes[c] += 1
        target = min((s, c) for c, s in enumerate(sizes) if s > 1)[1]
        tried = set()
        for v in range(n):
            if cols[v] != target or twin[v] in tried:
                continue
            tried.add(twin[v])
            child = [2 * c + (1 if (c == target and u != v) else 0) if c >= target else 2 * c
                     for u, c in enumerate(cols)]
            # ranks stay contiguous after individualisation
            ranks = sorted(set(child))
            pos = {c: i for i, c in enumerate(ranks)}
            stack.append(_refine(nbrs, [pos[c] for c in child], n))
    return best_lab, best_code


def canonical_form(g: Graph) -> tuple[list[int], str]:
    """Canonical relabelling and certificate (graph6 of the canonical graph)."""
    lab, code = canonical_labelling(list(g.adjacency), g.n)
    return lab, encode_graph6(Graph(g.n, code))


def certificate(g: Graph) -> str:
    return canonical_form(g)[1]


def canonical_graph(g: Graph) -> Graph:
    _, code = canonical_labelling(list(g.adjacency), g.n)
    return Graph(g.n, code)
