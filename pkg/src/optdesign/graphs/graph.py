"""Simple undirected graphs stored as an upper-triangle bitset.

Bit ``j*(j-1)//2 + i`` (for ``i < j``) marks the edge ``{i, j}``; this is the
graph6 column order, so encoding is a straight walk over the bits.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

MAX_GRAPH6_ORDER = 62


def pair_index(i: int, j: int) -> int:
    if i > j:
        i, j = j, i
    return j * (j - 1) // 2 + i


@dataclass(frozen=True)
class Graph:
    n: int
    bits: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        if self.bits < 0 or self.bits >> (self.n * (self.n - 1) // 2):
            raise ValueError("edge bitset exceeds the upper triangle")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        bits = 0
        for i, j in edges:
            if i == j:
                raise ValueError(f"loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={n}")
            bits |= 1 << pair_index(i, j)
        return cls(n, bits)

    @classmethod
    def from_adjacency(cls, adj: list[int]) -> "Graph":
        """Build from per-vertex neighbour masks."""
        n = len(adj)
        bits = 0
        for j in range(n):
            row = adj[j] & ((1 << j) - 1)
            while row:
                low = row & -row
                bits |= 1 << (j * (j - 1) // 2 + low.bit_length() - 1)
                row ^= low
        return cls(n, bits)

    @cached_property
    def adjacency(self) -> tuple[int, ...]:
        adj = [0] * self.n
        for i, j in self.edges():
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        return tuple(adj)

    @property
    def m(self) -> int:
        return self.bits.bit_count()

    def edges(self) -> Iterator[tuple[int, int]]:
        bits = self.bits
        j, base = 1, 0
        while bits >> base:
            row = (bits >> base) & ((1 << j) - 1)
            while row:
                low = row & -row
                yield (low.bit_length() - 1, j)
                row ^= low
            base += j
            j += 1

    def has_edge(self, i: int, j: int) -> bool:
        return i != j and bool(self.bits >> pair_index(i, j) & 1)

    def degrees(self) -> list[int]:
        return [a.bit_count() for a in self.adjacency]

    def laplacian(self) -> list[list[int]]:
        """Degree diagonal minus adjacency, as nested integer lists."""
        n = self.n
        lap = [[0] * n for _ in range(n)]
        for i, j in self.edges():
            lap[i][j] = lap[j][i] = -1
            lap[i][i] += 1
            lap[j][j] += 1
        return lap

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        return _component_mask(self.adjacency, 0) == (1 << self.n) - 1

    def is_regular(self, degree: int | None = None) -> bool:
        degs = set(self.degrees())
        if len(degs) > 1:
            return False
        return degree is None or degs == {degree} or (self.n == 0)

    def relabel(self, perm: list[int]) -> "Graph":
        """Vertex ``i`` becomes ``perm[i]``."""
        return Graph.from_edges(self.n, ((perm[i], perm[j]) for i, j in self.edges()))

    def to_graph6(self) -> str:
        return encode_graph6(self)


def _component_mask(adj, start: int) -> int:
    seen = frontier = 1 << start
    while frontier:
        nxt = 0
        while frontier:
            low = frontier & -frontier
            nxt |= adj[low.bit_length() - 1]
            frontier ^= low
        frontier = nxt & ~seen
        seen |= frontier
    return seen


def encode_graph6(g: Graph) -> str:
    n = g.n
    if n > MAX_GRAPH6_ORDER:
        raise ValueError(f"graph6 size byte supports n <= {MAX_GRAPH6_ORDER}")
    nbits = n * (n - 1) // 2
    out = [chr(n + 63)]
    bits = g.bits
    for start in range(0, nbits, 6):
        val = 0
        for k in range(6):
            val <<= 1
            if start + k < nbits:
                val |= (bits >> (start + k)) & 1
        out.append(chr(val + 63))
    return "".join(out)


def decode_graph6(text: str) -> Graph:
    s = text.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
    if not s:
        raise ValueError("empty graph6 string")
    for ch in s:
        if not 63 <= ord(ch) <= 126:
            raise ValueError(f"invalid graph6 character {ch!r}")
    n = ord(s[0]) - 63
    if n > MAX_GRAPH6_ORDER:
        raise ValueError("multi-byte graph6 sizes are not supported")
    nbits = n * (n - 1) // 2
    need = (nbits + 5) // 6
    payload = s[1:]
    if len(payload) != need:
        raise ValueError(f"graph6 payload has {len(payload)} bytes, expected {need}")
    bits = 0
    pos = 0
    for ch in payload:
        val = ord(ch) - 63
        for k in range(5, -1, -1):
            if pos < nbits and (val >> k) & 1:
                bits |= 1 << pos
            pos += 1
    return Graph(n, bits)


def read_graph6(lines: Iterable[str]) -> Iterator[Graph]:
    for line in lines:
        line = line.strip()
        if line:
            yield decode_graph6(line)


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def complete_graph(n: int) -> Graph:
    return Graph(n, (1 << (n * (n - 1) // 2)) - 1)


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
