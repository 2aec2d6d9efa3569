"""Block designs and the matrices derived from them.

Treatments are numbered 1..v.  Blocks are stored sorted, and two designs are
equal when their multisets of blocks agree.  The information matrix is kept
exactly as the integer matrix ``k*C = k*R - N N^T``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np


class DesignError(ValueError):
    """Malformed design input."""


@dataclass(frozen=True, eq=False)
class Design:
    v: int
    k: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.v < 1 or self.k < 1:
            raise DesignError("v and k must be positive")
        norm = []
        for pos, block in enumerate(self.blocks):
            block = tuple(sorted(int(t) for t in block))
            if len(block) != self.k:
                raise DesignError(f"block {pos + 1} has {len(block)} entries, expected k={self.k}")
            for t in block:
                if not 1 <= t <= self.v:
                    raise DesignError(f"treatment {t} in block {pos + 1} out of range 1..{self.v}")
            norm.append(block)
        object.__setattr__(self, "blocks", tuple(norm))

    @property
    def b(self) -> int:
        return len(self.blocks)

    @property
    def replications(self) -> tuple[int, ...]:
        r = [0] * self.v
        for block in self.blocks:
            for t in block:
                r[t - 1] += 1
        return tuple(r)

    @property
    def is_binary(self) -> bool:
        return all(len(set(block)) == len(block) for block in self.blocks)

    @property
    def is_equireplicate(self) -> bool:
        return len(set(self.replications)) == 1

    def _key(self):
        return (self.v, self.k, tuple(sorted(self.blocks)))

    def __eq__(self, other):
        if not isinstance(other, Design):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"Design(v={self.v}, b={self.b}, k={self.k}, blocks={[list(b) for b in self.blocks]})"


def parse_design(text: str) -> Design:
    """Read the line format: ``v=<int> k=<int>`` then one block per line."""
    header = None
    blocks = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            fields = dict(tok.split("=", 1) for tok in line.split() if "=" in tok)
            if set(fields) != {"v", "k"} or len(line.split()) != 2:
                raise DesignError(f"line {lineno}: expected header 'v=<int> k=<int>'")
            try:
                header = int(fields["v"]), int(fields["k"])
            except ValueError:
                raise DesignError(f"line {lineno}: non-integer header value") from None
            continue
        try:
            blocks.append(tuple(int(tok) for tok in line.split()))
        except ValueError:
            raise DesignError(f"line {lineno}: non-integer treatment index") from None
        if len(blocks[-1]) != header[1]:
            raise DesignError(f"line {lineno}: block has {len(blocks[-1])} entries, expected k={header[1]}")
    if header is None:
        raise DesignError("missing header line")
    return Design(header[0], header[1], tuple(blocks))


def format_design(d: Design, comments: Sequence[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(f"v={d.v} k={d.k}")
    lines.extend(" ".join(map(str, block)) for block in d.blocks)
    return "\n".join(lines) + "\n"


def incidence_matrix(d: Design) -> np.ndarray:
    n = np.zeros((d.v, d.b), dtype=np.int64)
    for j, block in enumerate(d.blocks):
        for t in block:
            n[t - 1, j] += 1
    return n


@dataclass(frozen=True)
class InfoMatrix:
    """Information matrix held as integers ``scaled = k*C``."""

    scaled: tuple[tuple[int, ...], ...]
    k: int

    @property
    def order(self) -> int:
        return len(self.scaled)

    def entry(self, i: int, j: int) -> Fraction:
        return Fraction(self.scaled[i][j], self.k)

    def to_fractions(self) -> list[list[Fraction]]:
        return [[Fraction(x, self.k) for x in row] for row in self.scaled]

    def to_array(self) -> np.ndarray:
        return np.array(self.scaled, dtype=float) / self.k

    def trace(self) -> Fraction:
        return Fraction(sum(self.scaled[i][i] for i in range(self.order)), self.k)

    def trace_sq(self) -> Fraction:
        """Sum of squared entries, i.e. trace of C^2."""
        return Fraction(sum(x * x for row in self.scaled for x in row), self.k * self.k)

    def row_sums(self) -> list[Fraction]:
        return [Fraction(sum(row), self.k) for row in self.scaled]


def concurrence_matrix(d: Design) -> np.ndarray:
    n = incidence_matrix(d)
    return n @ n.T


def information_matrix(d: Design) -> InfoMatrix:
    s = concurrence_matrix(d)
    r = d.replications
    scaled = (-s).tolist()
    for i in range(d.v):
        scaled[i][i] += d.k * r[i]
    return InfoMatrix(tuple(tuple(int(x) for x in row) for row in scaled), d.k)


def is_connected(d: Design) -> bool:
    # union-find over treatments sharing a block
    parent = list(range(d.v + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for block in d.blocks:
        root = find(block[0])
        for t in block[1:]:
            other = find(t)
            if other != root:
                parent[other] = root
    return len({find(t) for t in range(1, d.v + 1)}) == 1


def dual(d: Design) -> Design:
    r = d.replications
    if len(set(r)) != 1:
        raise DesignError("dual requires an equireplicate design (constant dual block size)")
    n = incidence_matrix(d)
    blocks = []
    for i in range(d.v):
        block = []
        for j in range(d.b):
            block.extend([j + 1] * int(n[i, j]))
        blocks.append(tuple(block))
    return Design(d.b, r[0], tuple(blocks))


@dataclass(frozen=True)
class GddParams:
    m: int
    n: int
    k: int
    lambda1: int
    lambda2: int
    r: int
    groups: tuple[tuple[int, ...], ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("m", "n", "k", "lambda2", "r"):
            if getattr(self, name) < 1:
                raise DesignError(f"GDD parameter {name} must be a positive integer")
        if self.lambda1 < 0:
            raise DesignError("lambda1 must be nonnegative")
        lhs = self.r * (self.k - 1)
        rhs = self.lambda1 * (self.n - 1) + self.lambda2 * self.n * (self.m - 1)
        if lhs != rhs:
            raise DesignError(f"inconsistent GDD parameters: r(k-1)={lhs} but "
                              f"lambda1(n-1)+lambda2*n(m-1)={rhs}")
        if (self.v * self.r) % self.k:
            raise DesignError("v*r must be divisible by k")

    @property
    def v(self) -> int:
        return self.m * self.n

    @property
    def b(self) -> int:
        return self.v * self.r // self.k

    def eigenvalues(self) -> list[tuple[Fraction, int]]:
        """Distinct nonzero eigenvalues of the information matrix with multiplicities."""
        k, r = self.k, self.r
        within = Fraction(r) - Fraction(r - self.lambda1, k)
        between = Fraction(r) - Fraction(r - self.lambda1 + self.n * (self.lambda1 - self.lambda2), k)
        parts = Counter()
        if self.n > 1:
            parts[within] += self.m * (self.n - 1)
        if self.m > 1:
            parts[between] += self.m - 1
        return sorted(parts.items(), reverse=True)

    def concurrence(self) -> np.ndarray:
        """Concurrence matrix implied by the parameters, groups contiguous."""
        v, n = self.v, self.n
        grp = np.arange(v) // n
        s = np.where(grp[:, None] == grp[None, :], self.lambda1, self.lambda2).astype(np.int64)
        np.fill_diagonal(s, self.r)
        return s


def gdd_spectrum(params: GddParams):
    from .spectra import Spectrum

    values = []
    for value, mult in params.eigenvalues():
        values.extend([float(value)] * mult)
    return Spectrum.from_values(values)


def gdd_recognize(d: Design, partition: Iterable[Iterable[int]] | None = None) -> GddParams | None:
    """Recover group-divisible parameters, or None when d is not a GDD."""
    if not (d.is_binary and d.is_equireplicate and is_connected(d)):
        return None
    s = concurrence_matrix(d)
    v = d.v
    r = d.replications[0]
    if partition is not None:
        groups = [sorted(g) for g in partition]
        return _check_groups(d, s, groups, r)
    offdiag = {int(s[i, j]) for i in range(v) for j in range(i + 1, v)}
    if len(offdiag) != 2:
        return None
    for lam1 in sorted(offdiag):
        groups = _classes(s, lam1)
        if groups is not None:
            params = _check_groups(d, s, groups, r)
            if params is not None and params.lambda1 != params.lambda2:
                return params
    return None


def _classes(s, value):
    # equivalence classes of "i == j or s[i, j] == value"; None if not transitive
    v = s.shape[0]
    assigned = [None] * v
    groups = []
    for i in range(v):
        if assigned[i] is not None:
            continue
        cls = [i] + [j for j in range(v) if j != i and s[i, j] == value]
        for a in cls:
            if assigned[a] is not None:
                return None
            for b in cls:
                if a != b and s[a, b] != value:
                    return None
            assigned[a] = len(groups)
        groups.append([a + 1 for a in cls])
    return groups


def _check_groups(d, s, groups, r):
    flat = sorted(t for g in groups for t in g)
    if flat != list(range(1, d.v + 1)):
        return None
    sizes = {len(g) for g in groups}
    if len(sizes) != 1:
        return None
    where = {t: gi for gi, g in enumerate(groups) for t in g}
    within, between = set(), set()
    for i in range(1, d.v + 1):
        for j in range(i + 1, d.v + 1):
            (within if where[i] == where[j] else between).add(int(s[i - 1, j - 1]))
    if len(within) > 1 or len(between) > 1 or not between:
        return None
    n = sizes.pop()
    lam1 = within.pop() if within else 0
    try:
        return GddParams(len(groups), n, d.k, lam1, between.pop(), r,
                         groups=tuple(tuple(g) for g in groups))
    except DesignError:
        return None


def graph_as_design(g) -> Design:
    """Edges of a simple graph become blocks of size 2."""
    if g.m < 1:
        raise DesignError("graph needs at least one edge")
    return Design(g.n, 2, tuple((i + 1, j + 1) for i, j in g.edges()))


def fano_plane() -> Design:
    lines = [(1, 2, 4), (2, 3, 5), (3, 4, 6), (4, 5, 7), (5, 6, 1), (6, 7, 2), (7, 1, 3)]
    return Design(7, 3, tuple(lines))
