"""Multi-restart exchange search for designs with a good eigenvalue criterion.

Moves either swap one treatment occurrence inside a block or redraw a whole
block.  A restart climbs by strict improvements and allows a bounded number
of sideways moves on plateaus, with a short tabu list of visited block
multisets.  After ``patience`` proposals without improvement it redraws a
couple of blocks of its best design and climbs again, until
``max_iterations`` proposals are spent.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np

from .design import Design, information_matrix, is_connected

CRITERIA = ("A", "D", "E", "phi")
TIE_TOL = 1e-9
PLATEAU_CAP = 200
TABU_LEN = 64
KICK_SIZE = 2
MAX_ITERATIONS = 5000
PATIENCE = 400


@dataclass(frozen=True)
class SearchConfig:
    v: int
    b: int
    k: int
    criterion: str = "D"
    p: float | None = None
    binary_only: bool = True
    restarts: int = 10
    max_iterations: int = MAX_ITERATIONS
    patience: int = PATIENCE
    seed: int = 0

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}")
        if self.criterion == "phi" and not (self.p and self.p > 0):
            raise ValueError("phi criterion needs p > 0")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.max_iterations < 1 or self.patience < 1:
            raise ValueError("max_iterations and patience must be positive")
        if min(self.v, self.b, self.k) < 1:
            raise ValueError("v, b, k must be positive")
        if self.binary_only and self.k > self.v:
            raise ValueError("binary designs need k <= v")


@dataclass
class SearchResult:
    design: Design
    score: float
    restart: int
    trace: list[dict] = field(default_factory=list)
    exact: dict = field(default_factory=dict)


def score(d: Design, cfg: SearchConfig) -> float:
    """Criterion value oriented so that larger is better; -inf when disconnected."""
    return _score_pair(d, cfg)[0]


def _score_pair(d: Design, cfg: SearchConfig) -> tuple[float, float]:
    # The second entry only breaks ties.  E landscapes are flat, so there the
    # harmonic mean of the spectrum steers plateau moves.
    if not is_connected(d):
        return -math.inf, -math.inf
    c = information_matrix(d).to_array()
    eig = np.linalg.eigvalsh(c)[1:]
    if eig[0] <= 1e-9 * max(1.0, float(np.trace(c))):
        return -math.inf, -math.inf
    if cfg.criterion == "D":
        return float(np.sum(np.log(eig))), 0.0
    if cfg.criterion == "E":
        return float(eig[0]), float(len(eig) / np.sum(1.0 / eig))
    if cfg.criterion == "A":
        return float(len(eig) / np.sum(1.0 / eig)), 0.0
    low = eig[0]
    return -float(np.mean((low / eig) ** cfg.p) ** (1.0 / cfg.p) / low), 0.0


def _compare(a: tuple[float, float], b: tuple[float, float]) -> int:
    """1 if a is better than b, 0 if tied within tolerance, -1 if worse."""
    for x, y in zip(a, b):
        if x > y + TIE_TOL:
            return 1
        if x < y - TIE_TOL:
            return -1
    return 0


def _random_block(rng, cfg):
    if cfg.binary_only:
        return tuple(sorted(int(t) + 1 for t in rng.choice(cfg.v, cfg.k, replace=False)))
    return tuple(sorted(int(t) + 1 for t in rng.integers(0, cfg.v, cfg.k)))


def _initial(rng, cfg):
    for _ in range(10000):
        d = Design(cfg.v, cfg.k, tuple(_random_block(rng, cfg) for _ in range(cfg.b)))
        if is_connected(d):
            return d
    raise ValueError("could not draw a connected starting design; parameters look infeasible")


def _propose(rng, d, cfg):
    blocks = list(d.blocks)
    j = int(rng.integers(cfg.b))
    if rng.random() < 0.5:
        block = list(blocks[j])
        pos = int(rng.integers(cfg.k))
        new = int(rng.integers(1, cfg.v + 1))
        if new == block[pos] or (cfg.binary_only and new in block):
            return None
        block[pos] = new
        blocks[j] = tuple(sorted(block))
    else:
        blocks[j] = _random_block(rng, cfg)
    return Design(cfg.v, cfg.k, tuple(blocks))


def _multiset(d):
    return tuple(sorted(d.blocks))


def _restart(cfg, index, rng):
    start = _initial(rng, cfg)
    budget = cfg.max_iterations
    if cfg.criterion == "E":
        # single exchanges rarely lift the smallest eigenvalue, so E restarts
        # start from an A-climb; the E trace begins after the warm start
        start, _, _ = _climb(replace(cfg, criterion="A"), start, rng, budget // 2, index)
        budget -= budget // 2
    return _climb(cfg, start, rng, budget, index)


def _climb(cfg, cur, rng, budget, index):
    cur_score = _score_pair(cur, cfg)
    best, best_score = cur, cur_score
    trace = [{"restart": index, "iteration": 0, "score": cur_score[0]}]
    tabu = deque([_multiset(cur)], maxlen=TABU_LEN)
    sideways = stale = 0
    for it in range(1, budget + 1):
        cand = _propose(rng, cur, cfg)
        stale += 1
        if cand is None:
            continue
        s = _score_pair(cand, cfg)
        verdict = _compare(s, cur_score)
        if verdict > 0:
            cur, cur_score = cand, s
            sideways = stale = 0
            tabu.append(_multiset(cand))
            trace.append({"restart": index, "iteration": it, "score": s[0]})
        elif verdict == 0 and sideways < PLATEAU_CAP:
            key = _multiset(cand)
            if key not in tabu:
                cur = cand
                sideways += 1
                tabu.append(key)
        if _compare(cur_score, best_score) > 0:
            best, best_score = cur, cur_score
        if stale >= cfg.patience:
            cur = _kick(rng, best, cfg)
            cur_score = _score_pair(cur, cfg)
            sideways = stale = 0
            trace.append({"restart": index, "iteration": it, "score": cur_score[0], "kick": True})
    return best, best_score, trace


def _kick(rng, d, cfg, size=KICK_SIZE):
    """Redraw a few blocks of d at once; used when a restart stalls."""
    for _ in range(100):
        blocks = list(d.blocks)
        for j in rng.choice(cfg.b, min(size, cfg.b), replace=False):
            blocks[int(j)] = _random_block(rng, cfg)
        cand = Design(cfg.v, cfg.k, tuple(blocks))
        if is_connected(cand):
            return cand
    return d


def local_search(cfg: SearchConfig) -> SearchResult:
    """Best design over all restarts; deterministic for a given seed."""
    if cfg.b == 1:
        block = tuple(range(1, cfg.k + 1)) if cfg.binary_only else (1,) * cfg.k
        d = Design(cfg.v, cfg.k, (block,))
        if not is_connected(d):
            raise ValueError("a single block is connected only when k = v")
        return SearchResult(d, score(d, cfg), 0, [], _certify(d, cfg))
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    result = best_pair = None
    trace = []
    for index, ss in enumerate(seeds):
        d, s, tr = _restart(cfg, index, np.random.default_rng(ss))
        trace.extend(tr)
        verdict = _compare(s, best_pair) if result else 1
        if verdict > 0 or (verdict == 0 and _multiset(d) < _multiset(result.design)):
            result, best_pair = SearchResult(d, s[0], index), s
    result.trace = trace
    result.exact = _certify(result.design, cfg)
    return result


def _certify(d: Design, cfg: SearchConfig) -> dict:
    """Exact re-certification of the winner where cheap."""
    out = {}
    if d.k == 2 and d.is_binary and len(set(d.blocks)) == d.b:
        from .graphs.graph import Graph
        from .spectra import spanning_tree_count

        g = Graph.from_edges(d.v, ((i - 1, j - 1) for i, j in d.blocks))
        out["spanning_trees"] = spanning_tree_count(g)
    from .criteria import exact_d_value

    out["d_value"] = str(exact_d_value(information_matrix(d)))
    return out
