"""Random feasible points for the two-valued minimisation problem.

Feasible means the four hypotheses hold in floating point with no slack:
equal sums, at least the reference sum of squares, a minimum not above
theta1, and a product not above the reference product.  The minimum must
also stay above the floor xi; points below it have f(x) > xi^-p > f(theta)
anyway.  Proposals mix local
zero-sum perturbations, points pushed onto the h, k and l1 boundaries,
global Dirichlet draws and, for n = 3, a deterministic grid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problem import KktProblem, objective

GRID_SIDE = 120


@dataclass
class SampleBatch:
    points: np.ndarray
    proposals: int

    @property
    def acceptance_rate(self) -> float:
        return len(self.points) / self.proposals if self.proposals else 0.0


def feasible_mask(problem: KktProblem, x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    pos = np.all(x > 0, axis=1)
    xs = np.where(pos[:, None], x, 1.0)
    s = xs.sum(axis=1)
    return (
        pos
        & (np.abs(s - problem.sum_theta) <= 1e-12 * problem.sum_theta)
        & ((xs * xs).sum(axis=1) >= problem.sumsq_theta)
        & (xs.min(axis=1) <= problem.theta1)
        & (xs.min(axis=1) >= problem.xi)
        & (np.prod(xs, axis=1) <= problem.prod_theta)
    )


def _zero_sum_units(rng, count, n):
    z = rng.standard_normal((count, n))
    z -= z.mean(axis=1, keepdims=True)
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _perturb(problem, rng, count):
    th = problem.theta
    z = _zero_sum_units(rng, count, problem.n)
    eps = problem.theta1 * 10 ** rng.uniform(-3, 0, size=(count, 1))
    return th + eps * z


def _on_h(problem, rng, count):
    th = problem.theta
    z = _zero_sum_units(rng, count, problem.n)
    eps = -2 * (z @ th)
    return th + eps[:, None] * z


def _on_k(problem, rng, count):
    th = problem.theta
    z = _zero_sum_units(rng, count, problem.n)
    slope = (z / th).sum(axis=1)
    z = np.where((slope < 0)[:, None], -z, z)
    neg = np.where(z < 0, th / np.maximum(-z, 1e-300), np.inf)
    emax = neg.min(axis=1) * (1 - 1e-12)

    def phi(eps):
        return np.log1p(eps[:, None] * z / th).sum(axis=1)

    lo = emax * 1e-6
    hi = emax.copy()
    ok = phi(lo) > 0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        up = phi(mid) > 0
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
    x = th + hi[:, None] * z
    return x[ok]


def _on_l1(problem, rng, count):
    th = problem.theta
    n, m1 = problem.n, problem.m1
    z = rng.standard_normal((count, n))
    z[:, :m1] = np.abs(z[:, :m1])
    pin = rng.integers(0, m1, size=count)
    z[np.arange(count), pin] = 0.0
    excess = z[:, :m1].sum(axis=1) + z[:, m1:].sum(axis=1)
    z[:, m1:] -= (excess / problem.m2)[:, None]
    norm = np.linalg.norm(z, axis=1, keepdims=True)
    z = z[norm[:, 0] > 1e-12] / norm[norm[:, 0] > 1e-12]
    count = len(z)
    eps = problem.theta1 * 10 ** rng.uniform(-3, 0, size=(count, 1))
    return th + eps * z


def _global(problem, rng, count):
    return rng.dirichlet(np.ones(problem.n), size=count) * problem.sum_theta


def grid_points(problem: KktProblem, side: int = GRID_SIDE) -> np.ndarray:
    """Regular grid over the plane x1 + x2 + x3 = const (n = 3 only)."""
    if problem.n != 3:
        return np.zeros((0, problem.n))
    total = problem.sum_theta
    ticks = np.arange(1, side) / side * total
    x1, x2 = np.meshgrid(ticks, ticks, indexing="ij")
    x1, x2 = x1.ravel(), x2.ravel()
    x3 = total - x1 - x2
    return np.column_stack([x1, x2, x3])


_MODES = ((_perturb, 0.4), (_on_h, 0.15), (_on_k, 0.15), (_on_l1, 0.15), (_global, 0.15))


def sample_feasible(problem: KktProblem, count: int, seed: int | None = None,
                    rng: np.random.Generator | None = None) -> SampleBatch:
    """``count`` feasible points; row 0 is theta itself."""
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = rng if rng is not None else np.random.default_rng(seed)
    parts = [problem.theta[None]]
    proposals = 1
    have = 1
    grid = grid_points(problem)
    if len(grid):
        proposals += len(grid)
        grid = grid[feasible_mask(problem, grid)]
        parts.append(grid[: count - have])
        have += len(parts[-1])
    batch = max(256, count)
    while have < count:
        for mode, share in _MODES:
            cand = mode(problem, rng, max(1, int(batch * share)))
            proposals += len(cand)
            # permuting coordinates keeps the hypotheses and exercises order freedom
            cand = rng.permuted(cand, axis=1)
            cand = cand[feasible_mask(problem, cand)]
            parts.append(cand[: count - have])
            have += len(parts[-1])
            if have >= count:
                break
    return SampleBatch(np.concatenate(parts)[:count], proposals)


@dataclass
class PropertySummary:
    samples: int
    min_gap: float
    violations: int
    near_equal: int
    near_equal_off_theta: int
    acceptance_rate: float
    worst: tuple[float, ...] = ()

    def to_record(self) -> dict:
        return dict(self.__dict__)


def check_samples(problem: KktProblem, batch: SampleBatch, gap_tol: float = 1e-12,
                  eq_gap: float = 1e-9, eq_dist: float = 1e-6) -> PropertySummary:
    """f(x) - f(theta) over a batch: violations and equality cases."""
    x = batch.points
    gaps = np.sum(x ** -problem.p, axis=1) - problem.f_theta
    near = gaps < eq_gap
    dist = np.abs(np.sort(x, axis=1) - problem.theta).max(axis=1)
    return PropertySummary(
        samples=len(x),
        min_gap=float(gaps.min()),
        violations=int(np.sum(gaps < -gap_tol)),
        near_equal=int(near.sum()),
        near_equal_off_theta=int(np.sum(near & (dist > eq_dist))),
        acceptance_rate=batch.acceptance_rate,
        worst=tuple(float(t) for t in x[int(np.argmin(gaps))]),
    )


__all__ = ["SampleBatch", "sample_feasible", "feasible_mask", "grid_points",
           "check_samples", "PropertySummary", "objective"]
