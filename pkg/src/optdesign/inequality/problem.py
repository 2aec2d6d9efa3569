"""The constrained program whose global minimum is the two-valued point.

Minimise ``f(x) = sum x_i^-p`` subject to

    g   = sum x_i - sum theta_i                 = 0
    h   = sum theta_i^2 - sum x_i^2            <= 0
    k   = prod x_i - prod theta_i              <= 0
    l1  = x_1 - theta_1                        <= 0
    l2  = xi - x_1                             <= 0
    m_i = x_1 - x_i,  n_i = x_i - x_n          <= 0   (i = 2..n-1)

where theta is ``theta1`` repeated ``m1`` times followed by ``theta2``
repeated ``m2`` times.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

FEAS_TOL = 1e-10
GAP_TOL = 1e-12


@dataclass(frozen=True)
class KktProblem:
    m1: int
    m2: int
    theta1: float
    theta2: float
    p: float
    xi: float | None = None

    def __post_init__(self):
        if self.m1 < 1 or self.m2 < 1:
            raise ValueError("multiplicities must be at least 1")
        if not 0 < self.theta1 < self.theta2:
            raise ValueError("need 0 < theta1 < theta2")
        if self.p <= 0:
            raise ValueError("p must be positive")
        if self.xi is None:
            object.__setattr__(self, "xi", (2.0 * self.f_theta) ** (-1.0 / self.p))
        elif not (self.xi > 0 and self.xi ** -self.p > self.f_theta):
            raise ValueError("xi must satisfy xi^-p > f(theta)")

    @property
    def n(self) -> int:
        return self.m1 + self.m2

    @property
    def theta(self) -> np.ndarray:
        return np.array([self.theta1] * self.m1 + [self.theta2] * self.m2)

    @property
    def f_theta(self) -> float:
        return self.m1 * self.theta1 ** -self.p + self.m2 * self.theta2 ** -self.p

    # computed from the theta vector the same way constraints() treats x, so
    # that every constraint vanishes exactly at theta
    @property
    def sum_theta(self) -> float:
        return float(self.theta.sum())

    @property
    def sumsq_theta(self) -> float:
        return float(np.sum(self.theta * self.theta))

    @property
    def prod_theta(self) -> float:
        return float(np.prod(self.theta))


def objective(x, p: float) -> float:
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("objective needs positive components")
    return float(np.sum(x ** -p))


class Constraints(NamedTuple):
    g: float
    h: float
    k: float
    l1: float
    l2: float
    m: tuple[float, ...]
    n: tuple[float, ...]

    def inequalities(self) -> list[float]:
        return [self.h, self.k, self.l1, self.l2, *self.m, *self.n]

    def feasible(self, tol: float = FEAS_TOL) -> bool:
        return abs(self.g) <= tol and max(self.inequalities()) <= tol


def constraints(problem: KktProblem, x) -> Constraints:
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n,):
        raise ValueError(f"expected a vector of length {problem.n}")
    if np.any(x <= 0):
        raise ValueError("constraints need positive components")
    inner = x[1:-1]
    return Constraints(
        g=float(x.sum() - problem.sum_theta),
        h=float(problem.sumsq_theta - np.sum(x * x)),
        k=float(np.prod(x) - problem.prod_theta),
        l1=float(x[0] - problem.theta1),
        l2=float(problem.xi - x[0]),
        m=tuple(float(v) for v in x[0] - inner),
        n=tuple(float(v) for v in inner - x[-1]),
    )


@dataclass(frozen=True)
class Verdict:
    status: str  # "infeasible", "consistent" or "violation"
    condition: str | None
    gap: float | None

    @property
    def is_violation(self) -> bool:
        return self.status == "violation"


def theorem_conditions(problem: KktProblem, x, tol: float = FEAS_TOL) -> str | None:
    """First failed hypothesis among (i)-(iv), or None when all hold."""
    x = np.asarray(x, dtype=float)
    if abs(x.sum() - problem.sum_theta) > tol * problem.sum_theta:
        return "i"
    if np.sum(x * x) < problem.sumsq_theta * (1 - tol):
        return "ii"
    if x.min() > problem.theta1 * (1 + tol):
        return "iii"
    if np.prod(x) > problem.prod_theta * (1 + tol):
        return "iv"
    return None


def theorem_main2_check(problem: KktProblem, x, tol: float = FEAS_TOL) -> Verdict:
    """Check f(x) >= f(theta) for x meeting the four hypotheses.

    The minimisation argument places theta at the global minimum of f over
    the feasible set, so this is the direction tested.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n,):
        raise ValueError(f"expected a vector of length {problem.n}")
    if np.any(x <= 0):
        return Verdict("infeasible", "positivity", None)
    failed = theorem_conditions(problem, x, tol)
    if failed is not None:
        return Verdict("infeasible", failed, None)
    gap = objective(x, problem.p) - problem.f_theta
    return Verdict("consistent" if gap >= -GAP_TOL else "violation", None, gap)
