"""KKT residuals, canonical multipliers, the stationarity root function and MFCQ witnesses."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .problem import KktProblem, constraints

RESIDUAL_TOL = 1e-8
ACTIVE_TOL = 1e-10
ROOT_GRID = 2048


@dataclass(frozen=True)
class KktPoint:
    e: tuple[float, ...]
    nu: float
    lam: float = 0.0
    rho: float = 0.0
    eta1: float = 0.0
    eta2: float = 0.0
    alpha: tuple[float, ...] = ()
    beta: tuple[float, ...] = ()

    def __post_init__(self):
        n = len(self.e)
        object.__setattr__(self, "e", tuple(float(x) for x in self.e))
        for name in ("alpha", "beta"):
            vals = tuple(float(x) for x in getattr(self, name)) or (0.0,) * max(n - 2, 0)
            if len(vals) != max(n - 2, 0):
                raise ValueError(f"{name} needs {n - 2} entries (indices 2..n-1)")
            object.__setattr__(self, name, vals)
        for name in ("lam", "rho", "eta1", "eta2"):
            if getattr(self, name) < 0:
                raise ValueError(f"multiplier {name} must be nonnegative")
        if min(self.alpha, default=0.0) < 0 or min(self.beta, default=0.0) < 0:
            raise ValueError("multipliers alpha_i, beta_i must be nonnegative")
        if min(self.e) <= 0:
            raise ValueError("point must have positive components")

    @property
    def D(self) -> float:
        return math.prod(self.e)

    def cluster_counts(self, tol: float = 1e-12) -> tuple[int, int, int]:
        """(r, t, s): entries equal to e_1, equal to e_n, strictly between."""
        e = self.e
        scale = max(abs(e[-1]), 1.0)
        r = sum(abs(x - e[0]) <= tol * scale for x in e)
        t = sum(abs(x - e[-1]) <= tol * scale for x in e)
        if abs(e[0] - e[-1]) <= tol * scale:
            return len(e), len(e), 0
        return r, t, len(e) - r - t


@dataclass
class ResidualReport:
    stationarity: float
    slackness: float
    feasibility: float
    tol: float
    rows: list[float] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max(self.stationarity, self.slackness, self.feasibility)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol

    def to_record(self) -> dict:
        return {"stationarity": self.stationarity, "slackness": self.slackness,
                "feasibility": self.feasibility, "max_residual": self.max_residual,
                "tol": self.tol, "passed": self.passed}


def stationarity_rows(problem: KktProblem, pt: KktPoint) -> np.ndarray:
    e = np.array(pt.e)
    p = problem.p
    alpha = np.array(pt.alpha)
    beta = np.array(pt.beta)
    rows = -p * e ** (-p - 1) + pt.nu - 2 * pt.lam * e + pt.rho * pt.D / e
    rows[0] += pt.eta1 - pt.eta2 + alpha.sum()
    rows[1:-1] += -alpha + beta
    rows[-1] -= beta.sum()
    return rows


def kkt_residuals(problem: KktProblem, pt: KktPoint, tol: float = RESIDUAL_TOL) -> ResidualReport:
    if len(pt.e) != problem.n:
        raise ValueError(f"point has {len(pt.e)} components, problem has n={problem.n}")
    rows = stationarity_rows(problem, pt)
    con = constraints(problem, pt.e)
    products = [pt.lam * con.h, pt.rho * con.k, pt.eta1 * con.l1, pt.eta2 * con.l2]
    products += [a * m for a, m in zip(pt.alpha, con.m)]
    products += [b * n for b, n in zip(pt.beta, con.n)]
    feas = [abs(con.g)] + [max(0.0, x) for x in con.inequalities()]
    return ResidualReport(
        stationarity=float(np.abs(rows).max()),
        slackness=float(max(abs(x) for x in products)),
        feasibility=float(max(feas)),
        tol=tol,
        rows=rows.tolist(),
    )


def canonical_multipliers(problem: KktProblem) -> KktPoint:
    """Multipliers making the two-valued point stationary with only h active.

    Solves ``-p*theta_j^(-p-1) + nu - 2*lam*theta_j = 0`` for j = 1, 2.
    """
    t1, t2, p = problem.theta1, problem.theta2, problem.p
    if t1 == t2:
        raise ValueError("theta1 and theta2 must differ")
    g1, g2 = p * t1 ** (-p - 1), p * t2 ** (-p - 1)
    lam = (g1 - g2) / (2 * (t2 - t1))
    nu = g1 + 2 * lam * t1
    return KktPoint(tuple(problem.theta), nu=nu, lam=lam)


def y_function(x, nu: float, lam: float, rho: float, D: float, p: float):
    x = np.asarray(x, dtype=float)
    return -p + nu * x ** (p + 1) - 2 * lam * x ** (p + 2) + rho * D * x ** p


def y_positive_roots(nu: float, lam: float, rho: float, D: float, p: float,
                     lo: float = 1e-6, hi: float = 1e6, tol: float = 1e-12) -> list[float]:
    """Positive zeros of y by sign changes on a log grid, refined by bisection."""
    grid = np.logspace(math.log10(lo), math.log10(hi), ROOT_GRID)
    with np.errstate(over="ignore", invalid="ignore"):
        vals = y_function(grid, nu, lam, rho, D, p)
    roots = []
    for i in range(len(grid) - 1):
        a, b = grid[i], grid[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if not (np.isfinite(fa) and np.isfinite(fb)):
            continue
        if fa == 0.0:
            roots.append(float(a))
            continue
        if fa * fb < 0:
            while b - a > tol * b:
                mid = 0.5 * (a + b)
                fm = float(y_function(mid, nu, lam, rho, D, p))
                if fm == 0.0:
                    a = b = mid
                    break
                if (fm < 0) == (fa < 0):
                    a, fa = mid, fm
                else:
                    b = mid
            roots.append(0.5 * (a + b))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


@dataclass(frozen=True)
class MfcqWitness:
    w: tuple[float, ...]
    a: float
    b: float
    c: float
    t: int


@dataclass
class MfcqCheck:
    witness: MfcqWitness
    eq_product: float
    active: dict[str, float]

    @property
    def ok(self) -> bool:
        return self.eq_product == 0 and all(v < 0 for v in self.active.values())


def active_gradients(problem: KktProblem, e, tol: float = ACTIVE_TOL) -> dict[str, np.ndarray]:
    """Gradients of the inequality constraints active at e."""
    e = np.asarray(e, dtype=float)
    n = len(e)
    con = constraints(problem, e)
    out = {}
    if abs(con.h) <= tol * problem.sumsq_theta:
        out["h"] = -2 * e
    if abs(con.k) <= tol * problem.prod_theta:
        out["k"] = np.prod(e) / e
    if abs(con.l1) <= tol * problem.theta1:
        out["l1"] = np.eye(n)[0]
    if abs(con.l2) <= tol * problem.theta1:
        out["l2"] = -np.eye(n)[0]
    scale = e[-1]
    for idx, val in enumerate(con.m, start=2):
        if abs(val) <= tol * scale:
            out[f"m{idx}"] = np.eye(n)[0] - np.eye(n)[idx - 1]
    for idx, val in enumerate(con.n, start=2):
        if abs(val) <= tol * scale:
            out[f"n{idx}"] = np.eye(n)[idx - 1] - np.eye(n)[-1]
    return out


def mfcq_witness(problem: KktProblem, e, b: float = 1.0, c: float = 2.0,
                 tol: float = ACTIVE_TOL) -> MfcqCheck:
    """Build w = (-a, 0, ..., 0, b, ..., b, c) and test it against the active gradients."""
    e = np.asarray(e, dtype=float)
    if np.any(np.diff(e) < 0):
        raise ValueError("point must be sorted nondecreasing")
    scale = max(e[-1], 1.0)
    if e[-1] - e[0] <= tol * scale:
        raise ValueError("witness needs e_1 < e_n")
    if problem.xi - e[0] >= -tol * problem.theta1:
        raise ValueError("witness needs l2(e) < 0")
    if not c > b > 0:
        raise ValueError("need c > b > 0")
    n = len(e)
    t = int(np.sum(np.abs(e - e[-1]) <= tol * scale))
    a = (t - 1) * b + c
    w = np.zeros(n)
    w[0] = -a
    w[n - t:n - 1] = b
    w[-1] = c
    witness = MfcqWitness(tuple(w.tolist()), a, b, c, t)
    grads = active_gradients(problem, e, tol)
    return MfcqCheck(witness, float(np.ones(n) @ w), {name: float(gr @ w) for name, gr in grads.items()})
