"""Eigenvalue optimality criteria and the hypothesis checks built on them."""
from __future__ import annotations

import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .design import Design, InfoMatrix, information_matrix, is_connected
from .spectra import Spectrum, SpectrumError, bareiss_det, nonzero_spectra_batch, nonzero_spectrum

DEFAULT_P_GRID = (0.5, 1.0, 2.0, 5.0, 10.0, 50.0)
TIE_TOL = 1e-9
WITNESS_CAP = 16


def phi_p_value(s: Spectrum, p: float) -> float:
    """((sum mu_i^-p) / (v-1))^(1/p); smaller is better."""
    if p <= 0:
        raise ValueError("p must be positive")
    vals = np.asarray(s.values, dtype=float)
    if np.any(vals <= 0):
        raise ValueError("spectrum values must be positive")
    # factor out the smallest value so large p does not overflow
    low = vals.min()
    scaled = np.mean((low / vals) ** p)
    return float(scaled ** (1.0 / p) / low)


def a_value(s: Spectrum) -> float:
    return len(s.values) / math.fsum(1.0 / x for x in s.values)


def d_value(s: Spectrum) -> float:
    return float(math.prod(s.values))


def e_value(s: Spectrum) -> float:
    return float(min(s.values))


def trace_c_sq(d: Design) -> Fraction:
    return information_matrix(d).trace_sq()


_POWER = re.compile(r"^power\(\s*([0-9.eE+-]+)\s*\)$")


def type1_value(s: Spectrum, f: str) -> float:
    """Sum of f(mu_i) for f in {"neglog", "power(p)"}."""
    if f == "neglog":
        return -math.fsum(math.log(x) for x in s.values)
    match = _POWER.match(f)
    if match:
        p = float(match.group(1))
        if p <= 0:
            raise ValueError("power(p) needs p > 0")
        return math.fsum(x ** -p for x in s.values)
    raise ValueError(f"unknown function id {f!r}")


def majorizes(s1, s2, tol: float = 1e-12) -> bool:
    """Every prefix sum of s1 (sorted nonincreasing) is at least that of s2."""
    a = sorted(_values(s1), reverse=True)
    b = sorted(_values(s2), reverse=True)
    if len(a) != len(b):
        raise ValueError("spectra of different lengths")
    pa = pb = 0.0
    for x, y in zip(a, b):
        pa += x
        pb += y
        if pa < pb - tol * max(1.0, abs(pb)):
            return False
    return True


def _values(s):
    return s.values if isinstance(s, Spectrum) else tuple(s)


def completely_symmetric(c, tol: float = 0.0) -> bool:
    """Constant diagonal and constant off-diagonal entries."""
    if isinstance(c, InfoMatrix):
        m = c.scaled
        tol = 0
    else:
        m = np.asarray(c).tolist()
    n = len(m)
    if n <= 1:
        return True
    diag = [m[i][i] for i in range(n)]
    off = [m[i][j] for i in range(n) for j in range(n) if i != j]
    return max(diag) - min(diag) <= tol and max(off) - min(off) <= tol


def bagchi_precondition(g: int, v: int, k: int, r: int) -> bool:
    """g <= (v-1)(k-1) / (r(v-k)), compared exactly."""
    if k >= v:
        raise ValueError("requires k < v")
    return Fraction(g) <= Fraction((v - 1) * (k - 1), r * (v - k))


def universal_check(d: Design) -> dict:
    """Complete symmetry plus maximal trace.

    Over all designs with the same (v, b, k) the trace of C is at most
    b(k-1), reached exactly by the binary ones, so maximality is reported as
    equality with that bound.
    """
    info = information_matrix(d)
    bound = Fraction(d.b * (d.k - 1))
    trace = info.trace()
    sym = completely_symmetric(info)
    return {"completely_symmetric": sym, "trace_c": str(trace), "trace_bound": str(bound),
            "trace_is_max": trace == bound, "universally_optimal": sym and trace == bound}


def exact_d_value(c: InfoMatrix) -> Fraction:
    """Product of the nonzero eigenvalues: v times any cofactor of C."""
    v = c.order
    minor = [row[:-1] for row in c.scaled[:-1]]
    return Fraction(v * bareiss_det(minor), c.k ** (v - 1))


def exact_phi_sum(c: InfoMatrix, p: int) -> Fraction:
    """sum mu_i^-p for integer p, via trace((C + J/v)^-p) - 1."""
    if p < 1 or int(p) != p:
        raise ValueError("exact phi sums need a positive integer p")
    v = c.order
    shift = Fraction(1, v)
    m = [[c.entry(i, j) + shift for j in range(v)] for i in range(v)]
    inv = _fraction_inverse(m)
    power = inv
    for _ in range(int(p) - 1):
        power = [[sum(power[i][t] * inv[t][j] for t in range(v)) for j in range(v)] for i in range(v)]
    return sum(power[i][i] for i in range(v)) - 1


def _fraction_inverse(m):
    n = len(m)
    aug = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


@dataclass
class CriteriaReport:
    v: int
    b: int
    k: int
    trace_c: Fraction
    trace_c_sq: Fraction
    e_value: float
    d_value: float
    a_value: float
    phi_values: dict[float, float]
    distinct_count: int
    spectrum: Spectrum

    def to_record(self) -> dict:
        return {
            "v": self.v, "b": self.b, "k": self.k,
            "trace_c": float(self.trace_c), "trace_c_exact": str(self.trace_c),
            "trace_c_sq": float(self.trace_c_sq), "trace_c_sq_exact": str(self.trace_c_sq),
            "e_value": self.e_value, "d_value": self.d_value, "a_value": self.a_value,
            "phi_values": {_fmt_p(p): val for p, val in self.phi_values.items()},
            "distinct_count": self.distinct_count,
            "spectrum": [[val, mult] for val, mult in self.spectrum.clusters],
        }


def _fmt_p(p: float) -> str:
    return f"{p:g}"


def criteria_report(d: Design, p_grid: Sequence[float] = DEFAULT_P_GRID) -> CriteriaReport:
    info = information_matrix(d)
    s = nonzero_spectrum(info)
    return CriteriaReport(
        v=d.v, b=d.b, k=d.k,
        trace_c=info.trace(), trace_c_sq=info.trace_sq(),
        e_value=e_value(s), d_value=d_value(s), a_value=a_value(s),
        phi_values={float(p): phi_p_value(s, p) for p in p_grid},
        distinct_count=s.distinct_count, spectrum=s,
    )


# --- Theorem-level check over a class of competitors -------------------------

def design_key(d: Design):
    """Isomorphism key for simple-graph designs, labelled blocks otherwise."""
    if d.k == 2 and d.is_binary and len(set(d.blocks)) == d.b:
        from .graphs.canon import certificate
        from .graphs.graph import Graph

        return ("graph", certificate(Graph.from_edges(d.v, ((i - 1, j - 1) for i, j in d.blocks))))
    return ("blocks", d.v, d.k, tuple(sorted(d.blocks)))


@dataclass
class Tally:
    """Competitors that beat or tie the candidate on one metric."""

    better: int = 0
    ties: int = 0
    better_witnesses: list = field(default_factory=list)
    tie_witnesses: list = field(default_factory=list)
    class_best: float | None = None

    def merge(self, other: "Tally", maximize: bool) -> "Tally":
        best = [x for x in (self.class_best, other.class_best) if x is not None]
        pick = max if maximize else min
        return Tally(
            self.better + other.better,
            self.ties + other.ties,
            (self.better_witnesses + other.better_witnesses)[:WITNESS_CAP],
            (self.tie_witnesses + other.tie_witnesses)[:WITNESS_CAP],
            pick(best) if best else None,
        )


@dataclass
class MainCheckReport:
    candidate: CriteriaReport
    class_size: int = 0
    same_as_candidate: int = 0
    trace_sq: Tally = field(default_factory=Tally)
    e: Tally = field(default_factory=Tally)
    d: Tally = field(default_factory=Tally)
    phi: dict[float, Tally] = field(default_factory=dict)

    @property
    def h0(self) -> bool:
        return self.candidate.distinct_count == 2

    @property
    def h1(self) -> bool:
        return self.trace_sq.better == 0

    @property
    def h2(self) -> bool:
        return self.e.better == 0

    @property
    def h3(self) -> bool:
        return self.d.better == 0

    def phi_optimal(self, p: float) -> bool:
        return self.phi[p].better == 0

    def phi_unique(self, p: float) -> bool:
        return self.phi[p].better == 0 and self.phi[p].ties == 0

    @property
    def hypotheses(self) -> bool:
        return self.h0 and self.h1 and self.h2 and self.h3

    @property
    def conclusion(self) -> bool:
        """Hypotheses imply Phi_p-optimality at every grid point."""
        return (not self.hypotheses) or all(self.phi_optimal(p) for p in self.phi)

    def merge(self, other: "MainCheckReport") -> "MainCheckReport":
        return MainCheckReport(
            self.candidate,
            self.class_size + other.class_size,
            self.same_as_candidate + other.same_as_candidate,
            self.trace_sq.merge(other.trace_sq, maximize=False),
            self.e.merge(other.e, maximize=True),
            self.d.merge(other.d, maximize=True),
            {p: self.phi[p].merge(other.phi[p], maximize=False) for p in self.phi},
        )

    def to_record(self) -> dict:
        def tally(t: Tally):
            return {"better": t.better, "ties": t.ties, "class_best": _jsonable(t.class_best),
                    "better_witnesses": t.better_witnesses, "tie_witnesses": t.tie_witnesses}

        return {
            "class_size": self.class_size,
            "same_as_candidate": self.same_as_candidate,
            "h0_two_distinct": self.h0,
            "h1_min_trace_c_sq": self.h1,
            "h2_e_optimal": self.h2,
            "h3_d_optimal": self.h3,
            "phi": {_fmt_p(p): {"optimal": self.phi_optimal(p), "unique": self.phi_unique(p),
                                "candidate": self.candidate.phi_values[p], **tally(t)}
                    for p, t in self.phi.items()},
            "trace_sq": tally(self.trace_sq), "e": tally(self.e), "d": tally(self.d),
            "conclusion": self.conclusion,
            "candidate": self.candidate.to_record(),
        }


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    return x


def _near(a: float, b: float) -> bool:
    return abs(a - b) <= TIE_TOL * max(1.0, abs(a), abs(b))


def _empty_report(candidate: CriteriaReport, p_grid) -> MainCheckReport:
    return MainCheckReport(candidate, phi={float(p): Tally() for p in p_grid})


def _check_chunk(args) -> MainCheckReport:
    cand, cand_key, cand_info, start, designs, p_grid = args
    rep = _empty_report(cand, p_grid)
    if not designs:
        return rep
    infos = []
    for d in designs:
        if (d.v, d.b, d.k) != (cand.v, cand.b, cand.k):
            raise ValueError(f"class member (v,b,k)=({d.v},{d.b},{d.k}) does not match candidate")
        if not is_connected(d):
            raise SpectrumError("class member is not connected")
        infos.append(information_matrix(d))
    mats = np.array([i.scaled for i in infos], dtype=float) / cand.k
    spectra = nonzero_spectra_batch(mats)
    rep.class_size = len(designs)
    for offset, (d, info, s) in enumerate(zip(designs, infos, spectra)):
        ident = start + offset
        if design_key(d) == cand_key:
            rep.same_as_candidate += 1
            continue
        tsq = info.trace_sq()
        _record(rep.trace_sq, ident, tsq, cand.trace_c_sq, maximize=False,
                cmp=lambda: (tsq > cand.trace_c_sq) - (tsq < cand.trace_c_sq))
        ev = e_value(s)
        _record(rep.e, ident, ev, cand.e_value, maximize=True)
        dv = d_value(s)
        _record(rep.d, ident, dv, cand.d_value, maximize=True,
                cmp=lambda: _exact_cmp(exact_d_value(info), exact_d_value(cand_info)))
        for p in rep.phi:
            pv = phi_p_value(s, p)
            exact = None
            if float(p).is_integer():
                exact = lambda p=p: _exact_cmp(exact_phi_sum(info, int(p)), exact_phi_sum(cand_info, int(p)))
            _record(rep.phi[p], ident, pv, cand.phi_values[p], maximize=False, cmp=exact)
    return rep


def _exact_cmp(a, b) -> int:
    return (a > b) - (a < b)


def _record(t: Tally, ident, value, cand_value, maximize: bool, cmp: Callable[[], int] | None = None):
    """Classify one competitor against the candidate on a single metric."""
    if t.class_best is None:
        t.class_best = value
    else:
        t.class_best = max(t.class_best, value) if maximize else min(t.class_best, value)
    if isinstance(value, Fraction):
        sign = cmp()
    elif _near(float(value), float(cand_value)):
        sign = cmp() if cmp is not None else 0
    else:
        sign = 1 if value > cand_value else -1
    beats = sign > 0 if maximize else sign < 0
    if beats:
        t.better += 1
        if len(t.better_witnesses) < WITNESS_CAP:
            t.better_witnesses.append([ident, _jsonable(value)])
    elif sign == 0:
        t.ties += 1
        if len(t.tie_witnesses) < WITNESS_CAP:
            t.tie_witnesses.append([ident, _jsonable(value)])


def _chunked(items: Iterable[Design], size: int) -> Iterator[tuple[int, list[Design]]]:
    buf, start = [], 0
    for d in items:
        buf.append(d)
        if len(buf) == size:
            yield start, buf
            start += len(buf)
            buf = []
    if buf:
        yield start, buf


def theorem_main_check(candidate: Design, designs: Iterable[Design],
                       p_grid: Sequence[float] = DEFAULT_P_GRID, jobs: int = 1,
                       chunk: int = 4096) -> MainCheckReport:
    """Stream a competitor class and test the main optimality theorem's hypotheses.

    Competitors equal to the candidate (isomorphic, for simple-graph designs)
    are counted separately and never reported as ties.
    """
    if not (candidate.is_binary and is_connected(candidate)):
        raise ValueError("candidate must be binary and connected")
    p_grid = tuple(float(p) for p in p_grid)
    cand = criteria_report(candidate, p_grid)
    cand_info = information_matrix(candidate)
    cand_key = design_key(candidate)
    report = _empty_report(cand, p_grid)
    tasks = ((cand, cand_key, cand_info, start, part, p_grid) for start, part in _chunked(designs, chunk))
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            for part in pool.map(_check_chunk, tasks):
                report = report.merge(part)
    else:
        for task in tasks:
            report = report.merge(_check_chunk(task))
    return report
