"""Two-point moment inequalities and the matched-moment uniqueness lemma."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Sequence

BOX_TOL = 1e-9
BENNET_TOL = 1e-12


class HypothesisNotMet(ValueError):
    """The lemma does not apply to the given data."""


def lemma_2eq_solve(m: int, n: int, s: int, t: int, a1: float, a2: float) -> list[tuple[float, float]]:
    """Solutions (x, y) with 0 < x <= a1 < a2 <= y matching first and second moments.

    Substituting ``x = (A - t*y)/s`` into the second-moment equation gives
    ``t(t+s) y^2 - 2At y + (A^2 - sB) = 0``.
    """
    if min(m, n, s, t) < 1:
        raise ValueError("m, n, s, t must be positive integers")
    if m + n != s + t:
        raise ValueError("need m + n == s + t")
    if not a1 < a2:
        raise ValueError("need a1 < a2")
    first = m * a1 + n * a2
    second = m * a1 * a1 + n * a2 * a2
    qa = t * (t + s)
    qb = -2 * first * t
    qc = first * first - s * second
    disc = qb * qb - 4 * qa * qc
    if disc < 0:
        return []
    root = math.sqrt(disc)
    out = []
    for y in {(-qb - root) / (2 * qa), (-qb + root) / (2 * qa)}:
        x = (first - t * y) / s
        scale = max(abs(a1), abs(a2), 1.0)
        if x > 0 and x <= a1 + BOX_TOL * scale and y >= a2 - BOX_TOL * scale:
            if abs(x - a1) <= BOX_TOL * scale and abs(y - a2) <= BOX_TOL * scale:
                x, y = float(a1), float(a2)
            out.append((x, y))
    return sorted(out)


@dataclass(frozen=True)
class PhiFunction:
    name: str
    f: Callable[[float], float]
    convex: bool
    concave_convex_derivative: bool


_PARAM = re.compile(r"^(power|neg-power)\(\s*([0-9.eE+-]+)\s*\)$")


def phi_function(phi_id: str) -> PhiFunction:
    """Registry of test functions with the shape facts the two lemmas need."""
    fixed = {
        "square": PhiFunction("square", lambda x: x * x, True, False),
        "exp": PhiFunction("exp", math.exp, True, False),
        "neg-log": PhiFunction("neg-log", lambda x: -math.log(x), True, False),
        "log": PhiFunction("log", math.log, False, True),
    }
    if phi_id in fixed:
        return fixed[phi_id]
    match = _PARAM.match(phi_id)
    if match:
        p = float(match.group(2))
        if p <= 0:
            raise ValueError("power exponent must be positive")
        if match.group(1) == "power":
            return PhiFunction(phi_id, lambda x: x ** -p, True, False)
        return PhiFunction(phi_id, lambda x: -(x ** -p), False, True)
    raise ValueError(f"unknown phi id {phi_id!r}")


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b))


def bennet_check(variant: int, alphas: Sequence[float], deltas: Sequence[float],
                 points: Sequence[float], phi_id: str) -> bool:
    """alpha1*phi(a1) + alpha2*phi(a2) <= delta1*phi(d1) + delta2*phi(d2).

    ``points`` is ``(a1, a2, d1, d2)``.  Variant 1 needs d1 < a1 < a2 < d2 and a
    convex phi; variant 2 needs a1 < d1 < a2 < d2, a second-moment excess on
    the a side, and phi concave with convex derivative.  Raises
    HypothesisNotMet when the chosen variant does not apply.
    """
    al1, al2 = alphas
    de1, de2 = deltas
    a1, a2, d1, d2 = points
    phi = phi_function(phi_id)
    if min(al1, al2, de1, de2) < 0:
        raise HypothesisNotMet("weights must be nonnegative")
    if not _close(al1 + al2, de1 + de2):
        raise HypothesisNotMet("weight totals differ")
    if not _close(al1 * a1 + al2 * a2, de1 * d1 + de2 * d2):
        raise HypothesisNotMet("first moments differ")
    if variant == 1:
        if not d1 < a1 < a2 < d2:
            raise HypothesisNotMet("variant 1 needs d1 < a1 < a2 < d2")
        if not phi.convex:
            raise HypothesisNotMet(f"{phi_id} is not convex")
    elif variant == 2:
        if not a1 < d1 < a2 < d2:
            raise HypothesisNotMet("variant 2 needs a1 < d1 < a2 < d2")
        lhs2 = al1 * a1 * a1 + al2 * a2 * a2
        rhs2 = de1 * d1 * d1 + de2 * d2 * d2
        if lhs2 < rhs2 and not _close(lhs2, rhs2):
            raise HypothesisNotMet("variant 2 needs the a-side second moment to dominate")
        if not phi.concave_convex_derivative:
            raise HypothesisNotMet(f"{phi_id} is not concave with convex derivative")
    else:
        raise ValueError("variant must be 1 or 2")
    lhs = al1 * phi.f(a1) + al2 * phi.f(a2)
    rhs = de1 * phi.f(d1) + de2 * phi.f(d2)
    return lhs <= rhs + BENNET_TOL
