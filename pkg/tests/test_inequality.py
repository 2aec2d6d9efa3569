import math
import random
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest

from optdesign.inequality import (HypothesisNotMet, KktPoint, KktProblem, bennet_check,
                                  canonical_multipliers, check_samples, constraints, kkt_residuals,
                                  lemma_2eq_solve, mfcq_witness, objective, sample_feasible,
                                  theorem_main2_check, y_positive_roots)
from optdesign.inequality.sampling import feasible_mask

SMALL = KktProblem(2, 1, 1.0, 2.0, 1.0)


def random_problem(rng, n_max=9, p_choices=(0.5, 1, 2, 10)):
    n = rng.randint(2, n_max)
    m1 = rng.randint(1, n - 1)
    t1 = rng.uniform(0.5, 2)
    return KktProblem(m1, n - m1, t1, t1 * rng.uniform(1.1, 10), rng.choice(p_choices))


# --- problem definition -----------------------------------------------------------

def test_problem_validation():
    with pytest.raises(ValueError):
        KktProblem(1, 1, 2.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        KktProblem(0, 1, 1.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        KktProblem(1, 1, 1.0, 2.0, 1.0, xi=1.0)
    assert SMALL.xi ** -SMALL.p == pytest.approx(2 * SMALL.f_theta)


def test_constraint_examples():
    con = constraints(SMALL, SMALL.theta)
    assert (con.g, con.h, con.k, con.l1) == (0, 0, 0, 0) and con.feasible()
    con = constraints(SMALL, [0.9, 1, 2.1])
    assert con.g == pytest.approx(0, abs=1e-12)
    assert con.h == pytest.approx(-0.22) and con.k == pytest.approx(-0.11) and con.l1 == pytest.approx(-0.1)
    assert con.feasible()
    con = constraints(SMALL, [1.2, 1.2, 1.6])
    assert con.h == pytest.approx(0.56) and not con.feasible()
    with pytest.raises(ValueError):
        constraints(SMALL, [0, 1, 2])
    with pytest.raises(ValueError):
        objective([1, -1], 1)


def test_theorem_check_examples():
    v = theorem_main2_check(SMALL, [0.9, 1, 2.1])
    assert v.status == "consistent" and v.gap == pytest.approx(2.587301587 - 2.5, abs=1e-8)
    for perm in permutations([1.0, 1.0, 2.0]):
        v = theorem_main2_check(SMALL, perm)
        assert v.status == "consistent" and v.gap == pytest.approx(0, abs=1e-15)
    v = theorem_main2_check(SMALL, [1.2, 1.2, 1.6])
    assert (v.status, v.condition) == ("infeasible", "ii")
    with pytest.raises(ValueError):
        theorem_main2_check(SMALL, [1, 2])


def test_printed_direction_fails_on_three_point_example():
    # regression: the "<=" reading of the conclusion is false at this feasible point
    x = [Fraction(9, 10), Fraction(1), Fraction(21, 10)]
    assert sum(1 / t for t in x) == Fraction(163, 63) > Fraction(5, 2)


def test_corrected_direction_fails_when_both_multiplicities_exceed_one():
    # exact counterexample to ">=" for theta = (1, 1, 2, 2): all four hypotheses hold
    theta = [Fraction(1)] * 2 + [Fraction(2)] * 2
    x = [Fraction(1), Fraction(5, 4), Fraction(13, 10), Fraction(49, 20)]
    assert sum(x) == sum(theta)
    assert sum(t * t for t in x) >= sum(t * t for t in theta)
    assert min(x) <= min(theta)
    assert math.prod(x) <= math.prod(theta)
    for p in (1, 2):
        assert sum(t ** -p for t in x) < sum(t ** -p for t in theta)
    v = theorem_main2_check(KktProblem(2, 2, 1.0, 2.0, 1.0), [float(t) for t in x])
    assert v.is_violation and v.gap == pytest.approx(float(Fraction(9483, 3185) - 3))


def test_property_holds_when_one_value_is_simple():
    # with m1 = 1 or m2 = 1 no sampled point beats theta
    rng = random.Random(12)
    for i in range(12):
        prob = random_problem(rng)
        if rng.random() < 0.5:
            prob = KktProblem(1, prob.n - 1, prob.theta1, prob.theta2, prob.p)
        else:
            prob = KktProblem(prob.n - 1, 1, prob.theta1, prob.theta2, prob.p)
        summary = check_samples(prob, sample_feasible(prob, 20000, seed=i))
        assert summary.violations == 0, prob


# --- sampler ---------------------------------------------------------------------

def test_sampler_outputs_are_feasible():
    batch = sample_feasible(SMALL, 10_000, seed=1)
    assert batch.points.shape == (10_000, 3)
    assert np.array_equal(batch.points[0], SMALL.theta)
    assert feasible_mask(SMALL, batch.points).all()
    # the constraint system is stated for nondecreasing vectors
    assert all(constraints(SMALL, np.sort(x)).feasible() for x in batch.points[:500])


def test_sampler_acceptance_on_random_problems():
    rng = random.Random(5)
    for i in range(20):
        prob = random_problem(rng)
        batch = sample_feasible(prob, 2000, seed=i)
        assert batch.acceptance_rate > 0 and len(batch.points) == 2000


def test_sampler_is_seed_deterministic():
    a = sample_feasible(SMALL, 3000, seed=9).points
    b = sample_feasible(SMALL, 3000, seed=9).points
    assert np.array_equal(a, b)
    with pytest.raises(ValueError):
        sample_feasible(SMALL, 0)


# --- KKT ---------------------------------------------------------------------------

@pytest.mark.parametrize("m1,m2", [(1, 1), (2, 3), (4, 5)])
def test_kkt_example_at_theta(m1, m2):
    prob = KktProblem(m1, m2, 1.0, 2.0, 1.0)
    pt = KktPoint(tuple(prob.theta), nu=1.75, lam=0.375)
    rep = kkt_residuals(prob, pt)
    assert rep.passed and rep.max_residual < 1e-12
    assert pt.cluster_counts() == (m1, m2, 0)


def test_kkt_rejects_negative_multiplier():
    with pytest.raises(ValueError):
        KktPoint((1.0, 1.0, 2.0), nu=1.75, lam=-0.375)


def test_kkt_fails_without_multipliers():
    batch = sample_feasible(SMALL, 50, seed=3)
    for e in batch.points[1:]:
        e = np.sort(e)
        rep = kkt_residuals(SMALL, KktPoint(tuple(e), nu=0.0))
        assert not rep.passed and rep.stationarity > 0.1


def test_canonical_multiplier_examples():
    pt = canonical_multipliers(KktProblem(1, 1, 1.0, 2.0, 1.0))
    assert (pt.nu, pt.lam) == pytest.approx((1.75, 0.375))
    pt = canonical_multipliers(KktProblem(1, 1, 1.0, 2.0, 2.0))
    assert (pt.nu, pt.lam) == pytest.approx((3.75, 0.875))


def test_canonical_multipliers_pass_on_random_problems():
    rng = random.Random(21)
    for _ in range(100):
        prob = random_problem(rng, p_choices=(0.3, 0.5, 1, 2, 3.7, 10))
        pt = canonical_multipliers(prob)
        assert pt.lam > 0
        assert kkt_residuals(prob, pt, tol=1e-10).passed


def test_y_roots_examples():
    assert y_positive_roots(1.75, 0.375, 0, 2, 1) == pytest.approx([1, 2], abs=1e-10)
    for p, nu in ((1, 2.0), (0.5, 3.0), (2, 0.7)):
        roots = y_positive_roots(nu, 0, 0, 1, p)
        assert roots == pytest.approx([(p / nu) ** (1 / (p + 1))], rel=1e-9)


def test_y_roots_at_most_two():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        nu, lam = rng.uniform(0.01, 10), rng.uniform(0.01, 10)
        rho, d = rng.uniform(0, 5), rng.uniform(0.1, 10)
        p = rng.choice([0.5, 1, 2])
        assert len(y_positive_roots(nu, lam, rho, d, p)) <= 2


def test_mfcq_example():
    prob = KktProblem(1, 2, 1.0, 2.0, 1.0)
    check = mfcq_witness(prob, [1.0, 2.0, 2.0])
    assert check.witness.w == (-3.0, 1.0, 2.0) and check.witness.t == 2
    assert check.eq_product == 0
    assert check.active == pytest.approx({"h": -6.0, "k": -6.0, "l1": -3.0, "n2": -1.0})
    assert check.ok


def test_mfcq_without_active_constraints():
    prob = KktProblem(2, 1, 1.0, 2.0, 1.0)
    check = mfcq_witness(prob, [0.9, 1.0, 2.1])
    assert check.active == {} and check.ok


def test_mfcq_hypothesis_gates():
    prob = KktProblem(1, 2, 1.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        mfcq_witness(prob, [1.5, 1.5, 1.5])
    with pytest.raises(ValueError):
        mfcq_witness(prob, [prob.xi, 2.0, 2.5])
    with pytest.raises(ValueError):
        mfcq_witness(prob, [2.0, 1.0, 2.0])


# --- lemmas ------------------------------------------------------------------------

def test_2eq_examples():
    assert lemma_2eq_solve(2, 1, 1, 2, 1.0, 2.0) == []
    assert lemma_2eq_solve(3, 4, 3, 4, 0.7, 5.5) == [(0.7, 5.5)]
    with pytest.raises(ValueError):
        lemma_2eq_solve(2, 1, 1, 1, 1.0, 2.0)


def test_2eq_random_mismatched_splits_are_empty():
    rng = random.Random(17)
    done = 0
    while done < 500:
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        s = rng.randint(1, m + n - 1)
        t = m + n - s
        if (s, t) == (m, n):
            continue
        a1 = rng.uniform(0.1, 5)
        a2 = a1 + rng.uniform(0.01, 5)
        assert lemma_2eq_solve(m, n, s, t, a1, a2) == []
        done += 1


def test_bennet_examples():
    assert bennet_check(1, (1, 1), (1, 1), (1, 3, 0.5, 3.5), "square")
    # matched first moments, a side more spread out: 1*ln1 + 1*ln3 <= 1.5*ln1.5 + 0.5*ln3.5
    assert bennet_check(2, (1, 1), (1.5, 0.5), (1, 3, 1.5, 3.5), "log")
    with pytest.raises(HypothesisNotMet):
        bennet_check(1, (1, 1), (1, 1), (1, 3, 1.5, 2.5), "square")
    with pytest.raises(HypothesisNotMet):
        bennet_check(2, (1, 1), (1.5, 0.5), (1, 3, 1.5, 3.5), "square")
    with pytest.raises(ValueError):
        bennet_check(1, (1, 1), (1, 1), (1, 3, 0.5, 3.5), "sine")


def test_bennet_random_instances_hold():
    rng = random.Random(31)
    for _ in range(300):
        d1 = rng.uniform(0.1, 1)
        a1 = d1 + rng.uniform(0.01, 1)
        a2 = a1 + rng.uniform(0.01, 1)
        d2 = a2 + rng.uniform(0.01, 1)
        al = (rng.uniform(0.1, 2), rng.uniform(0.1, 2))
        # delta weights matching total mass and first moment
        total, first = sum(al), al[0] * a1 + al[1] * a2
        de2 = (first - total * d1) / (d2 - d1)
        de = (total - de2, de2)
        for phi in ("square", "exp", "neg-log", "power(2)"):
            assert bennet_check(1, al, de, (a1, a2, d1, d2), phi)
