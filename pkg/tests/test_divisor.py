import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polydensity import corpus
from polydensity.divisor import (TwoSided, build_balanced_divisor, divisor_convergence, divisor_from_indices,
                                 partial_sums_S, perturb_and_compare, perturbation_plan, separation_radii,
                                 verify_divisor)
from polydensity.entire import EntireFn
from polydensity.errors import (BudgetViolated, IndexOutOfRange, InsufficientZeros, InvariantViolation,
                                ZeroAtOrigin)


@pytest.fixture(scope="module")
def sinc():
    return corpus.sinc(2000)


@pytest.fixture(scope="module")
def asym():
    return corpus.asymmetric(100)


@pytest.fixture(scope="module")
def integers50():
    B = corpus.integer_zeros(50)
    return B, perturbation_plan(B)


def test_symmetric_partial_sums_cancel():
    k = np.arange(1.0, 11.0)
    sides = TwoSided(k, k, 0.0)
    for n in range(11):
        assert partial_sums_S(sides, n, n) == 0.0


def test_partial_sums_arithmetic():
    sides = TwoSided(np.arange(1.0, 6.0), 2.0 * np.arange(1.0, 6.0), 0.0)
    assert partial_sums_S(sides, 2, 1) == pytest.approx(-1.0)
    assert partial_sums_S(TwoSided(np.array([1.0]), np.array([1.0]), 0.3), 0, 0) == 0.3


def test_partial_sums_index_range():
    with pytest.raises(IndexOutOfRange):
        partial_sums_S(TwoSided(np.array([1.0]), np.array([1.0]), 0.0), 2, 0)


def test_sinc_balanced_case():
    s = corpus.sinc(10_000)
    d = build_balanced_divisor(s, 10)
    assert (d.p_N, d.q_N, d.S_value, d.case) == (9, 9, 0.0, "balanced")
    xs = np.linspace(-9, 9, 400)
    exact = np.abs(np.sinc(xs))
    P = np.abs(np.array([d.P(x) for x in xs]))
    assert np.all(P >= exact / math.e - 1e-12)
    verify_divisor(d, s, xs)


def test_asymmetric_sweep_brackets(asym):
    d = build_balanced_divisor(asym, 20)
    assert d.case == "positive_sweep"
    tag, r, before, after = d.sweep[-1]
    assert tag == "plus" and after <= 0 < before
    # each earlier step was still positive
    assert all(s[3] > 0 for s in d.sweep[1:-1])
    # within one reciprocal zero of zero
    assert abs(d.S_value) <= 1.0 / TwoSided.from_entire(asym).pos[d.p_N - 1]


def test_negative_sweep_brackets():
    f = corpus.asymmetric(100).reflected()
    d = build_balanced_divisor(f, 20)
    assert d.case == "negative_sweep"
    _, _, before, after = d.sweep[-1]
    assert before < 0 <= after


def test_insufficient_zeros(sinc):
    with pytest.raises(InsufficientZeros):
        build_balanced_divisor(sinc, 5000)


@pytest.mark.parametrize("N", [5, 10, 20])
def test_sinc_divisor_verified(N):
    f = corpus.sinc(10_000)
    rep = verify_divisor(build_balanced_divisor(f, N), f, 400, slack=0.0)
    assert rep["passed"]


def test_convergence_on_disc():
    conv = divisor_convergence(corpus.sinc(10_000), [5, 10, 20])
    assert conv["monotone"]


def test_polynomial_divisor_is_itself():
    f = corpus.integer_zeros(6)
    d = build_balanced_divisor(f, 100)
    rep = verify_divisor(d, f, 200)
    assert rep["min_ratio"] == pytest.approx(1.0, rel=1e-12)
    assert rep["max_ratio"] == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("N", [5, 10, 20])
def test_unbalanced_selection_detected(sinc, asym, N):
    for f in (sinc, asym):
        d = build_balanced_divisor(f, N)
        verify_divisor(divisor_from_indices(f, d.p_N + 5, d.q_N), f, 400)
        with pytest.raises(InvariantViolation):
            verify_divisor(divisor_from_indices(f, d.p_N + 10, d.q_N), f, 400)


def test_containment(asym):
    for N in (5, 10, 20):
        d = build_balanced_divisor(asym, N)
        chosen = set(np.repeat(d.P.zeros.xs, d.P.zeros.mults).tolist())
        inside = {x for x in asym.zeros.xs.tolist() if abs(x) < N}
        assert inside <= chosen <= set(asym.zeros.xs.tolist())


def test_integer_plan_budgets():
    B = corpus.integer_zeros(20)
    plan = perturbation_plan(B)
    assert np.all(plan.rho == 1.0)
    assert np.all(plan.delta <= 1 / (4 * (1 + plan.zeros ** 2)) + 1e-15)


def test_plan_constant_against_direct_sum():
    plan = perturbation_plan(corpus.integer_zeros(100))
    direct = 2 * sum(1 / (1 + k * k) for k in range(1, 101))
    assert plan.C == pytest.approx(8 * math.exp(direct), rel=1e-13)
    # the infinite sum is (pi coth(pi) - 1)/2; the stored zeros miss a tail below 1/100 per side
    infinite = (math.pi / math.tanh(math.pi) - 1) / 2
    assert 0 < infinite - direct / 2 < 1 / 100


def test_plan_rejects_origin():
    with pytest.raises(ZeroAtOrigin):
        perturbation_plan(EntireFn.polynomial([1.0, 2.0], m=1))


def test_separation_uses_distinct_magnitudes():
    rho = separation_radii(np.array([-2.0, -0.5, 0.5, 2.0, 2.25]))
    np.testing.assert_allclose(rho, [0.25, 0.5, 0.5, 0.25, 0.25])


def test_zero_perturbation(integers50):
    B, plan = integers50
    rep = perturb_and_compare(B, plan, plan.zeros.copy())
    # D = B, so the ratio |B'|/(C |D'|) is exactly 1/C
    assert rep["passed"] and rep["max_ratio"] == pytest.approx(1 / plan.C)


def test_budget_violation(integers50):
    B, plan = integers50
    b = plan.zeros.copy()
    b[3] += 2 * plan.delta[3]
    with pytest.raises(BudgetViolated):
        perturb_and_compare(B, plan, b)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_random_full_budget_perturbations(seed):
    B = corpus.integer_zeros(50)
    plan = perturbation_plan(B)
    rng = np.random.default_rng(seed)
    b = plan.zeros + plan.delta * rng.choice([-1.0, 1.0], size=plan.zeros.size)
    assert perturb_and_compare(B, plan, b)["passed"]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 30), min_size=1, max_size=10), st.lists(st.integers(1, 30), min_size=1, max_size=10),
       st.integers(0, 10), st.integers(0, 10))
def test_partial_sums_against_fraction_oracle(pos, neg, n, m):
    from fractions import Fraction
    sides = TwoSided(np.sort(np.array(pos, float)), np.sort(np.array(neg, float)), 0.0)
    n, m = min(n, len(pos)), min(m, len(neg))
    want = -sum(Fraction(1, x) for x in sorted(pos)[:n]) + sum(Fraction(1, x) for x in sorted(neg)[:m])
    assert partial_sums_S(sides, n, m) == pytest.approx(float(want), abs=1e-14)
