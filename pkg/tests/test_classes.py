import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from polydensity.classes import (StarPoly, eq3410_sum, family_diagnostic, lambda_functionals, member_eq3410,
                                 member_lemma32, member_thm33, normality_bound_holds)
from polydensity.errors import ValidationError, WeightVanishes, ZeroAtOrigin
from polydensity.weights import GridWeight

QUAD = StarPoly([-1.0, 1.0])


def one(x):
    return np.ones_like(x)


def test_functionals_examples():
    assert lambda_functionals(QUAD) == (0.0, 2.0)
    assert lambda_functionals(StarPoly([1.0])) == (1.0, 1.0)
    assert lambda_functionals(StarPoly([1.0, 2.0, 4.0])) == (1.75, 1.3125)


def test_star_poly_validation():
    with pytest.raises(ZeroAtOrigin):
        StarPoly([0.0, 1.0])
    with pytest.raises(ValidationError):
        StarPoly([1.0, 1.0])


def test_derivatives_against_numpy():
    zs = [-2.5, -0.3, 1.0, 4.0]
    P = StarPoly(zs)
    coef = np.poly1d(zs, r=True) / np.prod(-np.array(zs))
    np.testing.assert_allclose(P.derivative_at_zeros(), coef.deriv()(np.sort(zs)), rtol=1e-12)
    np.testing.assert_allclose(P.log_abs_derivative(), np.log(np.abs(coef.deriv()(np.sort(zs)))), rtol=1e-12)


def test_lemma32_quadratic():
    assert 2 * math.exp(-1) == pytest.approx(0.7358, abs=1e-4)
    assert member_lemma32(QUAD, alpha=1, beta=1, gamma=1, delta_alpha=1, delta_beta=0.1)


def test_lemma32_small_budget():
    assert not member_lemma32(QUAD, alpha=1, beta=1, gamma=1, delta_alpha=0.7, delta_beta=0.1)


def test_lemma32_linear_family_breaks():
    verdicts = [member_lemma32(StarPoly([1.0 / n]), alpha=1, beta=1, gamma=1, delta_alpha=1, delta_beta=0.1)
                for n in (1, 2, 5, 10, 20, 50)]
    assert verdicts[0] and not verdicts[-1]
    # once broken it stays broken
    first_fail = verdicts.index(False)
    assert not any(verdicts[first_fail:])


def test_thm33_gaussian_thresholds():
    xs = np.linspace(-5, 5, 1001)
    narrow = GridWeight(xs, np.exp(-xs ** 2))
    wide = GridWeight(xs, np.exp(-xs ** 2 / 4))
    assert not member_thm33(QUAD, narrow, alpha=1, gamma=1, delta_alpha=1)
    assert member_thm33(QUAD, wide, alpha=1, gamma=1, delta_alpha=1)


def test_thm33_far_zero_keeps_membership():
    P = StarPoly([-1.5, 0.5, 2.0])

    def mu(x):
        return np.full_like(x, 10.0)

    # the bound with a factor 2 to spare
    need = 1 / (10 * np.abs(P.zeros) ** 2)
    assert np.all(np.abs(P.derivative_at_zeros()) >= 2 * need)
    assert member_thm33(P, mu, alpha=0.5, gamma=1, delta_alpha=10)
    Q = StarPoly([-1.5, 0.5, 2.0, 400.0])
    assert member_thm33(Q, mu, alpha=0.5, gamma=1, delta_alpha=10)


def test_thm33_weight_coverage():
    xs = np.linspace(-0.5, 0.5, 11)
    with pytest.raises(WeightVanishes, match="grid covers"):
        member_thm33(QUAD, GridWeight(xs, np.ones_like(xs)), alpha=1, gamma=1, delta_alpha=1)


def test_eq3410_examples():
    assert eq3410_sum(QUAD, one, beta=2, gamma=1) == pytest.approx(1.0)
    assert member_eq3410(QUAD, one, beta=2, gamma=1, C=2)
    assert not member_eq3410(QUAD, one, beta=2, gamma=1, C=0.5)
    with pytest.raises(ValidationError):
        member_eq3410(QUAD, one, beta=1, gamma=1, C=2)


def test_family_sinc_divisors():
    seq = [StarPoly(np.concatenate([-np.arange(N, 0, -1.0), np.arange(1.0, N + 1)])) for N in range(2, 30)]
    rep = family_diagnostic(seq, 2.0)
    assert rep["sup_l1"] == 0.0
    assert rep["sup_l2"] < math.pi ** 2 / 3
    assert all(v == 0.0 for v in rep["track_drift"].values())
    # consecutive divisors get closer on the disc
    d = rep["consecutive_distance"]
    assert d[-1] < d[0]


def test_family_linear_unbounded():
    seq = [StarPoly([1.0 / n]) for n in range(1, 11)]
    rep = family_diagnostic(seq, 1.0)
    assert rep["l2"] == pytest.approx([n * n for n in range(1, 11)])


def test_family_repeated():
    rep = family_diagnostic([QUAD] * 4, 3.0)
    assert rep["max_consecutive_distance"] == 0.0
    assert len(set(rep["l2"])) == 1


def test_family_empty():
    with pytest.raises(ValidationError):
        family_diagnostic([], 1.0)


zero_sets = st.lists(st.integers(-64, 64).filter(lambda v: v != 0), min_size=1, max_size=6, unique=True).map(
    lambda v: StarPoly([x / 8 for x in v]))
positive = st.floats(0.05, 5.0)


@settings(max_examples=100, deadline=None)
@given(zero_sets, positive, positive, positive, positive, positive, st.floats(1.0, 4.0))
def test_lemma32_monotone_in_budgets(P, a, b, g, da, db, k):
    if member_lemma32(P, a, b, g, da, db):
        assert member_lemma32(P, a, b, g, da * k, db)
        # the derivative constant is a lower bound, so shrinking it relaxes the test
        assert member_lemma32(P, a, b, g, da, db / k)


@settings(max_examples=100, deadline=None)
@given(zero_sets, positive, positive, positive, st.floats(1.0, 4.0))
def test_thm33_monotone_in_weight(P, a, g, da, k):
    def mu(x):
        return np.exp(-np.abs(x))

    def bigger(x):
        return np.minimum(1.0, k * np.exp(-np.abs(x)))

    if member_thm33(P, mu, a, g, da):
        assert member_thm33(P, bigger, a, g, da)
        assert member_thm33(P, mu, a, g, da * k)


@settings(max_examples=100, deadline=None)
@given(zero_sets, st.floats(0.2, 3.0), st.floats(0.05, 1.0), st.floats(0.01, 10.0), st.floats(1.0, 4.0))
def test_eq3410_monotone(P, beta, frac, C, k):
    gamma = beta * frac * 0.99
    assume(gamma > 0)
    if member_eq3410(P, one, beta, gamma, C):
        assert member_eq3410(P, one, beta, gamma, C * k)
        assert member_eq3410(P, lambda x: k * np.ones_like(x), beta, gamma, C)


@settings(max_examples=100, deadline=None)
@given(zero_sets)
def test_functionals_under_reflection(P):
    l1, l2 = lambda_functionals(P)
    r1, r2 = lambda_functionals(P.reflected())
    assert r1 == pytest.approx(l1, abs=1e-15)
    assert r2 == l2


@settings(max_examples=100, deadline=None)
@given(zero_sets, st.integers(0, 2 ** 32 - 1))
def test_normality_bound(P, seed):
    rng = np.random.default_rng(seed)
    z = 3.0 * np.sqrt(rng.uniform(size=25)) * np.exp(2j * np.pi * rng.uniform(size=25))
    assert normality_bound_holds(P, z)
