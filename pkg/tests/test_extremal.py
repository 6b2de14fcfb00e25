import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from polydensity.corpus import random_measures
from polydensity.errors import DegreeExceedsSupport, InvariantViolation
from polydensity.extremal import (LP, SUPW, M_n, NormParam, PolyReal, check_monotone_y, check_tilt_inequalities,
                                  classify_limit, complex_extremal, ortho_basis, rho_limit, rho_n, rho_sequence,
                                  sandwich_holds)
from polydensity.measure import DiscreteMeasure, from_quadrature, gaussian_density

TWO_POINT = DiscreteMeasure([-1.0, 1.0], [0.5, 0.5])


def small_measure():
    xs = st.lists(st.integers(-24, 24), min_size=3, max_size=8, unique=True)
    return xs.flatmap(lambda v: st.tuples(
        st.just(sorted(x / 4 for x in v if x != 0) or [1.0]),
        st.lists(st.floats(0.05, 5.0), min_size=len(v), max_size=len(v)),
    )).map(lambda t: DiscreteMeasure(t[0], t[1][: len(t[0])]))


def lp_norm(mu, p, coeffs):
    vals = np.polynomial.polynomial.polyval(mu.xs, coeffs)
    return float(np.sum(mu.masses * np.abs(vals) ** p) ** (1 / p))


def brent(fn, lo=-50, hi=50):
    r = minimize_scalar(fn, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12, "maxiter": 2000})
    return r.fun, r.x


def grid_oracle(mu, p, n):
    """Minimum of ``||p||`` over ``p(0) = 1`` by nested bounded scalar searches."""
    if n == 1:
        return brent(lambda c: lp_norm(mu, p, [1.0, c]))[0]
    return brent(lambda c2: brent(lambda c1: lp_norm(mu, p, [1.0, c1, c2]), -20, 20)[0], -20, 20)[0]


def test_two_point_recurrence():
    b = ortho_basis(TWO_POINT, 1)
    np.testing.assert_allclose(b.a, [0, 0], atol=1e-15)
    np.testing.assert_allclose(b.b, [1.0])
    np.testing.assert_allclose(b.h, [1.0, 1.0])


def test_basis_needs_atoms():
    with pytest.raises(DegreeExceedsSupport):
        ortho_basis(DiscreteMeasure([0.0], [1.0]), 1)


def test_hermite_recurrence():
    # monic recurrence of e^{-x^2}: b_k = k/2
    mu = from_quadrature(gaussian_density, (-6.0, 6.0), 100)
    b = ortho_basis(mu, 10)
    np.testing.assert_allclose(b.b, np.arange(1, 11) / 2, atol=1e-3)
    assert b.residual < 1e-10


def test_orthonormal_values_are_orthonormal():
    mu = random_measures(1, seed=5, atoms=(9, 9))[0]
    b = ortho_basis(mu, 6)
    G = (b.values * mu.masses[:, None]).T @ b.values
    np.testing.assert_allclose(G, np.eye(7), atol=1e-10)


def test_rho_point_mass_at_origin():
    r = rho_n(DiscreteMeasure([0.0], [1.0]), LP(2), 0.0, 3)
    assert r.value == 1.0
    assert r.minimizer.coeffs == (1.0,)


def test_rho_vanishes_on_support():
    r = rho_n(DiscreteMeasure([1.0], [1.0]), LP(2), 0.0, 1)
    assert r.value == 0.0
    np.testing.assert_allclose(r.minimizer.coeffs, [1.0, -1.0])


def test_rho_two_point():
    assert rho_n(TWO_POINT, LP(2), 0.0, 1).value == pytest.approx(1.0)
    r = rho_n(TWO_POINT, LP(2), 0.0, 2)
    assert r.value == 0.0
    np.testing.assert_allclose(r.minimizer.coeffs, [1.0, 0.0, -1.0], atol=1e-15)


def test_poly_real_trims_trailing_zeros():
    assert PolyReal((1.0, 2.0, 0.0)).coeffs == (1.0, 2.0)
    assert PolyReal(()).degree == -1


def test_norm_param_validation():
    with pytest.raises(ValueError):
        LP(0.5)
    assert NormParam.parse("sup").mode == "SUPW"
    assert NormParam.parse("3").p == 3.0


def test_M_point_mass():
    assert M_n(DiscreteMeasure([0.0], [1.0]), LP(2), 0.0, 0).value == pytest.approx(1.0)


def test_M_unbounded_when_rho_vanishes():
    r = M_n(TWO_POINT, LP(2), 0.0, 2)
    assert r.unbounded and r.value is None


def test_M_above_constant_bound():
    mu = DiscreteMeasure([-1.0, 0.5, 2.0], [1.0, 2.0, 1.0])
    assert mu.total_mass == 4.0
    for norm in (LP(1), LP(2), LP(3)):
        m = M_n(mu, norm, 0.25, 1)
        assert m.value >= 1 / 4
        assert m.value * norm.norm_of_values(mu, np.ones(3)) >= 1 - 1e-9


def test_monotone_in_y_two_point():
    rep = check_monotone_y(TWO_POINT, LP(2), 0.0, [0.0, 1.0, 2.0], 1)
    assert rep["nondecreasing"] and rep["even"]
    v = rep["values"]
    # kernel: |pi_0|^2 + |pi_1(iy)|^2 = 1 + y^2
    np.testing.assert_allclose(v, np.sqrt([1.0, 2.0, 5.0]))


def test_degree_zero_constant_in_y():
    rep = check_monotone_y(TWO_POINT, LP(2), 0.3, [0.0, 1.0, 4.0], 0)
    assert max(rep["values"]) == pytest.approx(min(rep["values"]), rel=1e-14)


def test_tilt_inequalities_random_measure():
    rng = np.random.default_rng(11)
    mu = DiscreteMeasure(np.sort(rng.uniform(-3, 3, 6)), rng.uniform(0.2, 2, 6))
    rep = check_tilt_inequalities(mu, LP(2), 0.5, 3)
    assert rep["rho_ok"] and rep["M_ok"]


def test_tilt_inequalities_small_z_slack():
    mu = DiscreteMeasure([-2.0, -0.5, 1.0, 3.0], [1.0, 1.0, 1.0, 1.0])
    rep = check_tilt_inequalities(mu, LP(2), 1e-6, 2)
    assert rep["rho_alpha2_prev"] > 1e3 * rep["abs_z_rho_alpha"]


def test_tilt_inequalities_degree_one():
    mu = DiscreteMeasure([-2.0, -0.5, 1.0, 3.0], [1.0, 2.0, 1.0, 0.5])
    rep = check_tilt_inequalities(mu, LP(2), 0.7, 1)
    from polydensity.measure import TiltMode, tilt
    mu2 = tilt(mu, 2.0, TiltMode.ALPHA2)
    assert rep["rho_alpha2_prev"] == pytest.approx(math.sqrt(mu2.total_mass), rel=1e-12)


def test_rho_limit_finite_support():
    mu = DiscreteMeasure([-2.0, -1.0, 0.5, 1.5, 3.0], [1.0, 1.0, 1.0, 1.0, 1.0])
    lim = rho_limit(mu, LP(2), "PLAIN", 0.25, 6, 0.01)
    assert lim.verdict == "CONVERGED_TO_ZERO"
    assert lim.diagnostics["converged_at"] == 5


def test_classify_limit_plateau_and_undecided():
    assert classify_limit([1.0, 0.9, 0.8, 0.8, 0.8], 0.01)[0] == "PLATEAU"
    assert classify_limit([1.0, 0.5, 0.25, 0.12, 0.06], 0.01)[0] == "UNDECIDED"


@pytest.mark.parametrize("p", [1.0, 1.5, 3.0])
@pytest.mark.parametrize("n", [1, 2])
def test_irls_against_scalar_search(p, n):
    for mu in random_measures(4, seed=int(10 * p) + n, atoms=(3, 3)):
        if np.any(mu.xs == 0):
            continue
        got = rho_n(mu, LP(p), 0.0, n).value
        want = grid_oracle(mu, p, n)
        assert got == pytest.approx(want, rel=1e-6, abs=1e-9)


def test_sup_norm_two_atoms():
    # max(w1 |1 + c x1|, w2 |1 + c x2|) is smallest where the two branches meet
    mu = DiscreteMeasure([-1.0, 2.0], [1.0, 1.0])
    got = rho_n(mu, SUPW, 0.0, 0).value
    assert got == pytest.approx(1.0)
    want = brent(lambda c: max(abs(1 - c), abs(1 + 2 * c)))[0]
    assert rho_n(DiscreteMeasure([-1.0, 2.0, 4.0], [1.0, 1.0, 1.0]), SUPW, 0.0, 1).value <= want + 1e-9


def test_sup_norm_against_scalar_search():
    mu = DiscreteMeasure([-1.5, 0.5, 2.0], [0.5, 1.0, 0.8])
    want = brent(lambda c: float(np.max(mu.masses * np.abs(1 + c * mu.xs))))[0]
    assert rho_n(mu, SUPW, 0.0, 1).value == pytest.approx(want, rel=1e-7)


def test_complex_point_sandwich():
    mu = random_measures(1, seed=2, atoms=(6, 6))[0]
    for norm in (LP(1), LP(2), LP(3), SUPW):
        r = M_n(mu, norm, 0.3 + 0.4j, 2)
        assert sandwich_holds(r)


@settings(max_examples=40, deadline=None)
@given(small_measure(), st.sampled_from([0.0, 0.3, -1.1]))
def test_rho_nonincreasing_and_M_nondecreasing(mu, z):
    seq = rho_sequence(mu, LP(2), z, mu.n_atoms + 1)
    assert all(b <= a * (1 + 1e-9) for a, b in zip(seq, seq[1:]))
    Ms = []
    for n in range(mu.n_atoms):
        m = M_n(mu, LP(2), z, n)
        Ms.append(math.inf if m.unbounded else m.value)
    assert all(b >= a * (1 - 1e-9) for a, b in zip(Ms, Ms[1:]))


@settings(max_examples=25, deadline=None)
@given(small_measure(), st.sampled_from([LP(1), LP(2), LP(3), SUPW]), st.integers(0, 2))
def test_sandwich_property(mu, norm, n):
    r = M_n(mu, norm, 0.5, n)
    assert sandwich_holds(r)


@settings(max_examples=40, deadline=None)
@given(small_measure(), st.sampled_from([1.0, 1.5, 2.0, 3.0]), st.floats(0.1, 10.0), st.integers(0, 2))
def test_scaling_homogeneity(mu, p, lam, n):
    a = rho_n(mu, LP(p), 0.37, n).value
    b = rho_n(mu.scaled(lam), LP(p), 0.37, n).value
    assert b == pytest.approx(lam ** (1 / p) * a, rel=1e-6, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(small_measure(), st.integers(0, 6))
def test_kernel_against_least_squares(mu, n):
    n = min(n, mu.n_atoms - 1)
    V = np.vander(mu.xs, n + 1, increasing=True)[:, 1:]
    sw = np.sqrt(mu.masses)
    if n == 0:
        want = float(np.linalg.norm(sw))
    else:
        scale = np.max(np.abs(V), axis=0)
        coef, *_ = np.linalg.lstsq(sw[:, None] * V / scale, -sw, rcond=None)
        want = float(np.linalg.norm(-sw - (sw[:, None] * V / scale) @ coef))
    got = rho_n(mu, LP(2), 0.0, n).value
    assert got == pytest.approx(want, rel=1e-8, abs=1e-12)


def test_complex_extremal_matches_kernel():
    mu = random_measures(1, seed=4, atoms=(7, 7))[0]
    z = 0.2 - 0.9j
    b = ortho_basis(mu, 4)
    v = b.orthonormal(np.array([z]), 4)[0]
    assert complex_extremal(mu, LP(2), z, 4) == pytest.approx(math.sqrt(np.sum(np.abs(v) ** 2)))


def test_monotone_y_detector():
    with pytest.raises(ValueError):
        check_monotone_y(TWO_POINT, LP(2), 0.0, [1.0, 0.5], 1)


def test_tilt_inequality_needs_nonzero_point():
    with pytest.raises(ValueError):
        check_tilt_inequalities(TWO_POINT, LP(2), 0.0, 1)


def test_rho_limit_rejects_increase(monkeypatch):
    import polydensity.extremal as ex
    monkeypatch.setattr(ex, "rho_sequence", lambda *a, **k: [1.0, 0.5, 0.7])
    with pytest.raises(InvariantViolation):
        ex.rho_limit(TWO_POINT, LP(2), "PLAIN", 0.0, 2, 0.01)
