import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from polydensity.corpus import lognormal_measure
from polydensity.errors import EmptyMeasure, ParseError, ValidationError
from polydensity.measure import (DiscreteMeasure, TiltMode, from_quadrature, gaussian_density, load_measure,
                                 lognormal_density, measure_from_json, measure_to_json, moments, save_measure,
                                 tilt)


def atoms_strategy(max_atoms=8):
    xs = st.lists(st.integers(-80, 80), min_size=1, max_size=max_atoms, unique=True)
    return xs.flatmap(lambda v: st.tuples(
        st.just(sorted(x / 8 for x in v)),
        st.lists(st.floats(0.01, 10.0), min_size=len(v), max_size=len(v))))


def test_moments_point_mass_at_origin():
    assert moments(DiscreteMeasure([0.0], [1.0]), 3) == [1, 0, 0, 0]


def test_moments_symmetric_two_point():
    assert moments(DiscreteMeasure([-1.0, 1.0], [0.5, 0.5]), 4) == [1, 0, 1, 0, 1]


def test_moments_direct_arithmetic():
    assert moments(DiscreteMeasure([1.0, 2.0], [1.0, 1.0]), 2) == [2, 3, 5]


def test_moments_cache_extends_consistently():
    mu = DiscreteMeasure([-2.0, 0.5, 3.0], [1.0, 2.0, 0.25])
    short = mu.moments(2)
    long = mu.moments(6)
    assert long[:3] == short
    assert long[6] == pytest.approx(64 + 2 * 0.5 ** 6 + 0.25 * 3 ** 6)


def test_abs_moments():
    mu = DiscreteMeasure([-2.0, 1.0], [1.0, 1.0])
    assert mu.abs_moments(3) == [2, 3, 5, 9]


def test_tilt_alpha_keeps_origin():
    nu = tilt(DiscreteMeasure([0.0], [1.0]), 2, TiltMode.ALPHA)
    assert nu.xs.tolist() == [0.0] and nu.masses.tolist() == [1.0]


def test_tilt_alpha_unit_atom():
    nu = tilt(DiscreteMeasure([1.0], [1.0]), 2, "ALPHA")
    assert nu.masses[0] == 0.25


def test_tilt_alpha2_empties_origin_measure():
    with pytest.raises(EmptyMeasure):
        tilt(DiscreteMeasure([0.0], [1.0]), 2, TiltMode.ALPHA2)


def test_tilt_alpha2_drops_origin_only():
    nu = tilt(DiscreteMeasure([-1.0, 0.0, 2.0], [1.0, 1.0, 1.0]), 1, TiltMode.ALPHA2)
    assert nu.xs.tolist() == [-1.0, 2.0]


def test_tilt_plain_is_identity():
    mu = DiscreteMeasure([1.0, 2.0], [1.0, 3.0])
    assert tilt(mu, 3, TiltMode.PLAIN) is mu


def test_tilt_rejects_small_alpha():
    with pytest.raises(ValueError):
        tilt(DiscreteMeasure([1.0], [1.0]), 0.5, TiltMode.ALPHA)


def test_quadrature_midpoints():
    mu = from_quadrature(lambda x: np.ones_like(x), (0.0, 1.0), 4)
    assert mu.xs.tolist() == [0.125, 0.375, 0.625, 0.875]
    assert mu.masses.tolist() == [0.25] * 4


def test_quadrature_gaussian_mass_against_quad():
    oracle, _ = integrate.quad(lambda x: math.exp(-x * x), -6, 6, epsabs=1e-14)
    mu = from_quadrature(gaussian_density, (-6.0, 6.0), 200)
    assert abs(mu.total_mass - oracle) < 1e-6
    assert abs(mu.total_mass - math.sqrt(math.pi)) < 1e-6


def test_quadrature_lognormal_mean():
    # closed-form mean of the standard log-normal distribution
    mu = lognormal_measure(400)
    assert abs(mu.moments(1)[1] - math.exp(0.5)) < 1e-4


def test_quadrature_lognormal_linear_grid_mass():
    mu = from_quadrature(lognormal_density, (1e-6, 50.0), 400)
    oracle, _ = integrate.quad(lambda x: float(lognormal_density(np.array([x]))[0]), 1e-6, 50, limit=200)
    assert mu.total_mass == pytest.approx(oracle, rel=2e-2)


def test_quadrature_all_zero_masses():
    with pytest.raises(EmptyMeasure):
        from_quadrature(lambda x: np.zeros_like(x), (0.0, 1.0), 4)


def test_quadrature_rejects_bad_input():
    with pytest.raises(ValueError):
        from_quadrature(gaussian_density, (1.0, 0.0), 4)
    with pytest.raises(ValueError):
        from_quadrature(gaussian_density, (0.0, 1.0), 1)


def test_round_trip_random_measure(tmp_path):
    rng = np.random.default_rng(3)
    mu = DiscreteMeasure(np.sort(rng.normal(size=10)), rng.uniform(0.1, 2.0, size=10))
    path = tmp_path / "m.json"
    save_measure(mu, path)
    assert load_measure(path) == mu


def test_zero_mass_rejected():
    with pytest.raises(ValidationError):
        measure_from_json('{"atoms": [{"x": 1, "mass": 0}]}')


def test_unsorted_atoms_are_sorted():
    mu = measure_from_json('{"atoms": [{"x": 2, "mass": 1}, {"x": -1, "mass": 3}]}')
    assert mu.xs.tolist() == [-1.0, 2.0]
    assert mu.masses.tolist() == [3.0, 1.0]


def test_duplicate_atoms_rejected():
    with pytest.raises(ValidationError):
        measure_from_json('{"atoms": [{"x": 1, "mass": 1}, {"x": 1, "mass": 2}]}')


def test_parse_error_has_location():
    with pytest.raises(ParseError, match="line 1 column"):
        measure_from_json('{"atoms": [', source="m.json")
    with pytest.raises(ParseError, match=r"atoms\[0\]"):
        measure_from_json('{"atoms": [{"x": 1}]}')
    with pytest.raises(ParseError, match="mass"):
        measure_from_json('{"atoms": [{"x": 1, "mass": "a"}]}')


@settings(max_examples=60, deadline=None)
@given(atoms_strategy(), st.floats(1.0, 4.0))
def test_tilt_identity_between_modes(data, alpha):
    xs, ms = data
    mu = DiscreteMeasure(xs, ms)
    a1 = tilt(mu, alpha, TiltMode.ALPHA)
    assert np.array_equal(a1.xs, mu.xs)
    assert np.all(a1.masses <= mu.masses)
    nz = mu.xs != 0
    if not np.any(nz):
        return
    a2 = tilt(mu, alpha, TiltMode.ALPHA2)
    np.testing.assert_allclose(a1.masses[nz] * np.abs(mu.xs[nz]) ** alpha, a2.masses, rtol=1e-12)


@settings(max_examples=60, deadline=None)
@given(atoms_strategy(), atoms_strategy())
def test_moments_additive_on_disjoint_supports(d1, d2):
    x1, m1 = d1
    x2, m2 = d2
    x2 = [x + 20.0 for x in x2]
    mu1, mu2 = DiscreteMeasure(x1, m1), DiscreteMeasure(x2, m2)
    both = mu1.union(mu2)
    for a, b, c in zip(both.moments(5), mu1.moments(5), mu2.moments(5)):
        assert a == pytest.approx(b + c, rel=1e-12, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(atoms_strategy(12))
def test_save_load_identity(data):
    mu = DiscreteMeasure(*data)
    assert measure_from_json(measure_to_json(mu)) == mu
