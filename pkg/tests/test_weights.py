import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polydensity.errors import NoVanishingSequence, ParseError, ValidationError
from polydensity.weights import (GridWeight, check_theorem12_conditions, classify_space, moment_boundedness,
                                 unbounded_witness, upper_baire, weight_from_json)

weight_values = st.lists(st.sampled_from([0.0, 0.0, 0.1, 0.25, 0.5, 0.8, 1.0]), min_size=2, max_size=30)


def grid(ws):
    return GridWeight(np.arange(len(ws), dtype=float) * 0.5, ws)


def window_max(ws):
    # independent loop form of the one-step window maximum
    out = []
    for i in range(len(ws)):
        out.append(max(ws[max(i - 1, 0): i + 2]))
    return out


def test_constant_weight_unchanged():
    w = grid([0.5] * 7)
    assert upper_baire(w).ws.tolist() == [0.5] * 7


def test_interior_dip_filled():
    w = grid([0.8, 0.8, 0.1, 0.8, 0.8])
    assert upper_baire(w).ws.tolist() == [0.8] * 5


def test_indicator_spreads_to_neighbours():
    w = grid([0, 0, 0, 1.0, 0, 0])
    assert upper_baire(w).ws.tolist() == [0, 0, 1, 1, 1, 0]


def test_weight_validation():
    with pytest.raises(ValidationError):
        GridWeight([0, 1], [0.5, 1.5])
    with pytest.raises(ValidationError):
        GridWeight([0, 0], [0.5, 0.5])
    with pytest.raises(ValidationError):
        GridWeight([0, 1, 3], [1, 1, 1], resolution=1.0)


def test_weight_json_errors():
    with pytest.raises(ParseError, match="line"):
        weight_from_json("{", source="w.json")
    with pytest.raises(ParseError, match=r"ws\[1\]"):
        weight_from_json('{"xs": [0, 1], "ws": [1, "a"]}')
    w = weight_from_json(grid([0.2, 0.4]).to_json())
    assert w.ws.tolist() == [0.2, 0.4]


def test_classify_ones():
    c = classify_space(GridWeight.sample(lambda x: np.ones_like(x), -3, 3, 61))
    assert (c.normed, c.banach_c0w, c.banach_n0w) == (True, True, True)
    assert c.sense == "grid"


def test_classify_gaussian():
    c = classify_space(GridWeight.sample(lambda x: np.exp(-x * x), -10, 10, 2001))
    # the minimum on the grid is at the endpoints and is positive
    assert c.details["min_h_on_support"] > 0
    assert c.banach_c0w and c.normed


def test_classify_indicator_of_unit_interval():
    xs = np.linspace(-2, 3, 51)
    c = classify_space(GridWeight(xs, ((xs >= 0) & (xs <= 1)).astype(float)))
    assert c.banach_n0w
    assert not c.banach_c0w
    assert c.details["min_h_on_support"] == 1.0


def test_classify_zero_weight():
    c = classify_space(grid([0.0, 0.0, 0.0]))
    assert (c.normed, c.banach_c0w, c.banach_n0w) == (False, False, False)


def test_moments_of_ones():
    w = GridWeight.sample(lambda x: np.ones_like(x), -2, 2, 41)
    assert moment_boundedness(w, 3) == [1, 2, 4, 8]


def test_moment_of_exponential_weight():
    w = GridWeight.sample(lambda x: np.exp(-np.abs(x)), -20, 20, 40001)
    # x e^{-x} peaks at x = 1
    assert abs(moment_boundedness(w, 1)[1] - 1 / math.e) < w.resolution ** 2


def test_moments_of_zero_weight():
    assert moment_boundedness(grid([0.0] * 5), 4) == [0.0] * 5


def half_disc():
    xs = np.linspace(-1, 1, 2001)[1:-1]
    return xs, GridWeight(xs, np.sqrt(1 - xs * xs))


def test_vanishing_condition_fails_for_reciprocal():
    xs, w = half_disc()
    rep = check_theorem12_conditions(1 / np.sqrt(1 - xs * xs), w, 5, 0.5)
    assert not rep["vanishing_holds"]
    assert all(s is None or s >= 1.0 for _, s in rep["vanishing_sups"])


@pytest.mark.parametrize("eps", [0.5, 0.1, 0.07])
def test_vanishing_condition_holds_for_constant(eps):
    # eps below the smallest positive grid value of h is not resolvable
    xs, w = half_disc()
    rep = check_theorem12_conditions(np.ones_like(xs), w, 5, eps)
    assert rep["vanishing_holds"] and rep["continuity_holds"]
    assert eps > rep["min_positive_h"]


def test_compact_support_polynomial():
    xs = np.linspace(-3, 3, 301)
    w = GridWeight(xs, (np.abs(xs) <= 1).astype(float))
    rep = check_theorem12_conditions(xs ** 3 - 2 * xs, w, 4, 1e-3)
    assert rep["continuity_holds"] and rep["vanishing_holds"]


def test_missing_sample_where_weight_positive():
    xs = np.linspace(0, 1, 11)
    f = np.ones_like(xs)
    f[3] = np.nan
    with pytest.raises(ValidationError, match="missing"):
        check_theorem12_conditions(f, GridWeight(xs, np.ones_like(xs)), 3, 0.1)


def test_missing_sample_off_support_is_fine():
    xs = np.linspace(0, 1, 11)
    ws = np.ones_like(xs)
    ws[:4] = 0.0
    f = np.ones_like(xs)
    f[0] = np.nan
    check_theorem12_conditions(f, GridWeight(xs, ws), 3, 0.1)


def refining_grid(values):
    # x_n = 1/n for n = 1..8 plus a coarse filler keeping the spacing bounded
    n = np.arange(1, len(values) + 1)
    pts = dict(zip((1.0 / n).tolist(), values))
    filler = np.linspace(1.0, 3.0, 9)[1:]
    for x in filler:
        pts[float(x)] = 1.0
    xs = np.array(sorted(pts))
    return GridWeight(xs, [pts[x] for x in xs])


def test_witness_geometric_decay():
    vals = [4.0 ** -n for n in range(1, 9)]
    wit = unbounded_witness(refining_grid(vals), 0.0)
    by_x = dict(zip(wit.xs.tolist(), wit.F.tolist()))
    for n in range(1, 9):
        assert by_x[1.0 / n] == 2.0 ** (n - 1)
    assert wit.bounded_product
    assert [w for _, w in wit.windows] == sorted(w for _, w in wit.windows)


def test_witness_harmonic_decay():
    vals = [1.0 / n for n in range(1, 9)]
    wit = unbounded_witness(refining_grid(vals), 0.0)
    by_x = dict(zip(wit.xs.tolist(), wit.F.tolist()))
    for n in range(2, 9):
        assert by_x[1.0 / n] == pytest.approx(math.sqrt(n - 1))


def test_witness_needs_decay():
    with pytest.raises(NoVanishingSequence):
        unbounded_witness(grid([0.9, 0.8, 0.85, 0.9, 0.95]), 0.0)


@settings(max_examples=100, deadline=None)
@given(weight_values)
def test_regularization_against_loop_oracle(ws):
    h = upper_baire(grid(ws)).ws.tolist()
    assert h == window_max(ws)


@settings(max_examples=100, deadline=None)
@given(weight_values)
def test_regularization_dominates(ws):
    w = grid(ws)
    h = upper_baire(w)
    hh = upper_baire(h)
    assert np.all(h.ws >= w.ws)
    assert np.all(hh.ws >= h.ws)
    if len(set(ws)) == 1:
        assert np.array_equal(hh.ws, h.ws)


@settings(max_examples=100, deadline=None)
@given(weight_values)
def test_c0w_implies_normed(ws):
    c = classify_space(grid(ws))
    assert not c.banach_c0w or c.normed


@settings(max_examples=100, deadline=None)
@given(weight_values, st.integers(0, 6))
def test_moments_monotone_under_domination(ws, n):
    w = grid(ws)
    big = grid(np.maximum(ws, 0.5).tolist())
    for a, b in zip(moment_boundedness(w, n), moment_boundedness(big, n)):
        assert a <= b
