import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from fann.errors import DimensionMismatch
from fann.frechet import (
    discrete_frechet,
    frechet_decide,
    frechet_value,
    resample,
    segment_curve_decide,
    subsegment_matchable,
)
from fann.geometry import Segment

curves = hnp.arrays(np.float64, st.tuples(st.integers(1, 5), st.just(2)), elements=st.floats(-3, 3))


def seg(a, b):
    return Segment(np.asarray(a, float), np.asarray(b, float))


def test_decide_examples():
    a = [[0, 0], [1, 0], [3, 2]]
    assert frechet_decide(a, a, 0.0)
    assert not frechet_decide([[0, 0], [1, 0]], [[0, 1], [1, 1]], 0.99)
    assert frechet_decide([[0, 0], [1, 0]], [[0, 1], [1, 1]], 1.0)
    assert not frechet_decide([[0, 0], [2, 0]], [[0, 0], [1, 0.5], [2, 0]], 0.49)
    assert frechet_decide([[0, 0], [2, 0]], [[0, 0], [1, 0.5], [2, 0]], 0.5)


def test_value_examples():
    a = [[0, 0], [1, 0], [3, 2]]
    assert frechet_value(a, a) == pytest.approx(0.0, abs=1e-7)
    assert frechet_value([[0, 0], [1, 0]], [[0, 1], [1, 1]]) == pytest.approx(1.0, abs=1e-7)


def test_segment_decide_examples():
    assert segment_curve_decide(seg((0, 0), (1, 0)), [[0, 0], [1, 0]], 0.0)
    assert not segment_curve_decide(seg((0, 0), (1, 0)), [[0, 1], [1, 1]], 0.99)
    assert segment_curve_decide(seg((0, 0), (2, 0)), [[0, 0], [1, 0.5], [2, 0]], 0.5)


def test_subsegment_examples():
    xy = seg((0, 0), (10, 0))
    assert subsegment_matchable(xy, [[2, 0.1], [3, 0.1]], 0.1)
    assert not subsegment_matchable(xy, [[2, 0.1], [3, 0.1]], 0.05)
    assert not subsegment_matchable(xy, [[5, 0], [1, 0]], 0.5)


def test_discrete_examples():
    a = [[0, 0], [1, 0], [3, 2]]
    assert discrete_frechet(a, a) == 0.0
    assert discrete_frechet([[0, 0], [1, 0]], [[0, 1], [1, 1]]) == pytest.approx(1.0)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        frechet_decide([[0, 0]], [[0, 0, 0]], 1.0)


@given(curves, curves, st.floats(0, 4))
def test_decide_symmetric(a, b, r):
    assert frechet_decide(a, b, r) == frechet_decide(b, a, r)


@given(curves, curves, st.floats(0, 4), st.floats(0, 1))
def test_decide_monotone(a, b, r, extra):
    if frechet_decide(a, b, r):
        assert frechet_decide(a, b, r + extra)


@given(curves, curves, st.floats(0, 4))
def test_endpoints_necessary(a, b, r):
    if frechet_decide(a, b, r):
        assert np.linalg.norm(a[0] - b[0]) <= r + 1e-12
        assert np.linalg.norm(a[-1] - b[-1]) <= r + 1e-12


@given(curves, st.tuples(st.floats(-2, 2), st.floats(-2, 2)))
def test_translation(a, v):
    v = np.array(v)
    assert frechet_decide(a, a + v, float(np.linalg.norm(v)) * (1 + 1e-12) + 1e-15)


@given(curves, curves)
def test_value_consistent_with_decide(a, b):
    v = frechet_value(a, b)
    assert frechet_decide(a, b, v + 2e-7)
    assert not frechet_decide(a, b, v - 2e-7)
    assert discrete_frechet(a, b) >= v - 1e-7


@given(curves)
def test_vertex_duplication_invariance(a):
    doubled = np.repeat(a, 2, axis=0)
    assert frechet_value(a, doubled) == pytest.approx(0.0, abs=1e-7)


@given(hnp.arrays(np.float64, (2, 2), elements=st.floats(-3, 3)), curves, st.floats(0, 4))
def test_segment_decide_matches_general(s, c, r):
    assert segment_curve_decide(seg(s[0], s[1]), c, r) == frechet_decide(s, c, r)


@given(hnp.arrays(np.float64, (2, 2), elements=st.floats(-3, 3)), curves, st.floats(0, 4))
def test_full_segment_is_matchable(s, c, r):
    if segment_curve_decide(seg(s[0], s[1]), c, r):
        assert subsegment_matchable(seg(s[0], s[1]), c, r)


def test_resample_spacing():
    r = resample([[0, 0], [1, 0], [1, 1]], 0.3)
    gaps = np.linalg.norm(np.diff(r.vertices, axis=0), axis=1)
    assert gaps.max() <= 0.3 + 1e-12
    assert frechet_value(r, [[0, 0], [1, 0], [1, 1]]) == pytest.approx(0.0, abs=1e-7)


def test_zero_radius_identical_segment_is_matchable():
    s = np.array([[0.0, 1.0], [0.0, 4.85463985e-84]])
    assert subsegment_matchable(seg(s[0], s[1]), s, 0.0)
