import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fann import kernels
from fann.errors import DimensionMismatch
from fann.geometry import (
    Box,
    FRegion,
    PolyCurve,
    Segment,
    ball_hit_interval,
    box_hit_interval,
    dist_point_box,
    dist_point_segment,
    f_distance,
    f_membership,
    param_of_point,
)

UNIT = Box(np.array([0.0, 0.0]), np.array([1.0, 1.0]))
coord = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


def seg(a, b):
    return Segment(np.asarray(a, float), np.asarray(b, float))


@pytest.mark.parametrize("p, t", [((1, 0), 0.5), ((0, 0), 0.0), ((1.5, 1e-12), 0.75)])
def test_param_of_point(p, t):
    assert param_of_point(seg((0, 0), (2, 0)), p) == pytest.approx(t)


@pytest.mark.parametrize("p, d", [((2, 0), 1.0), ((0.5, 0.5), 0.0), ((2, 2), math.sqrt(2))])
def test_dist_point_box(p, d):
    assert dist_point_box(p, UNIT) == pytest.approx(d)


def test_box_hit_interval_examples():
    assert box_hit_interval(seg((-1, 0.5), (2, 0.5)), UNIT) == pytest.approx((1 / 3, 2 / 3))
    assert box_hit_interval(seg((0, 5), (1, 5)), UNIT, 1.0) is None
    assert box_hit_interval(seg((-1, 0), (3, 0)), UNIT, 0.5) == pytest.approx((0.125, 0.625))


def test_fattened_interval_matches_dense_scan():
    s = seg((-1, 0), (3, 0))
    ts = np.arange(0, 1 + 1e-4, 1e-4)
    inside = [t for t in ts if dist_point_box(s.at(t), UNIT) <= 0.5 + 1e-12]
    lo, hi = box_hit_interval(s, UNIT, 0.5)
    assert lo == pytest.approx(min(inside), abs=1e-4)
    assert hi == pytest.approx(max(inside), abs=1e-4)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        dist_point_box((1, 2, 3), UNIT)


def test_f_membership_examples():
    gamma = Box(np.array([2.0, 2.0]), np.array([3.0, 3.0]))
    f = FRegion(UNIT, gamma)
    assert f_membership((-1, -1), f)
    assert not f_membership((5, 0), f)
    assert f_membership((0.5, 0.5), FRegion(UNIT, Box(np.array([7.0, -3.0]), np.array([8.0, -2.0]))))


def test_f_distance_examples():
    gamma = Box(np.array([4.0, 0.0]), np.array([5.0, 1.0]))
    f = FRegion(UNIT, gamma)
    assert f_distance((0.5, 0.5), f) == 0.0
    assert f_distance((2, 0), f) == pytest.approx(1.0, abs=1e-9)
    assert f_distance((2, 0), f, method="search") == pytest.approx(1.0, abs=1e-6)
    assert f_distance((17, -3), FRegion(UNIT, UNIT)) == 0.0


def test_f_distance_monte_carlo():
    # Nearest point to q=(2,0) among points of segments y->x' hitting c: sample y in gamma
    # and the segment parameter, keep only those whose segment meets c.
    rng = np.random.default_rng(0)
    gamma = Box(np.array([4.0, 0.0]), np.array([5.0, 1.0]))
    q = np.array([2.0, 0.0])
    best = math.inf
    ys = rng.uniform(gamma.lo, gamma.hi, (4000, 2))
    cs = rng.uniform(UNIT.lo, UNIT.hi, (4000, 2))
    for y, c in zip(ys, cs):
        # points x beyond c on the ray y -> c all lie in F(c, gamma)
        u = c - y
        s = max(0.0, float((q - c) @ u) / float(u @ u))
        best = min(best, float(np.linalg.norm(c + s * u - q)))
    assert best == pytest.approx(1.0, abs=2e-2)
    assert best >= 1.0 - 1e-9


@given(st.tuples(coord, coord), st.tuples(coord, coord), st.tuples(coord, coord))
def test_f_distance_routes_agree(q, c0, g0):
    c = Box(np.array(c0), np.array(c0) + 0.7)
    g = Box(np.array(g0), np.array(g0) + 0.4)
    f = FRegion(c, g)
    exact = f_distance(q, f)
    search = f_distance(q, f, method="search")
    assert exact == pytest.approx(search, abs=1e-6)
    assert (exact == 0.0) == f_membership(q, f) or exact < 1e-9


@given(st.tuples(coord, coord), st.tuples(coord, coord), st.floats(0, 2))
def test_ball_hit_interval_points_are_inside(a, b, r):
    s = seg(a, b)
    center = np.array([0.5, 0.5])
    hit = ball_hit_interval(s, center, r)
    if hit is None:
        assert dist_point_segment(center, s) > r - 1e-9
    else:
        for t in hit:
            assert np.linalg.norm(s.at(t) - center) <= r + 1e-7


def test_polycurve_padding_and_collapse():
    c = PolyCurve([[0, 0], [1, 0]])
    p = c.padded(4)
    assert p.m == 4 and np.array_equal(p.vertices[-1], [1, 0])
    assert p.collapsed().m == 2


def test_segment_boxes_matches_scalar():
    rng = np.random.default_rng(3)
    lo = rng.uniform(-2, 2, (50, 3))
    hi = lo + 0.5
    p, q = rng.uniform(-3, 3, 3), rng.uniform(-3, 3, 3)
    t0, t1 = kernels.segment_boxes(p, q, lo, hi, 0.2)
    for i in range(50):
        hit = box_hit_interval(Segment(p, q), Box(lo[i], hi[i]), 0.2)
        if hit is None:
            assert t0[i] > t1[i]
        else:
            assert (t0[i], t1[i]) == pytest.approx(hit)
