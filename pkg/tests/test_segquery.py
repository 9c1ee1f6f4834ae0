import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fann.geometry import Box, PolyCurve, Segment, dist_point_line
from fann.grids import Grids, GridSet
from fann.segquery import (
    NO_FOR_ANN,
    NULL,
    LineSet,
    PackedLine,
    SegQueryOutcome,
    SegQueryStructure,
    answer_valid,
    approx_nearest_line_to_point,
    approx_nearest_point_to_line,
    brute_segment_query,
    build_canonical_structure,
    build_lines,
    f_interval_on_line,
    hyperplane_basis,
)
from fann.selftest import no_for_ann_justified

TWO = GridSet([[0, 0], [2, 0]], 1.0)
UNIT = Box(np.array([0.0, 0.0]), np.array([1.0, 1.0]))


def seg(a, b):
    return Segment(np.asarray(a, float), np.asarray(b, float))


def test_brute_segment_query_examples():
    one = GridSet([[0, 0]], 1.0)
    assert brute_segment_query(one, seg((-1, 0.5), (2, 0.5))) == SegQueryOutcome.hit((0, 0))
    assert brute_segment_query(one, seg((-1, 5), (2, 5)), 0.1).is_null
    assert brute_segment_query(TWO, seg((-1, 0.5), (4, 0.5))) == SegQueryOutcome.hit((0, 0))
    assert brute_segment_query(TWO, seg((4, 0.5), (-1, 0.5))) == SegQueryOutcome.hit((2, 0))


def test_answer_valid_examples():
    one = GridSet([[0, 0]], 1.0)
    pq = seg((-1, 0.5), (2, 0.5))
    assert answer_valid(one, pq, 0.0, SegQueryOutcome.hit((0, 0)))
    miss = seg((-1, 5), (2, 5))
    assert answer_valid(one, miss, 0.1, NULL)
    assert not answer_valid(one, miss, 0.1, SegQueryOutcome.hit((0, 0)))
    boxes = GridSet([[0, 0], [10, 0]], 1.0)
    along = seg((-5, 0.5), (20, 0.5))
    assert not answer_valid(boxes, along, 0.1, SegQueryOutcome.hit((10, 0)))
    assert answer_valid(boxes, along, 0.1, SegQueryOutcome.hit((0, 0)))
    with pytest.raises(ValueError):
        answer_valid(boxes, along, 0.1, NO_FOR_ANN)


def test_build_lines_horizontal_edge():
    lines = build_lines([[[0, 0], [1, 0]]], 0.4, 1.0)
    assert len(lines) == 9
    heights = sorted(round(float(l.origin[1]), 9) for l in lines)
    assert heights == pytest.approx(np.arange(-1.6, 1.61, 0.4))
    assert all(np.allclose(l.direction, [1, 0]) for l in lines)


def test_zero_length_edge_adds_no_lines():
    assert len(build_lines([[[0, 0], [0, 0], [1, 0]]], 0.4, 1.0)) == 9


@pytest.mark.parametrize("d", [2, 3])
def test_lines_cover_edge_neighbourhood(d):
    rng = np.random.default_rng(d)
    eps, delta = 0.45, 1.0
    v = rng.normal(size=(2, d))
    ls = LineSet(build_lines([v], eps, delta), d)
    u = (v[1] - v[0]) / np.linalg.norm(v[1] - v[0])
    basis = hyperplane_basis(u)
    for _ in range(300):
        off = rng.normal(size=d - 1)
        off *= rng.uniform(0, delta) / np.linalg.norm(off)
        x = v[0] + rng.uniform(-3, 3) * u + off @ basis
        assert ls.distances(x).min() <= eps * delta + 1e-9


def test_hyperplane_basis_orthonormal():
    u = np.array([0.6, 0.0, 0.8])
    B = hyperplane_basis(u)
    assert np.allclose(B @ B.T, np.eye(2))
    assert np.allclose(B @ u, 0)


def test_nearest_point_and_line():
    pts = np.array([[0.0, 0.0], [5.0, 5.0]])
    assert np.array_equal(approx_nearest_point_to_line(pts, [0, 0], [1, 0]), [0, 0])
    lines = [PackedLine(np.zeros(2), np.array([1.0, 0.0]), 0), PackedLine(np.array([0.0, 10.0]), np.array([1.0, 0.0]), 1)]
    assert approx_nearest_line_to_point(lines, (3, 2)) == 0
    assert approx_nearest_line_to_point(lines, (3, 10)) == 1


def test_f_interval_on_line_examples():
    axis = PackedLine(np.zeros(2), np.array([1.0, 0.0]), 0)
    gamma = Box(np.array([4.0, 0.0]), np.array([5.0, 1.0]))
    lo, hi = f_interval_on_line(axis, UNIT, gamma, 0.25, 1e-10, 1e6)
    assert lo == -np.inf
    assert hi == pytest.approx(1.25, abs=1e-6)
    assert f_interval_on_line(axis, UNIT, UNIT, 0.25, 1e-10, 1e6) == (-np.inf, np.inf)
    high = Box(np.array([0.0, 50.0]), np.array([1.0, 51.0]))
    higher = Box(np.array([0.0, 60.0]), np.array([1.0, 61.0]))
    assert f_interval_on_line(axis, higher, high, 0.1, 1e-10, 1e6) is None
    # Extending from gamma back through c does reach the axis.
    assert f_interval_on_line(axis, high, higher, 0.1, 1e-10, 1e6) is not None


def test_f_interval_matches_membership_scan():
    # dist(line(t), F) <= r along the axis, sampled at step 1e-3 through the exact distance.
    from fann.geometry import FRegion, f_distance

    axis = PackedLine(np.zeros(2), np.array([1.0, 0.0]), 0)
    gamma = Box(np.array([4.0, 0.0]), np.array([5.0, 1.0]))
    f = FRegion(UNIT, gamma)
    ts = np.arange(-3, 5, 1e-3)
    inside = [t for t in ts if f_distance((t, 0.0), f) <= 0.25]
    assert max(inside) == pytest.approx(1.25, abs=2e-3)


def test_empty_corpus_structure():
    s = SegQueryStructure([], 0.4, 1.0)
    assert len(s.G1) == 0 and len(s.lines) == 0
    assert s.query(seg((0, 0), (1, 1))).is_null


def test_single_vertex_partition_count():
    eps, delta = 0.45, 1.0
    s = build_canonical_structure([[[0.3, 0.2]]], eps, delta)
    part = s.partition(0)
    # Independent per-(c, gamma) recomputation of the interval endpoints.
    line = s.lines[0]
    ends = []
    for gamma in s.grids.G3.cells:
        for c in s.G1.cells:
            iv = f_interval_on_line(line, s.G1.box(c), s.G1.box(gamma), 2 * eps * delta, s.tol, s.tmax)
            if iv is not None:
                ends.extend(e for e in iv if np.isfinite(e))
    ends = np.sort(ends)
    distinct = 0
    last = -np.inf
    for e in ends:
        if e - last > s.tol:
            distinct += 1
            last = e
    assert len(part) == 1 + distinct


def test_first_cell_is_a_member():
    s = build_canonical_structure([[[0.0, 0.0], [1.0, 0.5]]], 0.45, 1.0)
    rng = np.random.default_rng(0)
    G3 = s.grids.G3
    for _ in range(40):
        li = int(rng.integers(len(s.lines)))
        gamma = G3.cells[int(rng.integers(len(G3)))]
        xi = int(rng.integers(len(s.partition(li))))
        look = s.lookup(li, gamma, xi)
        if look.first is not None:
            assert look.first in set(look.members.tolist())


def test_far_segment_is_null_or_certified_no():
    s = SegQueryStructure([[[0.0, 0.0], [1.0, 0.0]]], 0.4, 1.0)
    for e in (seg((50, 50), (60, 50)), seg((0, 40), (1, 41)), seg((-30, 3), (30, 3))):
        out = s.query(e)
        assert out.is_null or (out.is_no and no_for_ann_justified(s, e))


@pytest.mark.parametrize("mode", ["local", "global"])
def test_canonical_answers_valid(mode):
    rng = np.random.default_rng(7)
    eps, delta = 0.4, 1.0
    T = [np.cumsum(rng.normal(size=(3, 2)), axis=0) for _ in range(2)]
    s = SegQueryStructure(T, eps, delta, mode=mode)
    for _ in range(60 if mode == "local" else 15):
        c = T[int(rng.integers(2))]
        a = int(rng.integers(2))
        e = Segment(c[a] + rng.normal(0, 0.3, 2), c[a + 1] + rng.normal(0, 0.3, 2))
        out = s.query(e)
        if out.is_no:
            assert no_for_ann_justified(s, e)
        else:
            assert answer_valid(s.G1, e, 11 * eps * delta, out, 1e-9)


def test_segment_starting_at_vertex_gets_nearby_cell():
    eps, delta = 0.4, 1.0
    s = SegQueryStructure([[[0.0, 0.0], [2.0, 1.0]]], eps, delta)
    e = seg((0.0, 0.0), (2.0, 1.0))
    out = s.query(e)
    assert out.is_cell
    box = s.G1.box(out.cell)
    gap = np.maximum(np.maximum(box.lo - e.start, 0), e.start - box.hi)
    assert np.linalg.norm(gap) <= 7 * eps * delta


coords = st.floats(-3, 3)


@given(st.tuples(coords, coords), st.tuples(coords, coords))
def test_brute_answer_exact(p, q):
    g = Grids([PolyCurve([[0.0, 0.0], [1.0, 1.0]])], 0.4, 1.0)
    e = seg(p, q)
    out = brute_segment_query(g.G1, e)
    assert answer_valid(g.G1, e, 0.0, out, 1e-12)


def test_one_dimensional_structure():
    s = SegQueryStructure([[[0.0], [1.0]]], 0.4, 1.0)
    for a, b in [(-3, 3), (3, -3), (0.5, 0.6), (5, 6)]:
        e = seg([a], [b])
        out = s.query(e)
        assert answer_valid(s.G1, e, 4.4, out, 1e-9)
