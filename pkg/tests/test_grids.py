import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fann.errors import BadDelta, BadEpsilon
from fann.geometry import PolyCurve, dist_point_box
from fann.grids import (
    Grids,
    GridSet,
    cell_box,
    cell_of_point,
    cells_of_ball,
    check_params,
    grid_vertices,
    locate,
)
from fann.intervaltree import IntervalTree


def test_cell_of_point_examples():
    assert cell_of_point((0.7, -0.2), 0.5) == (1, -1)
    assert cell_of_point((0, 0), 0.5) == (0, 0)
    assert cell_of_point((1.0, 1.0), 0.5) == (2, 2)


def test_cells_of_ball_examples():
    assert cells_of_ball((0.3, 0.3), 0.0, 1.0) == [(0, 0)]
    assert sorted(cells_of_ball((0, 0), 0.25, 1.0)) == [(-1, -1), (-1, 0), (0, -1), (0, 0)]
    assert len(cells_of_ball((0.5, 0.5), 1.0, 1.0)) == 9


@given(st.tuples(st.floats(-3, 3), st.floats(-3, 3)), st.floats(0, 2), st.sampled_from([0.3, 0.5, 1.0]))
def test_cells_of_ball_matches_scan(center, radius, width):
    got = set(cells_of_ball(center, radius, width))
    c = np.array(center)
    lo = np.floor((c - radius) / width).astype(int) - 1
    hi = np.floor((c + radius) / width).astype(int) + 1
    want = {
        (i, j)
        for i in range(lo[0], hi[0] + 1)
        for j in range(lo[1], hi[1] + 1)
        if dist_point_box(c, cell_box((i, j), width)) <= radius
    }
    assert got == want


def test_g1_of_single_vertex():
    g = Grids([PolyCurve([[0.0, 0.0]])], 0.4, 1.0)
    assert g.width == pytest.approx(0.4 / np.sqrt(2))
    assert len(g.G1) == len(cells_of_ball((0, 0), 1.0, g.width))
    assert len(g.G1) == 52


def test_coincident_vertices_share_g1():
    a = Grids([PolyCurve([[0.2, 0.1]])], 0.4, 1.0)
    b = Grids([PolyCurve([[0.2, 0.1], [0.2, 0.1]])], 0.4, 1.0)
    assert a.G1.cells == b.G1.cells


def test_grid_sizes_monotone():
    g = Grids([PolyCurve([[0, 0], [1, 2]])], 0.3, 1.0)
    assert len(g.G2) >= len(g.G3) >= len(g.G1)


def test_locate():
    g = GridSet([[0, 0], [1, 0]], 1.0)
    assert locate(g, (0.5, 0.5)) == (0, 0)
    assert locate(g, (7, 7)) is None
    assert locate(g, (1.0, 0.5)) == (1, 0)


def test_grid_vertices():
    assert grid_vertices(GridSet([[0, 0]], 1.0)).shape == (4, 2)
    assert grid_vertices(GridSet([[0, 0], [1, 0]], 1.0)).shape == (6, 2)
    assert grid_vertices(GridSet([[0, 0], [5, 5], [9, 0]], 1.0)).shape == (12, 2)


def test_check_params():
    with pytest.raises(BadEpsilon):
        check_params(0.5, 1.0)
    with pytest.raises(BadDelta):
        check_params(0.2, 0.0)


intervals = st.lists(
    st.tuples(st.floats(-10, 10), st.floats(0, 5)).map(lambda t: (t[0], t[0] + t[1])), max_size=40
)


@given(intervals, st.lists(st.floats(-12, 12), max_size=20))
def test_interval_tree_stab_matches_scan(items, points):
    tree = IntervalTree([(lo, hi, i) for i, (lo, hi) in enumerate(items)])
    for x in points + [lo for lo, _ in items]:
        want = [i for i, (lo, hi) in enumerate(items) if lo <= x <= hi]
        assert sorted(tree.stab(x)) == want


def test_interval_tree_infinite_ends():
    tree = IntervalTree([(-np.inf, 0.0, "a"), (1.0, np.inf, "b"), (-np.inf, np.inf, "c")])
    assert sorted(tree.stab(-5)) == ["a", "c"]
    assert sorted(tree.stab(0.5)) == ["c"]
    assert sorted(tree.stab(9)) == ["b", "c"]
