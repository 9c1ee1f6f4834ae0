import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fann.errors import AllScalesNo, ArityMismatch, EmptyCorpus
from fann.frechet import frechet_decide
from fann.index import ONE_EPS, THREE_EPS
from fann.reduction import ann_query, brute_force_nn, build_ladder
from fann.selftest import planted_instance, suite_rng

T3 = [
    [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)],
    [(0.0, 2.0), (1.0, 2.0), (2.0, 2.0)],
    [(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)],
]


def test_ladder_scales():
    eps = 0.4
    ladder = build_ladder(T3, eps, 3)
    # Closest distinct vertices are 1 apart, the diameter is sqrt(8).
    assert ladder.deltas[0] == pytest.approx(0.25)
    assert ladder.deltas[-1] >= 2 * math.sqrt(8)
    assert ladder.deltas[-2] < 2 * math.sqrt(8)
    ratios = np.array(ladder.deltas[1:]) / np.array(ladder.deltas[:-1])
    assert np.allclose(ratios, 1 + eps)
    assert ladder.bound_factor() == pytest.approx(3 + 24 * eps)


def test_ladder_coincident_vertices():
    ladder = build_ladder([[(1.0, 1.0)], [(1.0, 1.0)]], 0.4, 3)
    assert ladder.deltas[0] == pytest.approx(0.25)
    assert ann_query(ladder, [(1.0, 1.0)] * 3) == 0


def test_ladder_is_lazy():
    ladder = build_ladder(T3, 0.4, 3)
    assert ladder._indexes == {}
    trace = []
    ann_query(ladder, T3[1], trace=trace)
    assert set(ladder._indexes) == {lvl for lvl, _ in trace}
    assert len(trace) <= 2 + math.ceil(math.log2(len(ladder)))


def test_empty_corpus():
    with pytest.raises(EmptyCorpus):
        build_ladder([], 0.4, 3)
    with pytest.raises(EmptyCorpus):
        brute_force_nn([], [(0, 0)])


@pytest.mark.parametrize("variant", [ONE_EPS, THREE_EPS])
def test_query_equal_to_input_curve(variant):
    ladder = build_ladder(T3, 0.4, 3, variant=variant)
    for j, tau in enumerate(T3):
        i = ann_query(ladder, tau)
        bound = ladder.bound_factor() * (1 + ladder.eps) * ladder.deltas[0]
        assert frechet_decide(tau, T3[i], bound + 1e-9)


def test_single_curve():
    ladder = build_ladder(T3[:1], 0.4, 3)
    assert ann_query(ladder, [(5.0, 5.0), (6.0, 5.0), (7.0, 5.0)]) == 0


def test_all_scales_no():
    ladder = build_ladder(T3[:2], 0.4, 3)
    far = [(100.0, 100.0), (101.0, 100.0), (102.0, 100.0)]
    assert ann_query(ladder, far) == 0
    with pytest.raises(AllScalesNo):
        ann_query(ladder, far, strict=True)


def test_arity_enforced():
    ladder = build_ladder(T3, 0.4, 3)
    with pytest.raises(ArityMismatch):
        ann_query(ladder, [(0.0, 0.0), (1.0, 0.0)])


def test_brute_force_nn_examples():
    i, d = brute_force_nn(T3, [(0.0, 0.1), (1.0, 0.1), (2.0, 0.1)])
    assert i == 0 and d == pytest.approx(0.1, abs=1e-6)
    # Equidistant from curves 0 and 1: the smaller index wins.
    i, d = brute_force_nn(T3[:2], [(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)])
    assert i == 0 and d == pytest.approx(1.0, abs=1e-6)


def test_planted_ladder_bound():
    rng = suite_rng(21, 0)
    for _ in range(10):
        T, _, sigma = planted_instance(rng)
        ladder = build_ladder(T, 0.4, 3)
        i = ann_query(ladder, sigma)
        _, d_opt = brute_force_nn(ladder.T, sigma)
        bound = ladder.bound_factor() * (1 + ladder.eps) * max(d_opt, ladder.deltas[0]) + 1e-6
        assert frechet_decide(sigma, ladder.T[i], bound)


@settings(max_examples=20)
@given(st.lists(st.tuples(st.floats(-2, 4), st.floats(-2, 4)), min_size=3, max_size=3))
def test_ladder_bound_property(q):
    ladder = build_ladder(T3, 0.45, 3)
    i = ann_query(ladder, q)
    _, d_opt = brute_force_nn(ladder.T, q)
    bound = max(ladder.bound_factor() * (1 + ladder.eps) * max(d_opt, ladder.deltas[0]), 1.5 * d_opt) + 1e-6
    assert frechet_decide(q, ladder.T[i], bound)
