import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fann.encoding import (
    CoarseEncoding,
    EncodingParams,
    EncodingTester,
    Partition,
    QueryEncoder,
    cell_distance,
    check_matchable_window,
    curve_matches_encoding,
    decode_key,
    edge_cells,
    encode_key,
    enumerate_partitions,
    jset,
)
from fann.errors import ArityMismatch, BadArity, InvalidEncoding, NullCells
from fann.frechet import frechet_decide
from fann.grids import Grids, locate
from fann.segquery import BruteOracle, SegQueryOutcome
from fann.selftest import planted_instance, suite_rng
from fann.geometry import PolyCurve

EPS, DELTA = 0.4, 1.0


@pytest.mark.parametrize("m, count", [(2, 1), (3, 3), (4, 6)])
def test_partition_counts_k3(m, count):
    parts = list(enumerate_partitions(m, 3))
    assert len(parts) == count
    for p in parts:
        assert p.block(0) is not None and p.block(2) is not None


def test_partition_blocks_cover_vertices():
    for p in enumerate_partitions(5, 4):
        covered = [v for b in p.blocks() if b is not None for v in range(b[0], b[1] + 1)]
        assert covered == list(range(1, 6))


def test_partition_rejects_small_arity():
    with pytest.raises(BadArity):
        list(enumerate_partitions(1, 3))
    with pytest.raises(BadArity):
        list(enumerate_partitions(3, 2))


def test_jset_pairs_consecutive_kept_slots():
    c = ((0, 0), (1, 1))
    assert jset([c, None, c, c]) == [(1, 3), (3, 4)]
    assert jset([c, c]) == [(1, 2)]


def _sample_encoding(k=3):
    pair = ((0, 0), (1, 0))
    C = tuple([pair] * (k - 1))
    A = tuple([(0, 1)] * (k - 1))
    B = tuple([(1, 1)] * (k - 1))
    return CoarseEncoding(k, C, A, B)


def test_key_round_trip():
    E = _sample_encoding(4)
    key = encode_key(E)
    assert decode_key(key) == E
    gapped = CoarseEncoding(4, (E.C[0], None, E.C[2]), (E.A[0], None, E.A[2]), (E.B[0], None, E.B[2]))
    assert decode_key(encode_key(gapped)) == gapped
    assert encode_key(gapped) != key
    assert len(encode_key(gapped)) == len(key)


def test_flipping_a_flag_changes_key():
    key = bytearray(encode_key(_sample_encoding(3)))
    other = bytes(key)
    key[3] ^= 1
    assert bytes(key) != other


def test_decode_rejects_trailing_bytes():
    with pytest.raises(InvalidEncoding):
        decode_key(encode_key(_sample_encoding(3)) + b"\0")


def test_validate_type_invariants():
    E = _sample_encoding(3)
    E.validate()
    with pytest.raises(InvalidEncoding):
        CoarseEncoding(3, (None, E.C[1]), (None, E.A[1]), (None, E.B[1])).validate()
    with pytest.raises(InvalidEncoding):
        CoarseEncoding(4, (E.C[0], E.C[0], E.C[0]), (E.A[0], None, E.A[0]), E.B + (E.B[0],)).validate()


def test_cell_distance():
    w = 0.5
    assert cell_distance((0, 0), (1, 0), w) == 0.0
    assert cell_distance((0, 0), (3, 0), w) == pytest.approx(1.0)
    assert cell_distance((0, 0), (2, 2), w) == pytest.approx(np.sqrt(0.5))


def _encodings_of(T, sigma, restrict=True):
    grids = Grids([PolyCurve(t) for t in T], EPS, DELTA)
    params = EncodingParams(EPS, DELTA, grids.d)
    enc = QueryEncoder(grids, BruteOracle(grids.G1), params, edge_cells(grids, T) if restrict else None)
    return grids, params, list(enc.generate(sigma))


def test_tester_accepts_encoding_of_near_curve():
    tau = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    sigma = tau + [0.0, 0.1]
    grids, params, encs = _encodings_of([tau], sigma)
    assert encs and all(isinstance(E, CoarseEncoding) for E in encs)
    tester = EncodingTester([tau], params)
    assert any(tester.matches(0, E) for E in encs)
    assert any(curve_matches_encoding(tau, E, params) for E in encs)


def test_far_query_gets_no_for_ann_or_nothing():
    tau = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    _, _, encs = _encodings_of([tau], tau + [0.0, 30.0])
    assert encs == [] or (len(encs) == 1 and isinstance(encs[0], SegQueryOutcome) and encs[0].is_no)


def test_generate_checks_arity():
    tau = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    grids = Grids([PolyCurve(tau)], EPS, DELTA)
    enc = QueryEncoder(grids, BruteOracle(grids.G1), EncodingParams(EPS, DELTA, 2))
    with pytest.raises(ArityMismatch):
        list(enc.generate(tau, k=4))
    with pytest.raises(BadArity):
        list(enc.generate(tau[:2]))


def test_generated_encodings_invariants():
    rng = suite_rng(3, 0)
    for _ in range(8):
        T, i, sigma = planted_instance(rng)
        grids, params, encs = _encodings_of(T, sigma)
        V = np.asarray(sigma)
        for E in encs:
            assert isinstance(E, CoarseEncoding)
            E.validate(grids, params)
            assert E.B[0] == locate(grids.G2, V[0])
            assert E.A[-1] == locate(grids.G2, V[-1])
            for pair in jset(E.C):
                assert check_matchable_window(E, sigma, pair, params)


def test_planted_curve_is_matched_by_some_encoding():
    rng = suite_rng(4, 0)
    for _ in range(8):
        T, i, sigma = planted_instance(rng)
        _, params, encs = _encodings_of(T, sigma)
        assert frechet_decide(sigma, T[i], DELTA)
        tester = EncodingTester([PolyCurve(t) for t in _padded(T)], params)
        assert any(tester.matches(i, E) for E in encs if isinstance(E, CoarseEncoding))


def _padded(T):
    m = max(len(t) for t in T)
    return [PolyCurve(t).padded(m).vertices for t in T]


def test_restricted_enumeration_equivalent():
    # Dropping A/B cells that no input edge meets never loses a matching encoding.
    rng = np.random.default_rng(5)
    cases = [
        ([[[0.0, 0.0], [1.0, 0.3], [2.0, 0.0]]], [[0.0, 0.1], [1.0, 0.2], [2.0, 0.1]]),
        ([[[0.0, 0.0], [1.5, 0.0]], [[0.0, 1.0], [1.5, 1.5]]], [[0.0, 0.2], [0.8, 0.1], [1.5, 0.2]]),
    ]
    for T, sigma in cases:
        T = _padded([np.asarray(t) for t in T])
        _, params, full = _encodings_of(T, sigma, restrict=False)
        _, _, restricted = _encodings_of(T, sigma, restrict=True)
        keys_r = {encode_key(E) for E in restricted if isinstance(E, CoarseEncoding)}
        full = [E for E in full if isinstance(E, CoarseEncoding)]
        assert keys_r <= {encode_key(E) for E in full}
        tester = EncodingTester(T, params)
        assert any(tester.first_match(E) is not None for E in restricted)
        dropped = [E for E in full if encode_key(E) not in keys_r]
        pick = rng.choice(len(dropped), size=min(400, len(dropped)), replace=False) if dropped else []
        for j in pick:
            assert tester.first_match(dropped[int(j)]) is None


def test_check_matchable_window_null_cells():
    E = _sample_encoding(3)
    bad = CoarseEncoding(3, E.C, (None, E.A[1]), E.B)
    with pytest.raises(NullCells):
        check_matchable_window(bad, [[0, 0], [1, 0], [2, 0]], (1, 2), EncodingParams(EPS, DELTA, 2))


def test_check_matchable_window_example():
    params = EncodingParams(EPS, DELTA, 2)
    w = params.width
    a = (0, 0)
    b = (int(round(2.0 / w)), 0)
    E = CoarseEncoding(3, ((a, a), (b, b)), (a, b), (a, b))
    assert check_matchable_window(E, [[0, 0], [1, 0.2], [2, 0]], (1, 2), params)
    assert not check_matchable_window(E, [[0, 0], [1, 5.0], [2, 0]], (1, 2), params)


def test_tester_is_order_independent():
    rng = suite_rng(6, 0)
    T, _, sigma = planted_instance(rng)
    T = _padded(T)
    _, params, encs = _encodings_of(T, sigma)
    encs = [E for E in encs if isinstance(E, CoarseEncoding)]
    fwd = EncodingTester(T, params)
    rev = EncodingTester(T, params)
    a = [fwd.first_match(E) for E in encs]
    b = [rev.first_match(E) for E in reversed(encs)][::-1]
    assert a == b


cells = st.tuples(st.integers(-50, 50), st.integers(-50, 50))


@given(st.lists(st.one_of(st.none(), st.tuples(cells, cells)), min_size=1, max_size=4), st.tuples(cells, cells),
       cells, cells)
def test_key_round_trip_property(middle, end, a, b):
    C = (end,) + tuple(middle) + (end,)
    A = tuple(None if c is None else a for c in C)
    B = tuple(None if c is None else b for c in C)
    E = CoarseEncoding(len(C) + 1, C, A, B)
    E.validate()
    assert decode_key(encode_key(E)) == E
