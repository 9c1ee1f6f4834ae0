"""The two approximate near-neighbour indexes at a fixed scale delta.

``OneEps`` stores coarse encodings and answers within (1+24 eps) delta;
``ThreeEps`` stores cell-center polylines and answers within (3+24 eps) delta.
Both can be filled eagerly at build time or lazily, memoizing each key the
first time a query needs it.
"""

from __future__ import annotations

import base64
import itertools
import math
import os
import zlib
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .encoding import (
    CoarseEncoding,
    EncodingParams,
    EncodingTester,
    QueryEncoder,
    cell_distance,
    edge_cells,
    encode_key,
    enumerate_partitions,
    jset,
    shoot_pairs,
)
from .errors import ArityMismatch, BadArity, BadParams, DimensionMismatch, FeasibilityRefused
from .frechet import frechet_decide
from .geometry import PolyCurve, as_curve
from .grids import Cell, Grids, cell_center, cells_of_ball, check_params
from .segquery import BruteOracle, SegQueryOutcome, SegQueryStructure

ONE_EPS = "one_eps"
THREE_EPS = "three_eps"
LAZY = "lazy"
EAGER = "eager"
DEFAULT_BUDGET = 1e8


def default_budget() -> float:
    raw = os.environ.get("FANN_BUDGET", "").strip()
    return float(raw) if raw else DEFAULT_BUDGET


@dataclass(frozen=True)
class Answer:
    kind: str  # "curve" or "no"
    index: Optional[int] = None

    @classmethod
    def curve(cls, i: int) -> "Answer":
        return cls("curve", int(i))

    @property
    def is_no(self) -> bool:
        return self.kind == "no"

    def to_json(self):
        return {"answer": "no"} if self.is_no else {"answer": "curve", "index": self.index}

    def __repr__(self) -> str:
        return "No" if self.is_no else f"Curve({self.index})"


NO = Answer("no")


# ---------------------------------------------------------------------------
# Tries


class Trie:
    """Map from key bytes to the smallest qualifying curve index."""

    def __init__(self, items: Optional[Dict[bytes, int]] = None):
        self.map: Dict[bytes, int] = dict(items or {})

    def __len__(self) -> int:
        return len(self.map)

    def __contains__(self, key: bytes) -> bool:
        return key in self.map

    def items(self):
        return self.map.items()


def trie_insert(trie: Trie, key: bytes, index: int) -> None:
    old = trie.map.get(key)
    if old is None or index < old:
        trie.map[key] = int(index)


def trie_lookup(trie: Trie, key: bytes) -> Optional[int]:
    return trie.map.get(key)


class SequenceTable:
    """Dense table over all cell sequences of fixed even lengths.

    Entry ``table[l][radix(seq)]`` holds the smallest curve index matching the
    sequence or ``sentinel``. Sequences are over G1 in its lattice order.
    """

    def __init__(self, cells: Sequence[Cell], n: int, tables: Dict[int, np.ndarray]):
        self.cells = list(cells)
        self.index = {c: i for i, c in enumerate(self.cells)}
        self.n = n
        self.sentinel = n
        self.tables = tables

    @staticmethod
    def dtype_for(n: int):
        if n < 255:
            return np.uint8
        if n < 65535:
            return np.uint16
        return np.int32

    def lookup(self, seq: Sequence[Cell]) -> Optional[int]:
        tab = self.tables.get(len(seq))
        if tab is None:
            return None
        N = len(self.cells)
        flat = 0
        for c in seq:
            j = self.index.get(tuple(c))
            if j is None:
                return None
            flat = flat * N + j
        v = int(tab[flat])
        return None if v == self.sentinel else v

    def __len__(self) -> int:
        return int(sum(int((t != self.sentinel).sum()) for t in self.tables.values()))

    def pack(self) -> dict:
        return {
            "format": "packed-v1",
            "dtype": np.dtype(self.dtype_for(self.n)).name,
            "tables": {
                str(l): base64.b64encode(zlib.compress(t.tobytes(), 6)).decode("ascii")
                for l, t in sorted(self.tables.items())
            },
        }

    @classmethod
    def unpack(cls, blob: dict, cells: Sequence[Cell], n: int) -> "SequenceTable":
        if blob.get("format") != "packed-v1":
            raise BadParams("unknown table format")
        dt = np.dtype(blob["dtype"])
        tables = {
            int(l): np.frombuffer(zlib.decompress(base64.b64decode(s)), dtype=dt).copy()
            for l, s in blob["tables"].items()
        }
        return cls(cells, n, tables)


# ---------------------------------------------------------------------------
# Index


@dataclass
class AnnIndex:
    variant: str
    mode: str
    T: List[PolyCurve]
    eps: float
    delta: float
    k: int
    d: int
    oracle_kind: str = "brute"
    trie: Trie = field(default_factory=Trie)
    table: Optional[SequenceTable] = None
    memo: Dict[bytes, Optional[int]] = field(default_factory=dict)
    stats: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        check_params(self.eps, self.delta)
        if self.k < 3:
            raise BadArity("k must be at least 3")
        self.params = EncodingParams(self.eps, self.delta, self.d)
        self.grids = Grids(self.T, self.eps, self.delta, d=self.d)
        self._oracle = None
        self._tester = None
        self._encoder = None

    @property
    def m(self) -> int:
        return self.T[0].m if self.T else 0

    @property
    def oracle(self):
        if self._oracle is None:
            if self.oracle_kind == "canonical":
                self._oracle = SegQueryStructure(self.T, self.eps, self.delta, grids=self.grids)
            else:
                self._oracle = BruteOracle(self.grids.G1)
        return self._oracle

    @property
    def tester(self) -> EncodingTester:
        if self._tester is None:
            self._tester = EncodingTester(self.T, self.params)
        return self._tester

    @property
    def encoder(self) -> QueryEncoder:
        if self._encoder is None:
            self._encoder = QueryEncoder(self.grids, self.oracle, self.params, edge_cells(self.grids, self.T))
        return self._encoder

    def query(self, sigma) -> Answer:
        if self.variant == ONE_EPS:
            return query_one_eps(self, sigma)
        return query_three_eps(self, sigma)

    def bound(self) -> float:
        factor = 1.0 if self.variant == ONE_EPS else 3.0
        return (factor + 24.0 * self.eps) * self.delta


def pad_corpus(T: Sequence) -> List[PolyCurve]:
    curves = [as_curve(c) for c in T]
    if not curves:
        return []
    m = max(2, max(c.m for c in curves))
    return [c.padded(m) for c in curves]


def _bump(idx: AnnIndex, key: str, by: int = 1) -> None:
    idx.stats[key] = idx.stats.get(key, 0) + by


def _check_query(idx: AnnIndex, sigma) -> PolyCurve:
    sigma = as_curve(sigma)
    if sigma.m != idx.k:
        raise ArityMismatch(f"query has {sigma.m} vertices, index expects {idx.k}")
    if idx.T and sigma.d != idx.d:
        raise DimensionMismatch(f"query dimension {sigma.d} differs from corpus dimension {idx.d}")
    return sigma


def _dimension(T: List[PolyCurve], d: Optional[int]) -> int:
    if T:
        return T[0].d
    return 2 if d is None else int(d)


# ---------------------------------------------------------------------------
# OneEps


def build_one_eps(T: Sequence, eps: float, delta: float, k: int, mode: str = LAZY, budget: Optional[float] = None,
                  oracle: str = "brute", d: Optional[int] = None) -> AnnIndex:
    curves = pad_corpus(T)
    idx = AnnIndex(ONE_EPS, mode, curves, float(eps), float(delta), int(k), _dimension(curves, d), oracle)
    if mode == EAGER:
        _fill_one_eps(idx, default_budget() if budget is None else budget)
    elif mode != LAZY:
        raise BadParams(f"unknown mode {mode!r}")
    return idx


def query_one_eps(idx: AnnIndex, sigma) -> Answer:
    sigma = _check_query(idx, sigma)
    if not idx.T:
        return NO
    for E in idx.encoder.generate(sigma, idx.k):
        if isinstance(E, SegQueryOutcome):
            _bump(idx, "no_for_ann")
            return NO
        key = encode_key(E)
        if idx.mode == EAGER:
            hit = trie_lookup(idx.trie, key)
        else:
            if key in idx.memo:
                hit = idx.memo[key]
            else:
                hit = idx.tester.first_match(E)
                idx.memo[key] = hit
        if hit is not None:
            return Answer.curve(hit)
    return NO


class _EagerPlan:
    """Per-(curve, partition) option lists for the eager OneEps enumeration."""

    def __init__(self, idx: AnnIndex):
        self.idx = idx
        self.G1 = idx.grids.G1.cells
        self.G2 = idx.grids.G2
        self.width = idx.grids.width
        self.edge_cells: Dict[Tuple[int, int], List[Tuple[Cell, float, float]]] = {}
        self.tests = 0

    def pair_options(self, i: int, pi, j: int) -> List[Optional[Tuple[Cell, Cell]]]:
        blk = pi.block(j)
        if blk is None:
            if j == 1:
                return [(a, b) for a in self.G1 for b in self.G1]
            return [None]
        out = []
        for a in self.G1:
            for b in self.G1:
                self.tests += 1
                if self.idx.tester.pair_test(i, blk[0], blk[1], (a, b)):
                    out.append((a, b))
        return out

    def near_vertices(self, pts: np.ndarray) -> List[Cell]:
        delta = self.idx.delta
        cand = [c for c in cells_of_ball(pts[0], delta, self.width) if c in self.G2]
        out = []
        for c in cand:
            lo = np.asarray(c, dtype=float) * self.width
            gap = np.maximum(np.maximum(lo - pts, 0.0), pts - (lo + self.width))
            if ((gap * gap).sum(axis=1) <= delta * delta).all():
                out.append(c)
        return out

    def hits(self, i: int, b: int) -> List[Tuple[Cell, float, float]]:
        key = (i, b)
        if key not in self.edge_cells:
            seg = self.idx.T[i].edge(b - 1)
            t0, t1 = kernels.segment_boxes(seg.start, seg.end, self.G2.lo, self.G2.hi, 0.0)
            self.edge_cells[key] = [
                (self.G2.cells[q], float(t0[q]), float(t1[q])) for q in np.flatnonzero(t0 <= t1).tolist()
            ]
        return self.edge_cells[key]

    def window_options(self, i: int, b: int) -> List[Tuple[Cell, Cell]]:
        h = self.hits(i, b)
        self.tests += len(h) * len(h)
        return [(a, c) for a, a0, _ in h for c, _, c1 in h if a0 <= c1]


def estimate_one_eps_eager(idx: AnnIndex) -> float:
    """Upper bound on the number of tests and emitted keys of the eager build."""
    n1 = len(idx.grids.G1)
    total = 0.0
    for tau in idx.T:
        for pi in enumerate_partitions(tau.m, idx.k):
            slots = [n1 * n1 if (pi.block(j) is not None or j == 1) else 1 for j in range(1, idx.k)]
            total += sum(slots)
            total += float(np.prod(np.asarray(slots, dtype=float)))
    return total


def _fill_one_eps(idx: AnnIndex, budget: float) -> None:
    first = estimate_one_eps_eager(idx)
    if first > budget:
        raise FeasibilityRefused(
            f"eager OneEps needs about {first:.3g} tests, over the budget of {budget:.3g}", first, budget
        )
    plan = _EagerPlan(idx)
    k = idx.k
    lim = idx.params.neighbour_radius
    w = idx.grids.width
    emitted = 0
    for i, tau in enumerate(idx.T):
        V = tau.vertices
        for pi in enumerate_partitions(tau.m, k):
            slots = [plan.pair_options(i, pi, j) for j in range(1, k)]
            b_first = plan.near_vertices(V[: pi.end(0)])
            a_last = plan.near_vertices(V[-1:])
            if not b_first or not a_last or any(not s for s in slots):
                continue
            size = float(np.prod([len(s) for s in slots])) * len(b_first) * len(a_last)
            if emitted + size > budget:
                raise FeasibilityRefused(
                    f"eager OneEps would emit more than {budget:.3g} candidates", emitted + size, budget
                )
            for C in itertools.product(*slots):
                J = jset(C)
                wins = []
                for r, s in J:
                    opts = [
                        (a, b)
                        for a, b in plan.window_options(i, pi.end(s - 1))
                        if cell_distance(C[r - 1][1], a, w) <= lim and cell_distance(C[s - 1][0], b, w) <= lim
                    ]
                    wins.append(opts)
                bs = [c for c in b_first if cell_distance(C[0][0], c, w) <= lim]
                as_ = [c for c in a_last if cell_distance(C[-1][1], c, w) <= lim]
                for bf, al, pick in itertools.product(bs, as_, itertools.product(*wins)):
                    A: List[Optional[Cell]] = [None] * (k - 1)
                    B: List[Optional[Cell]] = [None] * (k - 1)
                    B[0] = bf
                    A[-1] = al
                    for (r, s), (ca, cb) in zip(J, pick):
                        A[r - 1] = ca
                        B[s - 1] = cb
                    E = CoarseEncoding(k, C, tuple(A), tuple(B))
                    emitted += 1
                    trie_insert(idx.trie, encode_key(E), i)
    idx.stats["eager_tests"] = plan.tests
    idx.stats["eager_candidates"] = emitted


# ---------------------------------------------------------------------------
# ThreeEps


def sigma0_cells(sigma, grids: Grids, oracle, params: EncodingParams):
    """Cells of the kept pairs in order, None when the end pairs are null, or NO_FOR_ANN."""
    pairs = shoot_pairs(as_curve(sigma), oracle, params)
    if isinstance(pairs, SegQueryOutcome):
        return pairs
    if pairs[0] is None or pairs[-1] is None:
        return None
    return tuple(c for p in pairs if p is not None for c in p)


def build_sigma0(sigma, grids: Grids, oracle, params: EncodingParams, k: Optional[int] = None):
    """The center polyline of the kept pairs, None when absent, or NO_FOR_ANN.

    Consecutive duplicate centers are merged; the key stays uncollapsed.
    """
    sigma = as_curve(sigma)
    if k is not None and sigma.m != k:
        raise ArityMismatch(f"query has {sigma.m} vertices, expected {k}")
    cells = sigma0_cells(sigma, grids, oracle, params)
    if cells is None or isinstance(cells, SegQueryOutcome):
        return cells
    return PolyCurve(np.array([cell_center(c, grids.width) for c in cells])).collapsed()


def build_three_eps(T: Sequence, eps: float, delta: float, k: int, mode: str = LAZY, budget: Optional[float] = None,
                    oracle: str = "brute", d: Optional[int] = None) -> AnnIndex:
    curves = pad_corpus(T)
    idx = AnnIndex(THREE_EPS, mode, curves, float(eps), float(delta), int(k), _dimension(curves, d), oracle)
    if mode == EAGER:
        _fill_three_eps(idx, default_budget() if budget is None else budget)
    elif mode != LAZY:
        raise BadParams(f"unknown mode {mode!r}")
    return idx


def estimate_three_eps_eager(n1: int, k: int, n: int) -> float:
    return float(sum(float(n1) ** (2 * l) for l in range(2, k))) * max(n, 1)


def _fill_three_eps(idx: AnnIndex, budget: float) -> None:
    G1 = idx.grids.G1
    n1 = len(G1)
    est = estimate_three_eps_eager(n1, idx.k, len(idx.T))
    if est > budget:
        raise FeasibilityRefused(
            f"eager ThreeEps needs about {est:.3g} decisions, over the budget of {budget:.3g}", est, budget
        )
    n = len(idx.T)
    dt = SequenceTable.dtype_for(n)
    points = np.array([cell_center(c, G1.width) for c in G1.cells]).reshape(n1, idx.d)
    curves = np.concatenate([c.vertices for c in idx.T], axis=0) if n else np.empty((0, idx.d))
    offsets = np.cumsum([0] + [c.m for c in idx.T]).astype(np.int64)
    r = (1.0 + 12.0 * idx.eps) * idx.delta
    tables = {}
    for l in range(2, idx.k):
        out = np.full(n1 ** (2 * l), n, dtype=dt)
        if n and n1:
            kernels.sequence_table(points, curves, offsets, 2 * l, r, out)
        tables[2 * l] = out
    idx.table = SequenceTable(G1.cells, n, tables)
    idx.stats["eager_decisions"] = int(est)


def query_three_eps(idx: AnnIndex, sigma) -> Answer:
    sigma = _check_query(idx, sigma)
    if not idx.T:
        return NO
    cells = sigma0_cells(sigma, idx.grids, idx.oracle, idx.params)
    if isinstance(cells, SegQueryOutcome):
        _bump(idx, "no_for_ann")
        return NO
    if cells is None:
        return NO
    s0 = PolyCurve(np.array([cell_center(c, idx.grids.width) for c in cells]))
    if not frechet_decide(sigma, s0, (2.0 + 12.0 * idx.eps) * idx.delta):
        return NO
    if idx.mode == EAGER:
        hit = idx.table.lookup(cells) if idx.table is not None else None
    else:
        key = _cells_key(cells)
        if key in idx.memo:
            hit = idx.memo[key]
        else:
            r = (1.0 + 12.0 * idx.eps) * idx.delta
            hit = next((i for i, tau in enumerate(idx.T) if frechet_decide(s0, tau, r)), None)
            idx.memo[key] = hit
    return NO if hit is None else Answer.curve(hit)


def _cells_key(cells: Sequence[Cell]) -> bytes:
    arr = np.asarray(cells, dtype="<i8")
    return bytes([len(cells)]) + arr.tobytes()
