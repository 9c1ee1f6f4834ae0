"""Coarse encodings of curves at one scale.

An encoding of a k-vertex query is three arrays indexed by the query edges
j = 1..k-1, stored 0-based here (slot ``j - 1``):

* ``C[j]``: a pair of G1 cells standing in for edge w_j w_{j+1}, or None;
* ``A[j]``, ``B[j]``: G2 cells standing in for the input edge that absorbs the
  query vertices between two kept pairs; ``B[1]`` and ``A[k-1]`` hold the
  cells of w_1 and w_k.

Input-curve vertex partitions are handled 1-based, matching the breaks
notation ``pi_j = (e_{j-1}, e_j]`` with ``e_{-1} = 0`` and ``e_{k-1} = m``.
"""

from __future__ import annotations

import itertools
import struct
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import kernels
from .errors import ArityMismatch, BadArity, InvalidEncoding, NullCells
from .frechet import subsegment_matchable
from .geometry import PolyCurve, Segment, as_curve
from .grids import Cell, GridSet, Grids, cell_width, cells_near_cell, check_params, locate
from .segquery import NO_FOR_ANN, SegQueryOutcome

CellPair = Tuple[Cell, Cell]


@dataclass(frozen=True)
class EncodingParams:
    eps: float
    delta: float
    d: int

    def __post_init__(self):
        check_params(self.eps, self.delta)

    @property
    def width(self) -> float:
        return cell_width(self.eps, self.delta, self.d)

    @property
    def shoot_radius(self) -> float:
        return 11.0 * self.eps * self.delta

    @property
    def neighbour_radius(self) -> float:
        return (1.0 + 11.0 * self.eps) * self.delta

    @property
    def pair_radius(self) -> float:
        return (1.0 + 12.0 * self.eps) * self.delta

    @property
    def window_radius(self) -> float:
        return (1.0 + self.eps) * self.delta


@dataclass(frozen=True)
class CoarseEncoding:
    k: int
    C: Tuple[Optional[CellPair], ...]
    A: Tuple[Optional[Cell], ...]
    B: Tuple[Optional[Cell], ...]

    def validate(self, grids: Optional[Grids] = None, params: Optional[EncodingParams] = None) -> None:
        """Raise InvalidEncoding unless the type invariants hold."""
        k = self.k
        if k < 3:
            raise InvalidEncoding("k must be at least 3")
        if not (len(self.C) == len(self.A) == len(self.B) == k - 1):
            raise InvalidEncoding("component arrays must have k-1 slots")
        if self.C[0] is None or self.C[-1] is None:
            raise InvalidEncoding("the first and last cell pairs must be present")
        for j in range(k - 1):
            present = self.C[j] is not None
            if (self.A[j] is not None) != present or (self.B[j] is not None) != present:
                raise InvalidEncoding(f"A/B nullity at slot {j + 1} does not follow C")
        if grids is None:
            return
        w = grids.width
        for j in range(k - 1):
            if self.C[j] is None:
                continue
            c1, c2 = self.C[j]
            if c1 not in grids.G1 or c2 not in grids.G1:
                raise InvalidEncoding(f"C[{j + 1}] is not in G1")
            if self.A[j] not in grids.G2 or self.B[j] not in grids.G2:
                raise InvalidEncoding(f"A/B[{j + 1}] is not in G2")
            if params is not None:
                lim = params.neighbour_radius
                if cell_distance(c1, self.B[j], w) > lim or cell_distance(c2, self.A[j], w) > lim:
                    raise InvalidEncoding(f"A/B[{j + 1}] too far from C[{j + 1}]")


def cell_distance(a: Cell, b: Cell, width: float) -> float:
    """Distance between two closed cells of the same lattice."""
    gap = np.maximum(np.abs(np.subtract(a, b, dtype=np.int64)) - 1, 0).astype(float) * width
    return float(np.sqrt(gap @ gap))


def cell_corner(cell: Cell, width: float) -> np.ndarray:
    """Lexicographically smallest vertex of the cell."""
    return np.asarray(cell, dtype=float) * width


# ---------------------------------------------------------------------------
# Partitions and J


@dataclass(frozen=True)
class Partition:
    """Monotone split of vertices 1..m into k blocks pi_0..pi_{k-1}."""

    m: int
    breaks: Tuple[int, ...]  # e_0 .. e_{k-2}

    @property
    def k(self) -> int:
        return len(self.breaks) + 1

    def end(self, j: int) -> int:
        if j < 0:
            return 0
        if j >= self.k - 1:
            return self.m
        return self.breaks[j]

    def block(self, j: int) -> Optional[Tuple[int, int]]:
        """Smallest and largest vertex index (1-based) of pi_j, or None when empty."""
        a, b = self.end(j - 1) + 1, self.end(j)
        return (a, b) if a <= b else None

    def blocks(self) -> List[Optional[Tuple[int, int]]]:
        return [self.block(j) for j in range(self.k)]


def enumerate_partitions(m: int, k: int) -> Iterator[Partition]:
    """Every partition of m vertices into k monotone blocks, first and last nonempty."""
    if m < 2 or k < 3:
        raise BadArity(f"need m >= 2 and k >= 3, got m={m}, k={k}")
    for breaks in itertools.combinations_with_replacement(range(1, m), k - 1):
        yield Partition(m, breaks)


def jset(C: Sequence[Optional[CellPair]]) -> List[Tuple[int, int]]:
    """Pairs (r, s), 1-based, of consecutive non-null slots of C."""
    kept = [j + 1 for j, c in enumerate(C) if c is not None]
    return list(zip(kept[:-1], kept[1:]))


# ---------------------------------------------------------------------------
# Preprocessing-side tests


class EncodingTester:
    """Decides membership of input curves in T_E; sub-results are cached.

    Each cached value is a pure function of its key, so answers never depend
    on the order of calls.
    """

    def __init__(self, T: Sequence, params: EncodingParams):
        self.T = [as_curve(c) for c in T]
        self.params = params
        self.width = params.width
        self._pair: Dict[tuple, bool] = {}
        self._ends: Dict[tuple, bool] = {}
        self._edge: Dict[tuple, bool] = {}
        self._partitions: Dict[Tuple[int, int], List[Partition]] = {}

    def partitions(self, m: int, k: int) -> List[Partition]:
        key = (m, k)
        if key not in self._partitions:
            self._partitions[key] = list(enumerate_partitions(m, k))
        return self._partitions[key]

    # test 1
    @staticmethod
    def nullity_test(pi: Partition, E: CoarseEncoding) -> bool:
        for j in range(2, E.k):
            if (pi.block(j) is None) != (E.C[j - 1] is None):
                return False
        return True

    # test 2, one slot
    def pair_test(self, i: int, a: int, b: int, pair: CellPair) -> bool:
        key = (i, a, b, pair)
        hit = self._pair.get(key)
        if hit is None:
            x = cell_corner(pair[0], self.width)
            y = cell_corner(pair[1], self.width)
            sub = self.T[i].subcurve(a - 1, b - 1)
            hit = subsegment_matchable(Segment(x, y), sub, self.params.pair_radius)
            self._pair[key] = hit
        return hit

    # test 3
    def ends_test(self, i: int, first_block_end: int, E: CoarseEncoding) -> bool:
        key = (i, first_block_end, E.B[0], E.A[-1])
        hit = self._ends.get(key)
        if hit is None:
            V = self.T[i].vertices
            delta = self.params.delta
            hit = _box_near_points(E.B[0], V[:first_block_end], self.width, delta) and _box_near_points(
                E.A[-1], V[-1:], self.width, delta
            )
            self._ends[key] = hit
        return hit

    # test 4, one J pair
    def edge_test(self, i: int, b: int, a_cell: Cell, b_cell: Cell) -> bool:
        key = (i, b, a_cell, b_cell)
        hit = self._edge.get(key)
        if hit is None:
            seg = self.T[i].edge(b - 1)
            w = self.width
            lo_a = cell_corner(a_cell, w)
            lo_b = cell_corner(b_cell, w)
            a0, a1 = kernels.fattened_interval(seg.start, seg.end, lo_a, lo_a + w, 0.0)
            b0, b1 = kernels.fattened_interval(seg.start, seg.end, lo_b, lo_b + w, 0.0)
            # Some point of A on the edge precedes some point of B.
            hit = bool(a0 <= a1 and b0 <= b1 and a0 <= b1)
            self._edge[key] = hit
        return hit

    def partition_passes(self, i: int, pi: Partition, E: CoarseEncoding) -> bool:
        if not self.nullity_test(pi, E):
            return False
        if not self.ends_test(i, pi.end(0), E):
            return False
        for j in range(1, E.k):
            blk = pi.block(j)
            if blk is None:
                continue
            if not self.pair_test(i, blk[0], blk[1], E.C[j - 1]):
                return False
        for r, s in jset(E.C):
            b = pi.end(s - 1)
            if not self.edge_test(i, b, E.A[r - 1], E.B[s - 1]):
                return False
        return True

    def matches(self, i: int, E: CoarseEncoding) -> bool:
        tau = self.T[i]
        return any(self.partition_passes(i, pi, E) for pi in self.partitions(tau.m, E.k))

    def first_match(self, E: CoarseEncoding) -> Optional[int]:
        for i in range(len(self.T)):
            if self.matches(i, E):
                return i
        return None


def _box_near_points(cell: Cell, pts: np.ndarray, width: float, r: float) -> bool:
    lo = cell_corner(cell, width)
    gap = np.maximum(np.maximum(lo - pts, 0.0), pts - (lo + width))
    return bool(((gap * gap).sum(axis=1) <= r * r).all())


def curve_matches_encoding(tau, E: CoarseEncoding, params: EncodingParams) -> bool:
    """Whether some vertex partition of ``tau`` passes all four preprocessing tests for E."""
    E.validate()
    tau = as_curve(tau)
    if tau.m < 2:
        raise InvalidEncoding("input curves need at least two vertices")
    return EncodingTester([tau], params).matches(0, E)


# ---------------------------------------------------------------------------
# Query side


def check_matchable_window(E: CoarseEncoding, sigma, pair: Tuple[int, int], params: EncodingParams) -> bool:
    """Whether the corner segment of A[r], B[s] has a sub-segment near sigma[w_{r+1}..w_s]."""
    r, s = pair
    a, b = E.A[r - 1], E.B[s - 1]
    if a is None or b is None:
        raise NullCells(f"A[{r}] or B[{s}] is null")
    w = params.width
    sub = as_curve(sigma).subcurve(r, s - 1)
    return subsegment_matchable(Segment(cell_corner(a, w), cell_corner(b, w)), sub, params.window_radius)


def shoot_pairs(sigma: PolyCurve, oracle, params: EncodingParams):
    """Cell pairs (u_{j,1}, u_{j,2}) for every query edge, or NO_FOR_ANN.

    A pair is None when either query is null or when the forward hit of the
    first cell does not precede the backward hit of the second.
    """
    V = sigma.vertices
    width = params.width
    lam = params.shoot_radius
    pairs: List[Optional[CellPair]] = []
    for j in range(sigma.m - 1):
        seg = Segment(V[j], V[j + 1])
        u1 = oracle.query(seg)
        if u1.is_no:
            return NO_FOR_ANN
        u2 = oracle.query(seg.reversed())
        if u2.is_no:
            return NO_FOR_ANN
        if u1.is_null or u2.is_null:
            pairs.append(None)
            continue
        lo1 = cell_corner(u1.cell, width)
        lo2 = cell_corner(u2.cell, width)
        f0, f1 = kernels.fattened_interval(seg.start, seg.end, lo1, lo1 + width, lam)
        g0, g1 = kernels.fattened_interval(seg.start, seg.end, lo2, lo2 + width, lam)
        if not (f0 <= f1 and g0 <= g1 and f0 <= g1):
            pairs.append(None)
            continue
        pairs.append((u1.cell, u2.cell))
    return pairs


class QueryEncoder:
    """Generates the coarse encodings of query curves against one set of grids.

    With ``restrict`` (a set of G2 cells), the A/B cells attached to kept
    pairs are drawn only from that set.
    """

    def __init__(self, grids: Grids, oracle, params: EncodingParams, restrict: Optional[set] = None):
        self.grids = grids
        self.oracle = oracle
        self.params = params
        self.restrict = restrict
        self._near: Dict[Cell, np.ndarray] = {}

    def near_cells(self, cell: Cell) -> np.ndarray:
        """Lattice rows of G2 cells within (1+11 eps) delta of ``cell``, lexicographic."""
        hit = self._near.get(cell)
        if hit is None:
            lat = cells_near_cell(cell, self.params.neighbour_radius, self.grids.width)
            lat = self.grids.G2.subset(lat)
            if self.restrict is not None and lat.shape[0]:
                keep = [tuple(int(x) for x in row) in self.restrict for row in lat]
                lat = lat[np.asarray(keep, dtype=bool)]
            hit = lat
            self._near[cell] = hit
        return hit

    def window_choices(self, sigma: PolyCurve, C, r: int, s: int) -> List[Tuple[Cell, Cell]]:
        """Admissible (A[r], B[s]) for one J pair, lexicographic in (A, B)."""
        A = self.near_cells(C[r - 1][1])
        B = self.near_cells(C[s - 1][0])
        if A.shape[0] == 0 or B.shape[0] == 0:
            return []
        w = self.grids.width
        W = np.ascontiguousarray(sigma.vertices[r:s])
        ok = kernels.window_pairs(A.astype(float) * w, B.astype(float) * w, W, self.params.window_radius)
        ia, ib = np.nonzero(ok)
        cells_a = [tuple(int(x) for x in row) for row in A]
        cells_b = [tuple(int(x) for x in row) for row in B]
        return [(cells_a[p], cells_b[q]) for p, q in zip(ia.tolist(), ib.tolist())]

    def generate(self, sigma, k: Optional[int] = None) -> Iterator[Union[CoarseEncoding, SegQueryOutcome]]:
        sigma = as_curve(sigma)
        if k is not None and sigma.m != k:
            raise ArityMismatch(f"query has {sigma.m} vertices, expected {k}")
        k = sigma.m
        if k < 3:
            raise BadArity("queries need at least three vertices")
        pairs = shoot_pairs(sigma, self.oracle, self.params)
        if isinstance(pairs, SegQueryOutcome):
            yield pairs
            return
        if pairs[0] is None or pairs[-1] is None:
            return
        G2 = self.grids.G2
        V = sigma.vertices
        b_first = locate(G2, V[0])
        a_last = locate(G2, V[-1])
        if b_first is None or a_last is None:
            return
        w = self.grids.width
        lim = self.params.neighbour_radius
        if cell_distance(pairs[0][0], b_first, w) > lim or cell_distance(pairs[-1][1], a_last, w) > lim:
            return
        middle = [[pairs[j], None] if pairs[j] is not None else [None] for j in range(1, k - 2)]
        for mid in itertools.product(*middle):
            C = (pairs[0],) + tuple(mid) + (pairs[-1],)
            J = jset(C)
            choices = []
            for r, s in J:
                opts = self.window_choices(sigma, C, r, s)
                if not opts:
                    break
                choices.append(opts)
            else:
                for pick in itertools.product(*choices):
                    A: List[Optional[Cell]] = [None] * (k - 1)
                    B: List[Optional[Cell]] = [None] * (k - 1)
                    B[0] = b_first
                    A[-1] = a_last
                    for (r, s), (ca, cb) in zip(J, pick):
                        A[r - 1] = ca
                        B[s - 1] = cb
                    yield CoarseEncoding(k, C, tuple(A), tuple(B))


def edge_cells(grids: Grids, T: Sequence) -> set:
    """G2 cells met by some input edge (the only cells test 4 can accept)."""
    G2 = grids.G2
    out: set = set()
    if len(G2) == 0:
        return out
    for c in T:
        for seg in as_curve(c).edges():
            t0, t1 = kernels.segment_boxes(seg.start, seg.end, G2.lo, G2.hi, 0.0)
            for idx in np.flatnonzero(t0 <= t1).tolist():
                out.add(G2.cells[idx])
    return out


def generate_query_encodings(sigma, grids: Grids, oracle, params: EncodingParams, restrict: Optional[set] = None,
                             k: Optional[int] = None):
    """Iterator over the encodings of ``sigma`` (or a single NO_FOR_ANN)."""
    return QueryEncoder(grids, oracle, params, restrict).generate(sigma, k)


# ---------------------------------------------------------------------------
# Keys

_HEAD = struct.Struct("<HB")


def encode_key(E: CoarseEncoding) -> bytes:
    """Fixed-width little-endian serialization; equal encodings give equal bytes."""
    d = None
    for j in range(E.k - 1):
        if E.C[j] is not None:
            d = len(E.C[j][0])
            break
    if d is None:
        raise InvalidEncoding("encoding has no cells")
    zero = (0,) * d
    parts = [_HEAD.pack(E.k, d)]
    pair_fmt = struct.Struct(f"<B{2 * d}q")
    cell_fmt = struct.Struct(f"<B{d}q")
    for j in range(E.k - 1):
        c = E.C[j]
        parts.append(pair_fmt.pack(0, *zero, *zero) if c is None else pair_fmt.pack(1, *c[0], *c[1]))
        for cell in (E.A[j], E.B[j]):
            parts.append(cell_fmt.pack(0, *zero) if cell is None else cell_fmt.pack(1, *cell))
    return b"".join(parts)


def decode_key(key: bytes) -> CoarseEncoding:
    k, d = _HEAD.unpack_from(key, 0)
    pos = _HEAD.size
    cell_fmt = struct.Struct(f"<{d}q")
    flag = struct.Struct("<B")
    C, A, B = [], [], []

    def read_cell(pos):
        return tuple(cell_fmt.unpack_from(key, pos)), pos + cell_fmt.size

    for _ in range(k - 1):
        (f,) = flag.unpack_from(key, pos)
        pos += 1
        c1, pos = read_cell(pos)
        c2, pos = read_cell(pos)
        C.append((c1, c2) if f else None)
        for target in (A, B):
            (f,) = flag.unpack_from(key, pos)
            pos += 1
            cell, pos = read_cell(pos)
            target.append(cell if f else None)
    if pos != len(key):
        raise InvalidEncoding("trailing bytes in key")
    return CoarseEncoding(k, tuple(C), tuple(A), tuple(B))
