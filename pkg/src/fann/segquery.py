"""Approximate segment shooting against grid cells.

A lambda-segment query with an oriented segment pq returns a cell whose
lambda-fattening meets the prefix of pq up to the first cell hit, or, when pq
hits nothing, either null or a cell within lambda of pq.

Two oracles answer it: :class:`BruteOracle` (exact first hit by scanning every
cell) and :class:`SegQueryStructure` (packing lines, canonical segments and
first-hit tables).
"""

from __future__ import annotations

import bisect
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .errors import EmptySet, IterationCap, StructureMismatch
from .geometry import Box, PolyCurve, Segment, as_curve, as_point
from .grids import Cell, GridSet, Grids, _cells_near_box, check_params, g3_radius, grid_vertices
from .intervaltree import IntervalTree


@dataclass(frozen=True)
class SegQueryOutcome:
    kind: str  # "cell", "null" or "no"
    cell: Optional[Cell] = None

    @classmethod
    def hit(cls, cell: Cell) -> "SegQueryOutcome":
        return cls("cell", tuple(int(v) for v in cell))

    @property
    def is_cell(self) -> bool:
        return self.kind == "cell"

    @property
    def is_null(self) -> bool:
        return self.kind == "null"

    @property
    def is_no(self) -> bool:
        return self.kind == "no"

    def __repr__(self) -> str:
        return f"Cell{self.cell}" if self.is_cell else ("Null" if self.is_null else "NoForAnn")


NULL = SegQueryOutcome("null")
NO_FOR_ANN = SegQueryOutcome("no")


# ---------------------------------------------------------------------------
# Contract and brute-force oracle


def segment_cell_params(cells: GridSet, seg: Segment, r: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
    """Parameter interval of ``seg`` inside each cell fattened by ``r`` (empty when t0 > t1)."""
    return kernels.segment_boxes(seg.start, seg.end, cells.lo, cells.hi, float(r))


def brute_segment_query(cells: GridSet, pq: Segment, lam: float = 0.0) -> SegQueryOutcome:
    """Exact first hit along pq; ties go to the smaller lattice tuple."""
    if len(cells) == 0:
        return NULL
    t0, t1 = segment_cell_params(cells, pq)
    hit = t0 <= t1
    if not hit.any():
        return NULL
    idx = int(np.argmin(np.where(hit, t0, np.inf)))
    return SegQueryOutcome.hit(cells.cells[idx])


def answer_valid(cells: GridSet, pq: Segment, lam: float, ans: SegQueryOutcome, tol: float = 0.0) -> bool:
    """Whether ``ans`` is a correct lambda-segment query answer for pq on ``cells``.

    ``tol`` is a length slack added to lambda.
    """
    if ans.is_no:
        raise ValueError("answer_valid is undefined for NoForAnn")
    if ans.is_cell and ans.cell not in cells:
        return False
    length = pq.length
    if len(cells):
        t0, t1 = segment_cell_params(cells, pq)
        hit = t0 <= t1
    else:
        hit = np.zeros(0, dtype=bool)
    if ans.is_null:
        return not hit.any()
    box = cells.box(ans.cell)
    f0, f1 = kernels.fattened_interval(pq.start, pq.end, box.lo, box.hi, float(lam) + tol)
    if not f0 <= f1:
        return False
    if not hit.any():
        return True
    first = float(np.min(t0[hit]))
    slack = tol / length if length > 0 else 0.0
    return f0 <= first + slack


class BruteOracle:
    """Exact first-hit oracle over a cell set."""

    kind = "brute"

    def __init__(self, cells: GridSet):
        self.cells = cells

    def query(self, seg: Segment) -> SegQueryOutcome:
        return brute_segment_query(self.cells, seg)


# ---------------------------------------------------------------------------
# Packing lines


@dataclass(frozen=True, eq=False)
class PackedLine:
    origin: np.ndarray
    direction: np.ndarray
    owner: Tuple[int, int]

    def at(self, t: float) -> np.ndarray:
        return self.origin + t * self.direction

    def project(self, p) -> float:
        return float((as_point(p) - self.origin) @ self.direction)

    def distance(self, p) -> float:
        w = as_point(p) - self.origin
        return float(np.linalg.norm(w - (w @ self.direction) * self.direction))


def hyperplane_basis(u: np.ndarray) -> np.ndarray:
    """Orthonormal basis (rows) of the hyperplane orthogonal to unit vector ``u``.

    Gram-Schmidt over the canonical axes, starting with the axis least aligned
    with ``u`` (ties to the lower index) and continuing in index order.
    """
    d = u.shape[0]
    seed = int(np.argmin(np.abs(u)))
    order = [seed] + [k for k in range(d) if k != seed]
    found: List[np.ndarray] = [u]
    for k in order:
        v = np.zeros(d)
        v[k] = 1.0
        for b in found:
            v = v - (v @ b) * b
        n = np.linalg.norm(v)
        if n > 1e-9:
            found.append(v / n)
        if len(found) == d:
            break
    return np.array(found[1:]).reshape(d - 1, d)


def _edge_lines(v: np.ndarray, u: np.ndarray, eps: float, delta: float, owner) -> List[PackedLine]:
    d = v.shape[0]
    if d == 1:
        return [PackedLine(v.copy(), u.copy(), owner)]
    basis = hyperplane_basis(u)
    h = eps * delta / math.sqrt(d - 1)
    reach = (1.0 + 2.0 * eps) * delta
    K = int(math.floor(reach / h + 1e-9))
    out = []
    for z in itertools.product(range(-K, K + 1), repeat=d - 1):
        off = np.asarray(z, dtype=float) * h
        if float(np.sqrt(off @ off)) <= reach * (1.0 + 1e-12):
            origin = v + off @ basis
            out.append(PackedLine(origin, u.copy(), owner))
    return out


def build_lines(T: Sequence, eps: float, delta: float) -> List[PackedLine]:
    """Lines parallel to each nondegenerate input edge, packed around its first vertex.

    A curve without any nondegenerate edge gets the lines of a virtual edge
    along the first axis through its vertex, so its neighbourhood stays covered.
    """
    check_params(eps, delta)
    lines: List[PackedLine] = []
    for i, c in enumerate(T):
        c = as_curve(c)
        V = c.vertices
        d = V.shape[1]
        any_edge = False
        for a in range(c.m - 1):
            vec = V[a + 1] - V[a]
            n = float(np.linalg.norm(vec))
            if n == 0.0:
                continue
            any_edge = True
            lines.extend(_edge_lines(V[a], vec / n, eps, delta, (i, a)))
        if not any_edge:
            u = np.zeros(d)
            u[0] = 1.0
            lines.extend(_edge_lines(V[0], u, eps, delta, (i, -1)))
    return lines


class LineSet:
    """Lines stacked into arrays for vectorized distance scans."""

    def __init__(self, lines: Sequence[PackedLine], d: int):
        self.lines = list(lines)
        self.origins = np.array([l.origin for l in self.lines]).reshape(-1, d)
        self.directions = np.array([l.direction for l in self.lines]).reshape(-1, d)

    def __len__(self) -> int:
        return len(self.lines)

    def __getitem__(self, i: int) -> PackedLine:
        return self.lines[i]

    def distances(self, q) -> np.ndarray:
        w = as_point(q)[None, :] - self.origins
        along = (w * self.directions).sum(axis=1)
        perp = w - along[:, None] * self.directions
        return np.sqrt((perp * perp).sum(axis=1))


def approx_nearest_point_to_line(points: np.ndarray, origin, direction) -> np.ndarray:
    """Nearest point to the line (exact scan); ties go to the lexicographically first point."""
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] == 0:
        raise EmptySet("no points to search")
    order = np.lexsort(pts.T[::-1])
    pts = pts[order]
    u = as_point(direction)
    u = u / np.linalg.norm(u)
    w = pts - as_point(origin)[None, :]
    perp = w - (w @ u)[:, None] * u[None, :]
    return pts[int(np.argmin((perp * perp).sum(axis=1)))]


def approx_nearest_line_to_point(lines, q) -> int:
    """Index of the nearest line (exact scan); ties go to construction order."""
    ls = lines if isinstance(lines, LineSet) else LineSet(lines, as_point(q).shape[0])
    if len(ls) == 0:
        raise EmptySet("no lines to search")
    return int(np.argmin(ls.distances(q)))


def f_interval_on_line(line: PackedLine, c: Box, gamma: Box, r: float, tol: float, tmax: float):
    """Parameters t with dist(line(t), F(c, gamma)) <= r, or None when empty."""
    t0, t1, capped = kernels.line_f_intervals(
        line.origin, line.direction, c.lo[None, :], c.hi[None, :], gamma.lo[None, :], gamma.hi[None, :],
        np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64), float(r), float(tmax), float(tol),
    )
    if capped:
        raise IterationCap("line interval search hit the iteration cap")
    if math.isnan(t0[0]):
        return None
    return (float(t0[0]), float(t1[0]))


# ---------------------------------------------------------------------------
# Canonical segments


@dataclass(frozen=True)
class CanonicalSegment:
    line: int
    lo: float
    hi: float
    anchor: float

    def contains(self, t: float) -> bool:
        return self.lo <= t <= self.hi


class CanonicalPartition:
    """Partition of a line by sorted endpoints.

    Location goes through an interval tree when ``indexed``, else through
    binary search on the endpoints (same answer, cheaper to build).
    """

    def __init__(self, line: int, endpoints: np.ndarray, width: float, tol: float, indexed: bool = True):
        pts = np.sort(np.asarray(endpoints, dtype=float))
        kept: List[float] = []
        for e in pts:
            if not kept or e - kept[-1] > tol:
                kept.append(float(e))
        self.endpoints = kept
        bounds = [-math.inf] + kept + [math.inf]
        segs = []
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            if math.isinf(lo) and math.isinf(hi):
                anchor = 0.0
            elif math.isinf(lo):
                anchor = hi - width
            elif math.isinf(hi):
                anchor = lo + width
            else:
                anchor = 0.5 * (lo + hi)
            segs.append(CanonicalSegment(line, lo, hi, anchor))
        self.segments = segs
        self.tree = IntervalTree([(s.lo, s.hi, i) for i, s in enumerate(segs)]) if indexed else None

    def __len__(self) -> int:
        return len(self.segments)

    def locate(self, t: float) -> int:
        # A point on a shared endpoint belongs to the segment on its right.
        if self.tree is not None:
            return max(self.tree.stab(float(t)))
        return bisect.bisect_right(self.endpoints, float(t))


def _line_box_params(p: np.ndarray, u: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """Entry/exit parameters of the line p + s*u through boxes (s_in > s_out when missed)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        a = (lo - p[None, :]) / u[None, :]
        b = (hi - p[None, :]) / u[None, :]
    flat = u[None, :] == 0.0
    inside = (p[None, :] >= lo) & (p[None, :] <= hi)
    a = np.where(flat, np.where(inside, -np.inf, np.inf), a)
    b = np.where(flat, np.where(inside, np.inf, -np.inf), b)
    s_in = np.minimum(a, b).max(axis=1)
    s_out = np.maximum(a, b).min(axis=1)
    return s_in, s_out


@dataclass
class _Lookup:
    segment: int
    members: np.ndarray  # indices into G1 of C_{gamma, xi}
    first: Optional[int]  # index into G1 of c_{gamma, xi}


class SegQueryStructure:
    """The (11 eps delta)-segment query structure on G1.

    ``mode="local"`` cuts each line only by the interval endpoints of the
    queried cell gamma; ``mode="global"`` cuts it by the endpoints over all
    gamma in G3. All tables are computed on first use and memoized; call
    :meth:`build_all` to fill the global tables eagerly.
    """

    kind = "canonical"

    def __init__(
        self,
        T: Sequence,
        eps: float,
        delta: float,
        mode: str = "local",
        tol: Optional[float] = None,
        tmax: Optional[float] = None,
        grids: Optional[Grids] = None,
    ):
        check_params(eps, delta)
        if mode not in ("local", "global"):
            raise ValueError(f"unknown mode {mode!r}")
        self.T = [as_curve(c) for c in T]
        self.eps = float(eps)
        self.delta = float(delta)
        self.mode = mode
        self.grids = grids if grids is not None else Grids(self.T, eps, delta)
        if self.grids.eps != self.eps or self.grids.delta != self.delta:
            raise StructureMismatch("grids were built with different eps/delta")
        self.G1 = self.grids.G1
        self.width = self.grids.width
        self.d = self.grids.d
        self.tol = float(tol) if tol is not None else 1e-9 * self.delta
        self.r = 2.0 * self.eps * self.delta
        self.vertices = grid_vertices(self.G1)
        self.lines = LineSet(build_lines(self.T, eps, delta), self.d)
        V = self.grids.vertices
        if tmax is None:
            span = float(np.linalg.norm(V.max(axis=0) - V.min(axis=0))) if V.size else 0.0
            tmax = 10.0 * (span + g3_radius(eps, delta) + self.delta)
        self.tmax = float(tmax)
        self.stats: Counter = Counter()
        self._pair: Dict[Tuple[int, Cell], Tuple[np.ndarray, np.ndarray]] = {}
        self._table: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
        self._partition: Dict[object, CanonicalPartition] = {}
        self._lookup: Dict[Tuple[int, Cell, int], _Lookup] = {}

    # -- interval tables ---------------------------------------------------

    def _intervals_for(self, li: int, glo: np.ndarray, ghi: np.ndarray):
        line = self.lines[li]
        n1 = len(self.G1)
        ng = glo.shape[0]
        ci = np.tile(np.arange(n1, dtype=np.int64), ng)
        gi = np.repeat(np.arange(ng, dtype=np.int64), n1)
        t0, t1, capped = kernels.line_f_intervals(
            line.origin, line.direction, self.G1.lo, self.G1.hi, glo, ghi, ci, gi, self.r, self.tmax, self.tol
        )
        if capped:
            self.stats["interval_capped"] += int(capped)
        return t0.reshape(ng, n1), t1.reshape(ng, n1)

    def _global_ok(self, gamma: Cell) -> bool:
        return self.mode == "global" and gamma in self.grids.G3

    def line_table(self, li: int) -> Tuple[np.ndarray, np.ndarray]:
        """Intervals I(c, gamma) on line ``li`` for all gamma in G3 (rows) and c in G1 (columns)."""
        if li not in self._table:
            G3 = self.grids.G3
            self._table[li] = self._intervals_for(li, G3.lo, G3.hi)
        return self._table[li]

    def intervals(self, li: int, gamma: Cell) -> Tuple[np.ndarray, np.ndarray]:
        """Intervals I(c, gamma) on line ``li`` for every c in G1 (nan marks empty)."""
        gamma = tuple(gamma)
        if self._global_ok(gamma):
            t0, t1 = self.line_table(li)
            row = self.grids.G3.index_of(gamma)
            return t0[row], t1[row]
        key = (li, gamma)
        if key not in self._pair:
            box = self.G1.box(gamma)
            t0, t1 = self._intervals_for(li, box.lo[None, :], box.hi[None, :])
            self._pair[key] = (t0[0], t1[0])
        return self._pair[key]

    def partition(self, li: int, gamma: Optional[Cell] = None) -> CanonicalPartition:
        """Canonical segments of line ``li`` that apply to ``gamma``."""
        if gamma is not None:
            gamma = tuple(gamma)
        if gamma is None or self._global_ok(gamma):
            if self.mode != "global":
                raise ValueError("the per-line partition needs mode='global'")
            key: object = li
            if key not in self._partition:
                t0, t1 = self.line_table(li)
                ends = np.concatenate([t0.ravel(), t1.ravel()])
                self._partition[key] = CanonicalPartition(li, ends[np.isfinite(ends)], self.width, self.tol)
            return self._partition[key]
        if self.mode == "global":
            self.stats["gamma_outside_G3"] += 1
        key = (li, gamma)
        if key not in self._partition:
            t0, t1 = self.intervals(li, gamma)
            ends = np.concatenate([t0, t1])
            self._partition[key] = CanonicalPartition(
                li, ends[np.isfinite(ends)], self.width, self.tol, indexed=False
            )
        return self._partition[key]

    def build_all(self) -> "SegQueryStructure":
        """Fill every per-line table and partition (global mode)."""
        if self.mode != "global":
            raise ValueError("build_all needs mode='global'")
        for li in range(len(self.lines)):
            self.partition(li)
        return self

    # -- C_{gamma, xi} and c_{gamma, xi} ------------------------------------

    def lookup(self, li: int, gamma: Cell, xi: int) -> _Lookup:
        gamma = tuple(gamma)
        key = (li, gamma, xi)
        hit = self._lookup.get(key)
        if hit is not None:
            return hit
        seg = self.partition(li, gamma).segments[xi]
        t0, t1 = self.intervals(li, gamma)
        with np.errstate(invalid="ignore"):
            members = np.flatnonzero((t0 <= seg.lo + self.tol) & (t1 >= seg.hi - self.tol))
        first = None
        if members.size:
            line = self.lines[li]
            p_xi = line.at(seg.anchor)
            p_gamma = self.G1.box(gamma).center
            s0, s1 = kernels.segment_boxes(
                p_xi, p_gamma, self.G1.lo[members], self.G1.hi[members], 5.0 * self.eps * self.delta
            )
            ok = s0 <= s1
            if not ok.all():
                self.stats["anchor_walk_miss"] += int((~ok).sum())
            if ok.any():
                first = int(members[int(np.argmin(np.where(ok, s0, np.inf)))])
        res = _Lookup(xi, members, first)
        self._lookup[key] = res
        return res

    def members(self, li: int, gamma: Cell, xi: int) -> List[Cell]:
        return [self.G1.cells[i] for i in self.lookup(li, gamma, xi).members]

    def first_hit_cell(self, li: int, gamma: Cell, xi: int) -> Optional[Cell]:
        f = self.lookup(li, gamma, xi).first
        return None if f is None else self.G1.cells[f]

    # -- query ---------------------------------------------------------------

    def _fallback(self, seg: Segment, reason: str) -> SegQueryOutcome:
        self.stats["fallback:" + reason] += 1
        return brute_segment_query(self.G1, seg)

    def _near_cell(self, z: np.ndarray) -> Optional[Cell]:
        """Nearest G1 cell within 7 eps delta of z (ties to the smaller lattice tuple)."""
        if len(self.G1) == 0:
            return None
        gap = np.maximum(np.maximum(self.G1.lo - z, 0.0), z - self.G1.hi)
        dist = np.sqrt((gap * gap).sum(axis=1))
        i = int(np.argmin(dist))
        if dist[i] > 7.0 * self.eps * self.delta + self.tol:
            return None
        return self.G1.cells[i]

    def _step_a(self, seg: Segment, z: np.ndarray) -> SegQueryOutcome:
        cell = self._near_cell(z)
        if cell is None:
            return self._fallback(seg, "no_cell_near_point")
        return SegQueryOutcome.hit(cell)

    def _locate(self, li: int, gamma: Cell, point: np.ndarray) -> Optional[_Lookup]:
        line = self.lines[li]
        t = line.project(point)
        if abs(t) > self.tmax:
            return None
        xi = self.partition(li, gamma).locate(t)
        return self.lookup(li, gamma, xi)

    def _step_b(self, seg: Segment, li: int, gamma: Cell, s_in: float) -> SegQueryOutcome:
        p = seg.start
        L = seg.length
        found = self._locate(li, gamma, p)
        if found is None:
            return self._fallback(seg, "projection_beyond_tmax")
        lam = 11.0 * self.eps * self.delta
        if found.first is not None:
            box = self.G1.box(self.G1.cells[found.first])
            f0, f1 = kernels.fattened_interval(seg.start, seg.end, box.lo, box.hi, lam)
            if f0 <= f1:
                return SegQueryOutcome.hit(self.G1.cells[found.first])
        if s_in <= L + self.tol:
            if found.members.size == 0:
                # Nothing is hit before gamma; the first hit, if any, lies beyond the entry point.
                u = seg.vector / L
                return self._step_a(seg, p + s_in * u)
            return self._fallback(seg, "first_cell_missed")
        if found.first is None and found.members.size:
            return self._fallback(seg, "first_cell_missing")
        return NULL

    def _pick_gamma(self, seg: Segment, u: np.ndarray, x: np.ndarray):
        """Cells of G(x + B_{2 eps delta}) met by the support line, first in lattice order."""
        lat = _cells_near_box(x, x, 2.0 * self.eps * self.delta, self.width)
        lat = np.unique(lat, axis=0)
        lo = lat * self.width
        s_in, s_out = _line_box_params(seg.start, u, lo, lo + self.width)
        ok = np.flatnonzero(s_in <= s_out + self.tol)
        if ok.size == 0:
            return None
        i = int(ok[0])
        return tuple(int(v) for v in lat[i]), float(s_in[i]), float(s_out[i])

    def _point_query(self, p: np.ndarray) -> SegQueryOutcome:
        if len(self.G1) == 0:
            return NULL
        inside = np.all((self.G1.lo <= p) & (p <= self.G1.hi), axis=1)
        idx = np.flatnonzero(inside)
        if idx.size == 0:
            return NULL
        return SegQueryOutcome.hit(self.G1.cells[int(idx[0])])

    def query(self, seg: Segment) -> SegQueryOutcome:
        """Answer the (11 eps delta)-segment query with oriented segment ``seg`` on G1."""
        if seg.start.shape[0] != self.d:
            raise StructureMismatch("query dimension differs from the structure")
        p, q = seg.start, seg.end
        L = seg.length
        if L <= self.tol:
            return self._point_query(p)
        if len(self.G1) == 0:
            return NULL
        u = seg.vector / L
        # Step 1: nearest grid vertex of G1 to the support line.
        x = approx_nearest_point_to_line(self.vertices, p, u)
        w = x - p
        if float(np.linalg.norm(w - (w @ u) * u)) > (1.0 + self.eps) * self.eps * self.delta:
            return NULL
        # Step 2: both endpoints must be near the packing lines.
        lj = approx_nearest_line_to_point(self.lines, p)
        lj1 = approx_nearest_line_to_point(self.lines, q)
        lim = 2.0 * self.eps * self.delta
        if self.lines[lj].distance(p) > lim or self.lines[lj1].distance(q) > lim:
            return NO_FOR_ANN
        # Step 3.
        picked = self._pick_gamma(seg, u, x)
        if picked is None:
            return self._fallback(seg, "no_gamma_on_line")
        gamma, s_in, s_out = picked
        if s_in <= self.tol and s_out >= -self.tol:
            return self._step_a(seg, p)
        if s_in > 0.0:
            return self._step_b(seg, lj, gamma, s_in)
        # Step 3(c): gamma lies behind w_j; look from w_{j+1} instead.
        found = self._locate(lj1, gamma, q)
        if found is None:
            return self._fallback(seg, "projection_beyond_tmax")
        if found.first is None:
            if found.members.size:
                return self._fallback(seg, "first_cell_missing")
            return NULL
        c_prime = self.G1.cells[found.first]
        gamma_hat = self._gamma_near(seg, c_prime, 5.0)
        if gamma_hat is None:
            gamma_hat = self._gamma_near(seg, c_prime, 11.0)
            if gamma_hat is not None:
                self.stats["gamma_hat_wide"] += 1
        if gamma_hat is None:
            return NULL
        g_lo = np.asarray(gamma_hat, dtype=float) * self.width
        s_in, s_out = _line_box_params(p, u, g_lo[None, :], g_lo[None, :] + self.width)
        s_in, s_out = float(s_in[0]), float(s_out[0])
        if s_in <= self.tol and s_out >= -self.tol:
            return self._step_a(seg, p)
        if s_in > 0.0:
            return self._step_b(seg, lj, gamma_hat, s_in)
        return self._fallback(seg, "gamma_hat_behind")

    def _gamma_near(self, seg: Segment, cell: Cell, factor: float) -> Optional[Cell]:
        """Smallest-lattice cell within ``factor`` eps delta of ``cell`` that meets the segment."""
        lo = np.asarray(cell, dtype=float) * self.width
        lat = _cells_near_box(lo, lo + self.width, factor * self.eps * self.delta, self.width)
        lat = np.unique(lat, axis=0)
        clo = lat * self.width
        t0, t1 = kernels.segment_boxes(seg.start, seg.end, clo, clo + self.width, 0.0)
        ok = np.flatnonzero(t0 <= t1)
        if ok.size == 0:
            return None
        return tuple(int(v) for v in lat[int(ok[0])])

    # -- certificates ----------------------------------------------------------

    def line_distance(self, p) -> float:
        return float(self.lines.distances(p).min()) if len(self.lines) else math.inf


def build_canonical_structure(T: Sequence, eps: float, delta: float, eager: bool = False, **kw) -> SegQueryStructure:
    """Structure whose lines are cut by the interval endpoints over all of G3."""
    s = SegQueryStructure(T, eps, delta, mode="global", **kw)
    if eager:
        s.build_all()
    return s


def make_oracle(kind: str, T: Sequence, eps: float, delta: float, grids: Optional[Grids] = None, **kw):
    if kind == "brute":
        g = grids if grids is not None else Grids([as_curve(c) for c in T], eps, delta)
        return BruteOracle(g.G1)
    if kind == "canonical":
        return SegQueryStructure(T, eps, delta, grids=grids, **kw)
    raise ValueError(f"unknown oracle {kind!r}")
