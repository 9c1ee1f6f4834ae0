"""Points, segments, boxes, curves and the region F(c, gamma)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .errors import DimensionMismatch, IterationCap, NonFiniteDistance, PointOffSegment

Point = np.ndarray
Interval = Tuple[float, float]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
MAX_ITER = 200


def as_point(p, d: Optional[int] = None) -> Point:
    arr = np.asarray(p, dtype=float).reshape(-1)
    if d is not None and arr.shape[0] != d:
        raise DimensionMismatch(f"expected dimension {d}, got {arr.shape[0]}")
    return arr


def _same_dim(*arrays: np.ndarray) -> int:
    dims = {a.shape[-1] for a in arrays}
    if len(dims) != 1:
        raise DimensionMismatch(f"dimensions differ: {sorted(dims)}")
    return dims.pop()


@dataclass(frozen=True, eq=False)
class Segment:
    """Oriented segment from ``start`` to ``end``."""

    start: Point
    end: Point

    def __post_init__(self):
        a = as_point(self.start)
        b = as_point(self.end)
        _same_dim(a, b)
        object.__setattr__(self, "start", a)
        object.__setattr__(self, "end", b)

    @property
    def vector(self) -> np.ndarray:
        return self.end - self.start

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.vector))

    def at(self, t: float) -> Point:
        return self.start + t * self.vector

    def reversed(self) -> "Segment":
        return Segment(self.end, self.start)

    def __repr__(self) -> str:
        return f"Segment({self.start.tolist()} -> {self.end.tolist()})"


class PolyCurve:
    """An oriented polygonal curve given by its vertex sequence."""

    __slots__ = ("_v",)

    def __init__(self, vertices):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 1:
            raise DimensionMismatch("a curve needs a (m, d) vertex array with m >= 1")
        if not np.all(np.isfinite(v)):
            raise ValueError("curve coordinates must be finite")
        v.setflags(write=False)
        self._v = v

    @property
    def vertices(self) -> np.ndarray:
        return self._v

    @property
    def m(self) -> int:
        return self._v.shape[0]

    @property
    def d(self) -> int:
        return self._v.shape[1]

    def __len__(self) -> int:
        return self.m

    def __getitem__(self, i):
        return self._v[i]

    def edge(self, a: int) -> Segment:
        """Edge from vertex ``a`` to vertex ``a + 1`` (0-based)."""
        return Segment(self._v[a], self._v[a + 1])

    def edges(self) -> Iterable[Segment]:
        for a in range(self.m - 1):
            yield self.edge(a)

    def subcurve(self, a: int, b: int) -> "PolyCurve":
        """Vertices ``a..b`` inclusive (0-based)."""
        return PolyCurve(self._v[a : b + 1])

    def padded(self, m: int) -> "PolyCurve":
        """Repeat the last vertex until the curve has ``m`` vertices."""
        if m <= self.m:
            return self
        extra = np.repeat(self._v[-1:], m - self.m, axis=0)
        return PolyCurve(np.vstack([self._v, extra]))

    def collapsed(self) -> "PolyCurve":
        """Drop consecutive duplicate vertices (Fréchet distance is unchanged)."""
        keep = [0]
        for i in range(1, self.m):
            if not np.array_equal(self._v[i], self._v[keep[-1]]):
                keep.append(i)
        return PolyCurve(self._v[keep])

    def translated(self, v) -> "PolyCurve":
        return PolyCurve(self._v + as_point(v, self.d))

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyCurve) and np.array_equal(self._v, other._v)

    def __hash__(self) -> int:
        return hash(self._v.tobytes())

    def __repr__(self) -> str:
        return f"PolyCurve({self._v.tolist()})"


def as_curve(c) -> PolyCurve:
    return c if isinstance(c, PolyCurve) else PolyCurve(c)


@dataclass(frozen=True, eq=False)
class Box:
    """Closed axis-aligned box."""

    lo: Point
    hi: Point

    def __post_init__(self):
        lo = as_point(self.lo)
        hi = as_point(self.hi)
        _same_dim(lo, hi)
        if np.any(lo > hi):
            raise ValueError("box needs lo <= hi componentwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def d(self) -> int:
        return self.lo.shape[0]

    @property
    def center(self) -> Point:
        return 0.5 * (self.lo + self.hi)

    def contains(self, p) -> bool:
        p = as_point(p, self.d)
        return bool(np.all(self.lo <= p) and np.all(p <= self.hi))

    def meets(self, other: "Box") -> bool:
        return bool(np.all(self.lo <= other.hi) and np.all(other.lo <= self.hi))

    def __eq__(self, other) -> bool:
        return isinstance(other, Box) and np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi)

    def __hash__(self) -> int:
        return hash((self.lo.tobytes(), self.hi.tobytes()))

    def __repr__(self) -> str:
        return f"Box({self.lo.tolist()}, {self.hi.tolist()})"


@dataclass(frozen=True)
class FRegion:
    """Points x from which some segment into ``gamma`` crosses ``c``."""

    c: Box
    gamma: Box


# ---------------------------------------------------------------------------


def param_of_point(seg: Segment, p, tol: float = 1e-9) -> float:
    """Parameter in [0, 1] of the point of ``seg`` nearest to ``p``."""
    p = as_point(p)
    _same_dim(seg.start, p)
    v = seg.vector
    vv = float(v @ v)
    t = 0.0 if vv == 0.0 else min(1.0, max(0.0, float((p - seg.start) @ v) / vv))
    if float(np.linalg.norm(seg.at(t) - p)) > tol:
        raise PointOffSegment(f"point {p.tolist()} is off {seg!r}")
    return t


def dist_point_box(p, b: Box) -> float:
    p = as_point(p)
    _same_dim(p, b.lo)
    gap = np.maximum(np.maximum(b.lo - p, 0.0), p - b.hi)
    return float(np.sqrt(gap @ gap))


def dist_point_boxes(p, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Distances from one point to many boxes given as (n, d) arrays."""
    gap = np.maximum(np.maximum(lo - p, 0.0), p - hi)
    return np.sqrt((gap * gap).sum(axis=1))


def dist_box_box(a: Box, b: Box) -> float:
    gap = np.maximum(np.maximum(a.lo - b.hi, 0.0), b.lo - a.hi)
    return float(np.sqrt(gap @ gap))


def dist_point_segment(p, seg: Segment) -> float:
    p = as_point(p)
    v = seg.vector
    vv = float(v @ v)
    t = 0.0 if vv == 0.0 else min(1.0, max(0.0, float((p - seg.start) @ v) / vv))
    return float(np.linalg.norm(seg.at(t) - p))


def dist_point_line(p, origin, direction) -> float:
    """Distance from ``p`` to the line through ``origin`` with unit ``direction``."""
    w = as_point(p) - origin
    return float(np.linalg.norm(w - (w @ direction) * direction))


def fattened_hit_interval(
    seg: Segment, dist_fn: Callable[[Point], float], r: float, tol: float
) -> Optional[Interval]:
    """Parameters t in [0, 1] where ``dist_fn(seg.at(t)) <= r``.

    ``dist_fn`` must be convex along the segment. The minimizer is located by
    golden-section search and each endpoint by bisection, to ``tol`` in length.
    Returns None when the minimum exceeds ``r + tol``.
    """
    length = seg.length

    def f(t: float) -> float:
        val = float(dist_fn(seg.at(t)))
        if not math.isfinite(val):
            raise NonFiniteDistance(f"distance function returned {val}")
        return val

    if length == 0.0:
        return (0.0, 1.0) if f(0.0) <= r + tol else None
    ttol = tol / length
    a, b = 0.0, 1.0
    c1 = b - _GOLDEN * (b - a)
    c2 = a + _GOLDEN * (b - a)
    f1, f2 = f(c1), f(c2)
    for _ in range(MAX_ITER):
        if b - a <= ttol:
            break
        if f1 <= f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - _GOLDEN * (b - a)
            f1 = f(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + _GOLDEN * (b - a)
            f2 = f(c2)
    else:
        raise IterationCap("minimizer search did not converge")
    # The minimum may sit at an end of the parameter range.
    tm, fm = min(((0.0, f(0.0)), (0.5 * (a + b), f(0.5 * (a + b))), (1.0, f(1.0))), key=lambda z: z[1])
    if fm > r + tol:
        return None
    if fm > r:
        return (tm, tm)

    def edge(inside: float, outside: float) -> float:
        if f(outside) <= r:
            return outside
        for _ in range(MAX_ITER):
            if abs(inside - outside) <= ttol:
                return inside
            mid = 0.5 * (inside + outside)
            if f(mid) <= r:
                inside = mid
            else:
                outside = mid
        raise IterationCap("endpoint bisection did not converge")

    return (edge(tm, 0.0), edge(tm, 1.0))


def box_hit_interval(seg: Segment, box: Box, r: float = 0.0) -> Optional[Interval]:
    """Exact parameter interval of ``seg`` inside ``box`` fattened by ``r``."""
    t0, t1 = kernels.fattened_interval(seg.start, seg.end, box.lo, box.hi, float(r))
    if not t0 <= t1:
        return None
    return (float(t0), float(t1))


def ball_hit_interval(seg: Segment, center, r: float) -> Optional[Interval]:
    """Exact parameter interval of ``seg`` inside the closed ball of radius ``r``."""
    lo, hi = kernels.free_interval(seg.start, seg.end, as_point(center), float(r) * float(r))
    if lo > hi:
        return None
    return (float(lo), float(hi))


# ---------------------------------------------------------------------------
# F(c, gamma)


def _u_constraints(x: np.ndarray, f: FRegion):
    """Per-axis affine constraints a + b*u <= 0 describing x in (1+u)c - u*gamma."""
    c, g = f.c, f.gamma
    a = np.concatenate([c.lo - x, x - c.hi])
    b = np.concatenate([c.lo - g.hi, g.lo - c.hi])
    return a, b


def f_membership(x, f: FRegion, tol: float = 0.0) -> bool:
    """Exact test of x in F(c, gamma), up to slack ``tol`` per axis constraint."""
    x = as_point(x)
    _same_dim(x, f.c.lo, f.gamma.lo)
    if f.c.meets(f.gamma):
        return True
    a, b = _u_constraints(x, f)
    u_lo, u_hi = 0.0, math.inf
    for ai, bi in zip(a, b):
        if bi == 0.0:
            if ai > tol:
                return False
        elif bi > 0.0:
            u_hi = min(u_hi, (tol - ai) / bi)
        else:
            u_lo = max(u_lo, (tol - ai) / bi)
    return u_lo <= u_hi


def f_distance(q, f: FRegion, method: str = "exact", tol: float = 1e-12) -> float:
    """Distance from ``q`` to F(c, gamma).

    ``method="exact"`` minimizes the convex piecewise quadratic in the scale
    parameter u exactly; ``method="search"`` brackets u by doubling and runs a
    golden-section search (a slower independent route used for cross-checks).
    """
    q = as_point(q)
    _same_dim(q, f.c.lo, f.gamma.lo)
    if f.c.meets(f.gamma):
        return 0.0
    if method == "exact":
        return math.sqrt(kernels.f_region_dist2_one(q, f.c.lo, f.c.hi, f.gamma.lo, f.gamma.hi))
    if method != "search":
        raise ValueError(f"unknown method {method!r}")

    def g(u: float) -> float:
        lo = (1.0 + u) * f.c.lo - u * f.gamma.hi
        hi = (1.0 + u) * f.c.hi - u * f.gamma.lo
        gap = np.maximum(np.maximum(lo - q, 0.0), q - hi)
        return float(np.sqrt(gap @ gap))

    top = 1.0
    while g(2.0 * top) < g(top) and top < 1e12:
        top *= 2.0
    a, b = 0.0, 2.0 * top
    for _ in range(MAX_ITER):
        if b - a <= tol * max(1.0, b):
            break
        c1 = b - _GOLDEN * (b - a)
        c2 = a + _GOLDEN * (b - a)
        if g(c1) <= g(c2):
            b = c2
        else:
            a = c1
    return min(g(0.0), g(0.5 * (a + b)))
