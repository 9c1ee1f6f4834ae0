"""Continuous and discrete Fréchet distance."""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import DimensionMismatch
from .geometry import PolyCurve, Segment, as_curve, ball_hit_interval


def _arrays(a, b):
    va = as_curve(a).vertices
    vb = as_curve(b).vertices
    if va.shape[1] != vb.shape[1]:
        raise DimensionMismatch(f"curve dimensions differ: {va.shape[1]} vs {vb.shape[1]}")
    return va, vb


def frechet_decide(a, b, r: float) -> bool:
    """True iff the continuous Fréchet distance between ``a`` and ``b`` is at most ``r``."""
    va, vb = _arrays(a, b)
    if r < 0:
        return False
    return bool(kernels.frechet_decide(va, vb, float(r)))


def frechet_value(a, b, tol: float = 1e-7) -> float:
    """Fréchet distance to within ``tol`` by bisection on the decision procedure."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    va, vb = _arrays(a, b)
    lower = max(float(np.linalg.norm(va[0] - vb[0])), float(np.linalg.norm(va[-1] - vb[-1])))
    diff = va[:, None, :] - vb[None, :, :]
    upper = float(np.sqrt((diff * diff).sum(axis=2)).max())
    if kernels.frechet_decide(va, vb, lower):
        return lower
    lo, hi = lower, upper
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if kernels.frechet_decide(va, vb, mid):
            hi = mid
        else:
            lo = mid
    return hi


def segment_curve_decide(seg: Segment, c, r: float) -> bool:
    """Fréchet decision for a segment against a curve (one row of free space)."""
    vc = as_curve(c).vertices
    if vc.shape[1] != seg.start.shape[0]:
        raise DimensionMismatch("segment and curve dimensions differ")
    if r < 0:
        return False
    return bool(kernels.segment_curve_decide(seg.start, seg.end, vc, float(r)))


def subsegment_matchable(seg: Segment, c, r: float) -> bool:
    """Whether some ordered sub-segment x'y' of ``seg`` is within Fréchet distance ``r`` of ``c``.

    The candidate sub-segment runs from the first point of ``seg`` near the
    first vertex of ``c`` to the last point of ``seg`` near its last vertex;
    shrinking it further can only hurt.
    """
    vc = as_curve(c).vertices
    if vc.shape[1] != seg.start.shape[0]:
        raise DimensionMismatch("segment and curve dimensions differ")
    first = ball_hit_interval(seg, vc[0], r)
    last = ball_hit_interval(seg, vc[-1], r)
    if first is None or last is None:
        return False
    p, q = first[0], last[1]
    if p > q:
        return False
    # p and q lie on the ball boundaries, so rounding may push them just outside.
    scale = max(float(np.abs(vc).max()), float(np.abs(seg.start).max()), float(np.abs(seg.end).max()))
    return bool(kernels.segment_curve_decide(seg.at(p), seg.at(q), vc, kernels.clip_radius(float(r), scale)))


def discrete_frechet(a, b) -> float:
    va, vb = _arrays(a, b)
    return float(kernels.discrete_frechet(va, vb))


def resample(c, spacing: float) -> PolyCurve:
    """Insert vertices along every edge so consecutive vertices are at most ``spacing`` apart."""
    v = as_curve(c).vertices
    pts = [v[0]]
    for a, b in zip(v[:-1], v[1:]):
        n = max(1, int(np.ceil(np.linalg.norm(b - a) / spacing)))
        for s in range(1, n + 1):
            pts.append(a + (b - a) * (s / n))
    return PolyCurve(np.array(pts))
