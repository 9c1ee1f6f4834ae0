"""Numeric kernels behind the geometric and Fréchet predicates.

Each kernel exists in two forms: a loop-style function compiled with numba
(``*_jit``) and a numpy / plain-Python fallback (``*_np``). The public name
(without suffix) is bound to whichever backend :mod:`fann._accel` selected.
All kernels take float64 arrays and return plain floats, bools or arrays.
"""

from __future__ import annotations

import math

import numpy as np

from ._accel import compiled, helper, pick

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
MAX_ITER = 200

# Status codes reported by the iterative kernels.
OK = 0
CAPPED = 1

CLIP_SLACK = 1e-12  # radius slack for points placed exactly on a ball boundary


@helper
def clip_radius(r, scale):
    """Radius widened to absorb rounding of points clipped onto a ball of radius r.

    The rounding of x + t(y - x) grows with the coordinates, not with r, so the
    slack has an absolute part as well.
    """
    return r + CLIP_SLACK * (r + scale)


# ---------------------------------------------------------------------------
# Fréchet distance


@helper
def _free_interval(a, b, c, r2):
    """Parameters s in [0, 1] with |a + s(b - a) - c|^2 <= r2; empty when lo > hi."""
    aa = 0.0
    bb = 0.0
    cc = 0.0
    for k in range(a.shape[0]):
        e = b[k] - a[k]
        f = a[k] - c[k]
        aa += e * e
        bb += e * f
        cc += f * f
    cc -= r2
    if aa == 0.0:
        if cc <= 0.0:
            return 0.0, 1.0
        return 1.0, 0.0
    disc = bb * bb - aa * cc
    if disc < 0.0:
        return 1.0, 0.0
    s = math.sqrt(disc)
    lo = (-bb - s) / aa
    hi = (-bb + s) / aa
    if lo < 0.0:
        lo = 0.0
    if hi > 1.0:
        hi = 1.0
    return lo, hi


@helper
def _dist2(a, b):
    acc = 0.0
    for k in range(a.shape[0]):
        t = a[k] - b[k]
        acc += t * t
    return acc


@helper
def _frechet_decide_loop(P, Q, r):
    p = P.shape[0]
    q = Q.shape[0]
    r2 = r * r
    if _dist2(P[0], Q[0]) > r2 or _dist2(P[p - 1], Q[q - 1]) > r2:
        return False
    if p == 1 or q == 1:
        # One curve is a point: the farthest point of the other curve is a vertex.
        for i in range(p):
            for j in range(q):
                if _dist2(P[i], Q[j]) > r2:
                    return False
        return True
    # bottom[i, j]: reachable part of the free interval on edge i of P for vertex j of Q.
    # left[i, j]: reachable part of the free interval on edge j of Q for vertex i of P.
    b_lo = np.empty((p - 1, q))
    b_hi = np.empty((p - 1, q))
    l_lo = np.empty((p, q - 1))
    l_hi = np.empty((p, q - 1))
    open_ = True
    for i in range(p - 1):
        lo, hi = _free_interval(P[i], P[i + 1], Q[0], r2)
        if open_ and lo <= hi and lo == 0.0:
            b_lo[i, 0] = lo
            b_hi[i, 0] = hi
            open_ = hi == 1.0
        else:
            b_lo[i, 0] = 1.0
            b_hi[i, 0] = 0.0
            open_ = False
    open_ = True
    for j in range(q - 1):
        lo, hi = _free_interval(Q[j], Q[j + 1], P[0], r2)
        if open_ and lo <= hi and lo == 0.0:
            l_lo[0, j] = lo
            l_hi[0, j] = hi
            open_ = hi == 1.0
        else:
            l_lo[0, j] = 1.0
            l_hi[0, j] = 0.0
            open_ = False
    for i in range(p - 1):
        for j in range(q - 1):
            has_b = b_lo[i, j] <= b_hi[i, j]
            has_l = l_lo[i, j] <= l_hi[i, j]
            # right side of cell (i, j)
            lo, hi = _free_interval(Q[j], Q[j + 1], P[i + 1], r2)
            if lo <= hi and (has_b or has_l):
                if not has_b and l_lo[i, j] > lo:
                    lo = l_lo[i, j]
            else:
                lo, hi = 1.0, 0.0
            l_lo[i + 1, j] = lo
            l_hi[i + 1, j] = hi
            # top side of cell (i, j)
            lo, hi = _free_interval(P[i], P[i + 1], Q[j + 1], r2)
            if lo <= hi and (has_b or has_l):
                if not has_l and b_lo[i, j] > lo:
                    lo = b_lo[i, j]
            else:
                lo, hi = 1.0, 0.0
            b_lo[i, j + 1] = lo
            b_hi[i, j + 1] = hi
    if l_lo[p - 1, q - 2] <= l_hi[p - 1, q - 2] and l_hi[p - 1, q - 2] == 1.0:
        return True
    if b_lo[p - 2, q - 1] <= b_hi[p - 2, q - 1] and b_hi[p - 2, q - 1] == 1.0:
        return True
    return False


@helper
def _segment_curve_decide_loop(a, b, Q, r):
    """Single-row sweep of the free space of segment ab against curve Q."""
    q = Q.shape[0]
    r2 = r * r
    if _dist2(a, Q[0]) > r2 or _dist2(b, Q[q - 1]) > r2:
        return False
    if q == 1:
        return True
    lo, hi = _free_interval(a, b, Q[0], r2)
    b_lo = lo
    b_ok = lo <= hi
    col_open = True
    for j in range(q - 1):
        llo, lhi = _free_interval(Q[j], Q[j + 1], a, r2)
        has_l = col_open and llo <= lhi and llo == 0.0
        if not (b_ok or has_l):
            return False
        rlo, rhi = _free_interval(Q[j], Q[j + 1], b, r2)
        tlo, thi = _free_interval(a, b, Q[j + 1], r2)
        if not has_l and b_lo > tlo:
            tlo = b_lo
        if j == q - 2:
            return (rlo <= rhi and rhi == 1.0) or (tlo <= thi and thi == 1.0)
        b_ok = tlo <= thi
        b_lo = tlo
        col_open = has_l and lhi == 1.0
    return False


def _discrete_frechet_loop(P, Q):
    p = P.shape[0]
    q = Q.shape[0]
    ca = np.empty((p, q))
    for i in range(p):
        for j in range(q):
            dd = math.sqrt(_dist2(P[i], Q[j]))
            if i == 0 and j == 0:
                ca[i, j] = dd
            elif i == 0:
                ca[i, j] = max(ca[i, j - 1], dd)
            elif j == 0:
                ca[i, j] = max(ca[i - 1, j], dd)
            else:
                ca[i, j] = max(min(ca[i - 1, j], ca[i - 1, j - 1], ca[i, j - 1]), dd)
    return ca[p - 1, q - 1]


def _discrete_frechet_np(P, Q):
    """Anti-diagonal vectorized dynamic program."""
    dist = np.sqrt(((P[:, None, :] - Q[None, :, :]) ** 2).sum(axis=2))
    p, q = dist.shape
    ca = np.full((p, q), np.inf)
    for s in range(p + q - 1):
        i = np.arange(max(0, s - q + 1), min(p, s + 1))
        j = s - i
        if s == 0:
            ca[0, 0] = dist[0, 0]
            continue
        best = np.full(i.shape, np.inf)
        m = i > 0
        best[m] = np.minimum(best[m], ca[i[m] - 1, j[m]])
        m = j > 0
        best[m] = np.minimum(best[m], ca[i[m], j[m] - 1])
        m = (i > 0) & (j > 0)
        best[m] = np.minimum(best[m], ca[i[m] - 1, j[m] - 1])
        ca[i, j] = np.maximum(best, dist[i, j])
    return float(ca[p - 1, q - 1])


# ---------------------------------------------------------------------------
# Segments against boxes


@helper
def _slab(p, q, lo, hi):
    t_in = 0.0
    t_out = 1.0
    for k in range(p.shape[0]):
        dk = q[k] - p[k]
        if dk == 0.0:
            if p[k] < lo[k] or p[k] > hi[k]:
                return np.inf, -np.inf
        else:
            ta = (lo[k] - p[k]) / dk
            tb = (hi[k] - p[k]) / dk
            if ta > tb:
                ta, tb = tb, ta
            if ta > t_in:
                t_in = ta
            if tb < t_out:
                t_out = tb
            if t_in > t_out:
                return np.inf, -np.inf
    return t_in, t_out


@helper
def _fattened(p, q, lo, hi, r):
    """Exact parameter interval of segment pq inside box [lo, hi] fattened by r."""
    if r <= 0.0:
        return _slab(p, q, lo, hi)
    d = p.shape[0]
    bps = np.empty(2 * d + 2)
    n = 0
    bps[n] = 0.0
    n += 1
    for k in range(d):
        dk = q[k] - p[k]
        if dk != 0.0:
            t = (lo[k] - p[k]) / dk
            if 0.0 < t < 1.0:
                bps[n] = t
                n += 1
            t = (hi[k] - p[k]) / dk
            if 0.0 < t < 1.0:
                bps[n] = t
                n += 1
    bps[n] = 1.0
    n += 1
    for i in range(1, n):
        v = bps[i]
        j = i - 1
        while j >= 0 and bps[j] > v:
            bps[j + 1] = bps[j]
            j -= 1
        bps[j + 1] = v
    r2 = r * r
    best0 = np.inf
    best1 = -np.inf
    for s in range(n - 1):
        t0 = bps[s]
        t1 = bps[s + 1]
        mid = 0.5 * (t0 + t1)
        A = 0.0
        B = 0.0
        C = -r2
        for k in range(d):
            dk = q[k] - p[k]
            x = p[k] + mid * dk
            if x < lo[k]:
                a = lo[k] - p[k]
                b = -dk
            elif x > hi[k]:
                a = p[k] - hi[k]
                b = dk
            else:
                continue
            A += b * b
            B += 2.0 * a * b
            C += a * a
        if A > 0.0:
            disc = B * B - 4.0 * A * C
            if disc < 0.0:
                continue
            sq = math.sqrt(disc)
            u0 = (-B - sq) / (2.0 * A)
            u1 = (-B + sq) / (2.0 * A)
        elif B != 0.0:
            root = -C / B
            if B > 0.0:
                u0 = -np.inf
                u1 = root
            else:
                u0 = root
                u1 = np.inf
        elif C <= 0.0:
            u0 = -np.inf
            u1 = np.inf
        else:
            continue
        if u0 < t0:
            u0 = t0
        if u1 > t1:
            u1 = t1
        if u0 <= u1:
            if u0 < best0:
                best0 = u0
            if u1 > best1:
                best1 = u1
    return best0, best1


def _segment_boxes_loop(p, q, lo, hi, r):
    n = lo.shape[0]
    t0 = np.empty(n)
    t1 = np.empty(n)
    for i in range(n):
        a, b = _fattened(p, q, lo[i], hi[i], r)
        t0[i] = a
        t1[i] = b
    return t0, t1


def _segment_boxes_np(p, q, lo, hi, r):
    """Vectorized counterpart of :func:`_segment_boxes_loop`."""
    n, d = lo.shape
    if n == 0:
        return np.empty(0), np.empty(0)
    dvec = q - p
    if r <= 0.0:
        with np.errstate(divide="ignore", invalid="ignore"):
            ta = (lo - p) / dvec
            tb = (hi - p) / dvec
        enter = np.minimum(ta, tb)
        leave = np.maximum(ta, tb)
        flat = dvec == 0.0
        inside = (p >= lo) & (p <= hi)
        enter = np.where(flat, np.where(inside, -np.inf, np.inf), enter)
        leave = np.where(flat, np.where(inside, np.inf, -np.inf), leave)
        t_in = np.maximum(enter.max(axis=1), 0.0)
        t_out = np.minimum(leave.min(axis=1), 1.0)
        miss = t_in > t_out
        return np.where(miss, np.inf, t_in), np.where(miss, -np.inf, t_out)
    with np.errstate(divide="ignore", invalid="ignore"):
        cand = np.concatenate([(lo - p) / dvec, (hi - p) / dvec], axis=1)
    cand = np.where(np.isfinite(cand) & (cand > 0.0) & (cand < 1.0), cand, 1.0)
    bps = np.sort(np.concatenate([np.zeros((n, 1)), cand, np.ones((n, 1))], axis=1), axis=1)
    t0s = bps[:, :-1]
    t1s = bps[:, 1:]
    mid = 0.5 * (t0s + t1s)
    x = p[None, None, :] + mid[:, :, None] * dvec[None, None, :]
    below = x < lo[:, None, :]
    above = x > hi[:, None, :]
    a = np.where(below, (lo - p)[:, None, :], np.where(above, (p - hi)[:, None, :], 0.0))
    b = np.where(below, -dvec, np.where(above, dvec, 0.0))
    A = (b * b).sum(axis=2)
    B = (2.0 * a * b).sum(axis=2)
    C = (a * a).sum(axis=2) - r * r
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = B * B - 4.0 * A * C
        sq = np.sqrt(np.maximum(disc, 0.0))
        q0 = (-B - sq) / (2.0 * A)
        q1 = (-B + sq) / (2.0 * A)
        root = -C / B
    quad = A > 0.0
    lin = (~quad) & (B != 0.0)
    const = (~quad) & (B == 0.0)
    u0 = np.where(quad, q0, np.where(lin, np.where(B > 0.0, -np.inf, root), -np.inf))
    u1 = np.where(quad, q1, np.where(lin, np.where(B > 0.0, root, np.inf), np.inf))
    valid = np.where(quad, disc >= 0.0, np.where(const, C <= 0.0, True))
    u0 = np.maximum(u0, t0s)
    u1 = np.minimum(u1, t1s)
    valid &= u0 <= u1
    best0 = np.where(valid, u0, np.inf).min(axis=1)
    best1 = np.where(valid, u1, -np.inf).max(axis=1)
    return best0, best1


# ---------------------------------------------------------------------------
# The region F(c, gamma): points x from which a segment into gamma crosses c.
#
# x is in F(c, gamma) iff x lies in the box (1+u)c - u*gamma for some u >= 0.
# Per axis the box bounds are affine in u, so the squared distance from x to
# the box is a convex piecewise quadratic in u; it is minimized exactly.


@helper
def _f_region_dist2(x, clo, chi, glo, ghi):
    return _f_region_dist2_buf(x, clo, chi, glo, ghi, np.empty(2 * x.shape[0] + 1))


@helper
def _f_region_dist2_buf(x, clo, chi, glo, ghi, bps):
    d = x.shape[0]
    n = 0
    bps[n] = 0.0
    n += 1
    for k in range(d):
        a = clo[k] - x[k]
        b = clo[k] - ghi[k]
        if b != 0.0:
            t = -a / b
            if t > 0.0:
                bps[n] = t
                n += 1
        a = x[k] - chi[k]
        b = glo[k] - chi[k]
        if b != 0.0:
            t = -a / b
            if t > 0.0:
                bps[n] = t
                n += 1
    for i in range(1, n):
        v = bps[i]
        j = i - 1
        while j >= 0 and bps[j] > v:
            bps[j + 1] = bps[j]
            j -= 1
        bps[j + 1] = v
    best = np.inf
    for s in range(n):
        u0 = bps[s]
        if s + 1 < n:
            u1 = bps[s + 1]
            mid = 0.5 * (u0 + u1)
        else:
            u1 = np.inf
            mid = u0 + 1.0
        A = 0.0
        B = 0.0
        C = 0.0
        for k in range(d):
            a = clo[k] - x[k]
            b = clo[k] - ghi[k]
            if a + b * mid > 0.0:
                A += b * b
                B += 2.0 * a * b
                C += a * a
                continue
            a = x[k] - chi[k]
            b = glo[k] - chi[k]
            if a + b * mid > 0.0:
                A += b * b
                B += 2.0 * a * b
                C += a * a
        if A > 0.0:
            u = -B / (2.0 * A)
            if u < u0:
                u = u0
            if u > u1:
                u = u1
        elif B > 0.0:
            u = u0
        else:
            u = u0 if u1 == np.inf else u1
        val = A * u * u + B * u + C
        if val < best:
            best = val
    if best < 0.0:
        best = 0.0
    return best


def _f_region_dist2_many(X, clo, chi, glo, ghi):
    n = X.shape[0]
    out = np.empty(n)
    for i in range(n):
        out[i] = _f_region_dist2(X[i], clo[i], chi[i], glo[i], ghi[i])
    return out


def _f_region_dist2_np(X, clo, chi, glo, ghi):
    """Vectorized counterpart of the exact piecewise minimization (rows broadcast)."""
    X, clo, chi, glo, ghi = np.broadcast_arrays(X, clo, chi, glo, ghi)
    aL = clo - X
    bL = clo - ghi
    aU = X - chi
    bU = glo - chi
    with np.errstate(divide="ignore", invalid="ignore"):
        cand = np.concatenate([-aL / bL, -aU / bU], axis=1)
    cand = np.where(np.isfinite(cand) & (cand > 0.0), cand, np.inf)
    n = X.shape[0]
    u_lo = np.sort(np.concatenate([np.zeros((n, 1)), cand], axis=1), axis=1)
    u_hi = np.concatenate([u_lo[:, 1:], np.full((n, 1), np.inf)], axis=1)
    live = np.isfinite(u_lo)
    mid = np.where(np.isfinite(u_hi), 0.5 * (u_lo + u_hi), u_lo + 1.0)
    mid = np.where(live, mid, 0.0)
    L = aL[:, None, :] + bL[:, None, :] * mid[:, :, None]
    U = aU[:, None, :] + bU[:, None, :] * mid[:, :, None]
    useL = L > 0.0
    useU = (~useL) & (U > 0.0)
    a = np.where(useL, aL[:, None, :], np.where(useU, aU[:, None, :], 0.0))
    b = np.where(useL, bL[:, None, :], np.where(useU, bU[:, None, :], 0.0))
    A = (b * b).sum(axis=2)
    B = (2.0 * a * b).sum(axis=2)
    C = (a * a).sum(axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(A > 0.0, -B / (2.0 * A), np.where(B > 0.0, u_lo, np.where(np.isfinite(u_hi), u_hi, u_lo)))
    u = np.clip(u, np.where(live, u_lo, 0.0), u_hi)
    u = np.where(live, u, 0.0)
    with np.errstate(invalid="ignore"):
        val = np.where(live, A * u * u + B * u + C, np.inf)
    return np.maximum(val.min(axis=1), 0.0)


@helper
def _boxes_meet(alo, ahi, blo, bhi):
    for k in range(alo.shape[0]):
        if alo[k] > bhi[k] or blo[k] > ahi[k]:
            return False
    return True


@helper
def _phi(origin, direction, t, clo, chi, glo, ghi, x):
    d = origin.shape[0]
    for k in range(d):
        x[k] = origin[k] + t * direction[k]
    return math.sqrt(_f_region_dist2_buf(x[:d], clo, chi, glo, ghi, x[d:]))


@helper
def _linf_bracket(origin, direction, clo, chi, glo, ghi, r):
    """Range of t for which origin + t*direction is within L-infinity distance r of F.

    Every point within Euclidean distance r of F(c, gamma) passes, so this
    bracket contains the exact interval. The constraints on (t, u >= 0) are
    a*t + b*u <= c; u is eliminated by Fourier-Motzkin. Returns (lo, hi) with
    lo > hi when empty.
    """
    d = origin.shape[0]
    m = 2 * d + 1
    A = np.empty(m)
    B = np.empty(m)
    C = np.empty(m)
    for k in range(d):
        A[2 * k] = -direction[k]
        B[2 * k] = clo[k] - ghi[k]
        C[2 * k] = origin[k] - clo[k] + r
        A[2 * k + 1] = direction[k]
        B[2 * k + 1] = glo[k] - chi[k]
        C[2 * k + 1] = chi[k] - origin[k] + r
    A[m - 1] = 0.0
    B[m - 1] = -1.0
    C[m - 1] = 0.0
    lo = -np.inf
    hi = np.inf
    for i in range(m):
        if B[i] == 0.0:
            # Constraint on t alone.
            if A[i] > 0.0:
                hi = min(hi, C[i] / A[i])
            elif A[i] < 0.0:
                lo = max(lo, C[i] / A[i])
            elif C[i] < 0.0:
                return np.inf, -np.inf
            continue
        if B[i] < 0.0:
            continue
        for j in range(m):
            if B[j] >= 0.0:
                continue
            coef = B[i] * A[j] - B[j] * A[i]
            rhs = B[i] * C[j] - B[j] * C[i]
            if coef > 0.0:
                hi = min(hi, rhs / coef)
            elif coef < 0.0:
                lo = max(lo, rhs / coef)
            elif rhs < 0.0:
                return np.inf, -np.inf
    return lo, hi


@helper
def _line_f_interval(origin, direction, clo, chi, glo, ghi, r, tmax, tol):
    """Interval of t with dist(origin + t*direction, F(c, gamma)) <= r.

    The search runs inside the L-infinity bracket, clipped to [-tmax, tmax].
    Returns (t0, t1, status); an empty result is (nan, nan, status).
    """
    if _boxes_meet(clo, chi, glo, ghi):
        return -np.inf, np.inf, OK
    slack = r + tol + 1e-12 * (1.0 + abs(r))
    blo, bhi = _linf_bracket(origin, direction, clo, chi, glo, ghi, slack)
    if blo > bhi + tol:
        return np.nan, np.nan, OK
    a = max(blo - tol, -tmax)
    b = min(bhi + tol, tmax)
    if a > b:
        return np.nan, np.nan, OK
    left_end = a
    right_end = b
    x = np.empty(3 * origin.shape[0] + 1)
    status = OK
    c1 = b - _GOLDEN * (b - a)
    c2 = a + _GOLDEN * (b - a)
    f1 = _phi(origin, direction, c1, clo, chi, glo, ghi, x)
    f2 = _phi(origin, direction, c2, clo, chi, glo, ghi, x)
    it = 0
    # Any feasible point splits the sublevel set, so stop at the first one.
    found = min(f1, f2) <= r
    while b - a > tol and not found:
        if it >= MAX_ITER:
            status = CAPPED
            break
        if f1 <= f2:
            b = c2
            c2 = c1
            f2 = f1
            c1 = b - _GOLDEN * (b - a)
            f1 = _phi(origin, direction, c1, clo, chi, glo, ghi, x)
        else:
            a = c1
            c1 = c2
            f1 = f2
            c2 = a + _GOLDEN * (b - a)
            f2 = _phi(origin, direction, c2, clo, chi, glo, ghi, x)
        found = min(f1, f2) <= r
        it += 1
    if found:
        tm = c1 if f1 <= f2 else c2
        fm = min(f1, f2)
    else:
        tm = 0.5 * (a + b)
        fm = _phi(origin, direction, tm, clo, chi, glo, ghi, x)
    fl = _phi(origin, direction, left_end, clo, chi, glo, ghi, x)
    fr = _phi(origin, direction, right_end, clo, chi, glo, ghi, x)
    # The minimum may sit at an end of the bracket.
    if fl < fm:
        tm = left_end
        fm = fl
    if fr < fm:
        tm = right_end
        fm = fr
    if fm > r + tol:
        return np.nan, np.nan, status
    if fm > r:
        return tm, tm, status
    if fl <= r:
        left = -np.inf if left_end <= -tmax else left_end
    else:
        lo = left_end
        hi = tm
        it = 0
        while hi - lo > tol:
            if it >= MAX_ITER:
                status = CAPPED
                break
            mid = 0.5 * (lo + hi)
            if _phi(origin, direction, mid, clo, chi, glo, ghi, x) <= r:
                hi = mid
            else:
                lo = mid
            it += 1
        left = hi
    if fr <= r:
        right = np.inf if right_end >= tmax else right_end
    else:
        lo = tm
        hi = right_end
        it = 0
        while hi - lo > tol:
            if it >= MAX_ITER:
                status = CAPPED
                break
            mid = 0.5 * (lo + hi)
            if _phi(origin, direction, mid, clo, chi, glo, ghi, x) <= r:
                lo = mid
            else:
                hi = mid
            it += 1
        right = lo
    return left, right, status


def _line_f_intervals_loop(origin, direction, clo, chi, glo, ghi, ci, gi, r, tmax, tol):
    n = ci.shape[0]
    t0 = np.empty(n)
    t1 = np.empty(n)
    capped = 0
    for i in range(n):
        a, b, st = _line_f_interval(origin, direction, clo[ci[i]], chi[ci[i]], glo[gi[i]], ghi[gi[i]], r, tmax, tol)
        t0[i] = a
        t1[i] = b
        capped += st
    return t0, t1, capped


def _linf_bracket_np(origin, direction, clo, chi, glo, ghi, r):
    """Vectorized :func:`_linf_bracket` over rows of the box arrays."""
    n, d = clo.shape
    A = np.concatenate([np.tile(-direction, (n, 1)), np.tile(direction, (n, 1)), np.zeros((n, 1))], axis=1)
    B = np.concatenate([clo - ghi, glo - chi, -np.ones((n, 1))], axis=1)
    C = np.concatenate([origin - clo + r, chi - origin + r, np.zeros((n, 1))], axis=1)
    lo = np.full(n, -np.inf)
    hi = np.full(n, np.inf)
    bad = np.zeros(n, dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        flat = B == 0.0
        q = C / A
        hi = np.minimum(hi, np.where(flat & (A > 0.0), q, np.inf).min(axis=1))
        lo = np.maximum(lo, np.where(flat & (A < 0.0), q, -np.inf).max(axis=1))
        bad |= (flat & (A == 0.0) & (C < 0.0)).any(axis=1)
        up = B > 0.0
        dn = B < 0.0
        coef = B[:, :, None] * A[:, None, :] - B[:, None, :] * A[:, :, None]
        rhs = B[:, :, None] * C[:, None, :] - B[:, None, :] * C[:, :, None]
        pair = up[:, :, None] & dn[:, None, :]
        q = rhs / coef
        hi = np.minimum(hi, np.where(pair & (coef > 0.0), q, np.inf).reshape(n, -1).min(axis=1))
        lo = np.maximum(lo, np.where(pair & (coef < 0.0), q, -np.inf).reshape(n, -1).max(axis=1))
        bad |= (pair & (coef == 0.0) & (rhs < 0.0)).reshape(n, -1).any(axis=1)
    lo = np.where(bad, np.inf, lo)
    hi = np.where(bad, -np.inf, hi)
    return lo, hi


def _line_f_intervals_np(origin, direction, clo, chi, glo, ghi, ci, gi, r, tmax, tol):
    """Vectorized golden-section and bisection over all (c, gamma) pairs at once."""
    n = ci.shape[0]
    if n == 0:
        return np.empty(0), np.empty(0), 0
    C0, C1, G0, G1 = clo[ci], chi[ci], glo[gi], ghi[gi]
    meet = np.all((C0 <= G1) & (G0 <= C1), axis=1)
    slack = r + tol + 1e-12 * (1.0 + abs(r))
    blo, bhi = _linf_bracket_np(origin, direction, C0, C1, G0, G1, slack)
    a = np.maximum(blo - tol, -tmax)
    b = np.minimum(bhi + tol, tmax)
    pruned = (blo > bhi + tol) | (a > b)
    # Pruned rows get a harmless dummy bracket and are blanked at the end.
    a = np.where(pruned, 0.0, a)
    b = np.where(pruned, 0.0, b)
    left_end = a.copy()
    right_end = b.copy()

    def phi(t):
        X = origin[None, :] + t[:, None] * direction[None, :]
        return np.sqrt(_f_region_dist2_np(X, C0, C1, G0, G1))

    c1 = b - _GOLDEN * (b - a)
    c2 = a + _GOLDEN * (b - a)
    f1 = phi(c1)
    f2 = phi(c2)
    it = 0
    capped = 0
    found = np.minimum(f1, f2) <= r
    while np.any((b - a > tol) & ~found):
        if it >= MAX_ITER:
            capped = int(np.sum((b - a > tol) & ~found))
            break
        active = (b - a > tol) & ~found
        go_left = f1 <= f2
        nb = np.where(go_left, c2, b)
        na = np.where(go_left, a, c1)
        nc1 = np.where(go_left, nb - _GOLDEN * (nb - na), c2)
        nc2 = np.where(go_left, c1, na + _GOLDEN * (nb - na))
        ff = phi(np.where(go_left, nc1, nc2))
        nf1 = np.where(go_left, ff, f2)
        nf2 = np.where(go_left, f1, ff)
        a = np.where(active, na, a)
        b = np.where(active, nb, b)
        c1 = np.where(active, nc1, c1)
        c2 = np.where(active, nc2, c2)
        f1 = np.where(active, nf1, f1)
        f2 = np.where(active, nf2, f2)
        found = np.minimum(f1, f2) <= r
        it += 1
    tm = np.where(found, np.where(f1 <= f2, c1, c2), 0.5 * (a + b))
    fm = np.where(found, np.minimum(f1, f2), phi(tm))
    fl = phi(left_end)
    fr = phi(right_end)
    use_l = fl < fm
    tm = np.where(use_l, left_end, tm)
    fm = np.where(use_l, fl, fm)
    use_r = fr < fm
    tm = np.where(use_r, right_end, tm)
    fm = np.where(use_r, fr, fm)
    empty = pruned | (fm > r + tol)
    point = (~empty) & (fm > r)

    def bisect(inside, outside):
        inside = inside.copy()
        outside = outside.copy()
        for _ in range(MAX_ITER):
            if not np.any(np.abs(inside - outside) > tol):
                break
            mid = 0.5 * (inside + outside)
            ok = phi(mid) <= r
            inside = np.where(ok, mid, inside)
            outside = np.where(ok, outside, mid)
        return inside

    left = np.where(fl <= r, np.where(left_end <= -tmax, -np.inf, left_end), bisect(tm, left_end))
    right = np.where(fr <= r, np.where(right_end >= tmax, np.inf, right_end), bisect(tm, right_end))
    left = np.where(point, tm, left)
    right = np.where(point, tm, right)
    left = np.where(empty, np.nan, left)
    right = np.where(empty, np.nan, right)
    left = np.where(meet, -np.inf, left)
    right = np.where(meet, np.inf, right)
    return left, right, capped


# ---------------------------------------------------------------------------
# Batched decisions


@helper
def _max_abs(M):
    out = 0.0
    for i in range(M.shape[0]):
        for k in range(M.shape[1]):
            out = max(out, abs(M[i, k]))
    return out


def _window_pairs_loop(X, Y, W, r):
    """Matrix of subsegment matchability of x_i y_j against curve W at radius r.

    Same clipping rule as the scalar test: from the first point near W's first
    vertex to the last point near its last vertex.
    """
    nx = X.shape[0]
    ny = Y.shape[0]
    d = W.shape[1]
    out = np.zeros((nx, ny), dtype=np.bool_)
    r2 = r * r
    first = W[0]
    last = W[W.shape[0] - 1]
    a = np.empty(d)
    b = np.empty(d)
    scale = max(_max_abs(X), _max_abs(Y), _max_abs(W))
    r_clip = clip_radius(r, scale)
    for i in range(nx):
        x = X[i]
        for j in range(ny):
            y = Y[j]
            lo0, hi0 = _free_interval(x, y, first, r2)
            if lo0 > hi0:
                continue
            lo1, hi1 = _free_interval(x, y, last, r2)
            if lo1 > hi1 or lo0 > hi1:
                continue
            for k in range(d):
                a[k] = x[k] + lo0 * (y[k] - x[k])
                b[k] = x[k] + hi1 * (y[k] - x[k])
            # The clipped ends sit on the ball boundaries; absorb their rounding.
            out[i, j] = _segment_curve_decide_loop(a, b, W, r_clip)
    return out


def _sequence_table_fill(points, curves, offsets, length, r, out):
    """For every sequence of ``length`` points (mixed radix over ``points``) store
    the smallest curve index within Fréchet distance r; ``out`` is pre-filled
    with the sentinel and indexed by the sequence's radix value."""
    N = points.shape[0]
    d = points.shape[1]
    n = offsets.shape[0] - 1
    P = np.empty((length, d))
    idx = np.zeros(length, dtype=np.int64)
    total = out.shape[0]
    for flat in range(total):
        rem = flat
        for s in range(length - 1, -1, -1):
            idx[s] = rem % N
            rem //= N
        for s in range(length):
            for k in range(d):
                P[s, k] = points[idx[s], k]
        for i in range(n):
            if _frechet_decide_loop(P, curves[offsets[i] : offsets[i + 1]], r):
                out[flat] = i
                break
    return out


# ---------------------------------------------------------------------------
# Backend selection

frechet_decide_jit = compiled(_frechet_decide_loop)
segment_curve_decide_jit = compiled(_segment_curve_decide_loop)
discrete_frechet_jit = compiled(_discrete_frechet_loop)
segment_boxes_jit = compiled(_segment_boxes_loop)
f_region_dist2_jit = compiled(_f_region_dist2_many)
line_f_intervals_jit = compiled(_line_f_intervals_loop)
window_pairs_jit = compiled(_window_pairs_loop)
sequence_table_jit = compiled(_sequence_table_fill)

frechet_decide = pick(frechet_decide_jit, _frechet_decide_loop)
segment_curve_decide = pick(segment_curve_decide_jit, _segment_curve_decide_loop)
discrete_frechet = pick(discrete_frechet_jit, _discrete_frechet_np)
segment_boxes = pick(segment_boxes_jit, _segment_boxes_np)
f_region_dist2 = pick(f_region_dist2_jit, _f_region_dist2_np)
line_f_intervals = pick(line_f_intervals_jit, _line_f_intervals_np)
window_pairs = pick(window_pairs_jit, _window_pairs_loop)
sequence_table = pick(sequence_table_jit, _sequence_table_fill)

# Fallback implementations, exposed for benchmarking and agreement tests.
FALLBACKS = {
    "frechet_decide": _frechet_decide_loop,
    "segment_curve_decide": _segment_curve_decide_loop,
    "discrete_frechet": _discrete_frechet_np,
    "segment_boxes": _segment_boxes_np,
    "f_region_dist2": _f_region_dist2_np,
    "line_f_intervals": _line_f_intervals_np,
    "window_pairs": _window_pairs_loop,
    "sequence_table": _sequence_table_fill,
}
COMPILED = {
    "frechet_decide": frechet_decide_jit,
    "segment_curve_decide": segment_curve_decide_jit,
    "discrete_frechet": discrete_frechet_jit,
    "segment_boxes": segment_boxes_jit,
    "f_region_dist2": f_region_dist2_jit,
    "line_f_intervals": line_f_intervals_jit,
    "window_pairs": window_pairs_jit,
    "sequence_table": sequence_table_jit,
}

# Scalar helpers usable from plain Python.
free_interval = _free_interval
fattened_interval = _fattened
slab_interval = _slab
f_region_dist2_one = _f_region_dist2
