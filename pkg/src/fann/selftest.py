"""Oracle-comparison suites behind ``fann selftest`` and the acceptance tests.

Every suite draws its instances from a seeded generator, compares the library
against exact references, and returns a plain dict. Reports carry no wall
times, so equal seeds give byte-identical JSON.
"""

from __future__ import annotations

import json
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from ._accel import compiled, pick
from .errors import FeasibilityRefused
from .frechet import discrete_frechet, frechet_decide, frechet_value, resample, subsegment_matchable
from .geometry import Box, FRegion, PolyCurve, Segment, dist_point_line, f_distance, f_membership
from .grids import Grids
from .index import EAGER, LAZY, build_one_eps, build_sigma0, build_three_eps
from .encoding import EncodingParams
from .reduction import ann_query, brute_force_nn, build_ladder
from .segquery import BruteOracle, SegQueryStructure, answer_valid, build_canonical_structure, hyperplane_basis

FRECHET_TOL = 1e-7
BOUND_SLACK = 1e-6


def suite_rng(seed: int, salt: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(salt)])


def _result(cases: int, violations: int, **notes) -> Dict:
    return {"passed": violations == 0 and cases > 0, "cases": cases, "violations": violations, **notes}


def _count(n: int, scale: float) -> int:
    return max(1, int(round(n * scale)))


# ---------------------------------------------------------------------------
# Instance generators


def planted_instance(rng: np.random.Generator, delta: float = 1.0, k: int = 3, d: int = 2,
                     target: float = 0.9) -> Tuple[List[np.ndarray], int, np.ndarray]:
    """Random corpus with one curve planted within ``target * delta`` of the returned query.

    The planted curve follows the query's polyline with extra vertices along its
    edges and per-vertex noise; the exact distance is verified before returning.
    """
    while True:
        n = int(rng.integers(1, 4))
        m = int(rng.integers(2, 5))
        T = [rng.uniform(0.0, 3.0, (m, d)) for _ in range(n)]
        i = int(rng.integers(n))
        sigma = rng.uniform(0.0, 3.0, (k, d))
        if m < k:
            # Too few vertices to follow every corner: straighten the query instead.
            ts = np.linspace(0.0, 1.0, k)[1:-1, None]
            sigma[1:-1] = (1 - ts) * sigma[0] + ts * sigma[-1] + rng.normal(0.0, 0.2 * delta, (k - 2, d))
            params = np.linspace(0.0, k - 1.0, m)
        else:
            extra = rng.uniform(0.0, k - 1.0, m - k)
            params = np.sort(np.concatenate([np.arange(k, dtype=float), extra]))
        base = np.array([_along(sigma, t) for t in params])
        for _ in range(20):
            tau = base + rng.normal(0.0, 0.25 * delta, base.shape)
            if frechet_decide(sigma, tau, target * delta):
                T[i] = tau
                return T, i, sigma


def _along(poly: np.ndarray, t: float) -> np.ndarray:
    a = min(int(math.floor(t)), poly.shape[0] - 2)
    s = t - a
    return poly[a] + s * (poly[a + 1] - poly[a])


def far_query(rng: np.random.Generator, sigma: np.ndarray, offset: float) -> np.ndarray:
    u = rng.normal(size=sigma.shape[1])
    u /= np.linalg.norm(u)
    return sigma + offset * u


# ---------------------------------------------------------------------------
# Index soundness and completeness


def _index_suite(variant: str, seed: int, salt: int, n_instances: int, eps: float = 0.4, delta: float = 1.0) -> Dict:
    rng = suite_rng(seed, salt)
    factor = 1.0 if variant == "one_eps" else 3.0
    bound = (factor + 24.0 * eps) * delta + BOUND_SLACK
    build = build_one_eps if variant == "one_eps" else build_three_eps
    viol = {"missed": 0, "too_far": 0, "false_positive": 0}
    positives = negatives = 0
    for it in range(n_instances):
        T, planted, sigma = planted_instance(rng, delta)
        idx = build(T, eps, delta, 3, mode=LAZY, oracle="brute")
        if it % 2 == 0:
            positives += 1
            ans = idx.query(sigma)
            if ans.is_no:
                viol["missed"] += 1
            elif not frechet_decide(sigma, idx.T[ans.index], bound):
                viol["too_far"] += 1
        else:
            negatives += 1
            far = far_query(rng, sigma, 10.0 * delta)
            if not idx.query(far).is_no:
                viol["false_positive"] += 1
    return _result(positives + negatives, sum(viol.values()), positives=positives, negatives=negatives, detail=viol)


def suite_one_eps(seed: int = 0, scale: float = 1.0, tol_scale: float = 1.0) -> Dict:
    return _index_suite("one_eps", seed, 1, _count(200, scale))


def suite_three_eps(seed: int = 0, scale: float = 1.0, tol_scale: float = 1.0) -> Dict:
    return _index_suite("three_eps", seed, 2, _count(200, scale))


def suite_sigma0(seed: int = 0, scale: float = 1.0, tol_scale: float = 1.0) -> Dict:
    rng = suite_rng(seed, 3)
    eps, delta = 0.4, 1.0
    bound = (2.0 + 12.0 * eps) * delta + BOUND_SLACK
    params = EncodingParams(eps, delta, 2)
    missing = too_far = 0
    n = _count(100, scale)
    for _ in range(n):
        T, _, sigma = planted_instance(rng, delta)
        grids = Grids([PolyCurve(c) for c in T], eps, delta)
        s0 = build_sigma0(sigma, grids, BruteOracle(grids.G1), params, k=3)
        if not isinstance(s0, PolyCurve):
            missing += 1
        elif not frechet_decide(sigma, s0, bound):
            too_far += 1
    return _result(n, missing + too_far, detail={"missing": missing, "too_far": too_far})


# ---------------------------------------------------------------------------
# Segment queries


SEGMENT_DIMENSIONS = ((2, 0.4, 3), (3, 0.45, 2), (4, 0.45, 2))


def _random_segment(rng: np.random.Generator, T: Sequence[np.ndarray], spread: float) -> Segment:
    c = T[int(rng.integers(len(T)))]
    roll = rng.random()
    d = c.shape[1]
    if roll < 0.6 and c.shape[0] >= 2:
        a = int(rng.integers(c.shape[0] - 1))
        p = c[a] + rng.normal(0.0, spread, d)
        q = c[a + 1] + rng.normal(0.0, spread, d)
    elif roll < 0.8:
        p = c[int(rng.integers(c.shape[0]))] + rng.normal(0.0, 3.0 * spread, d)
        q = p + rng.normal(0.0, 2.0, d)
    else:
        p = rng.uniform(-2.0, 5.0, d)
        q = rng.uniform(-2.0, 5.0, d)
    if rng.random() < 0.5:
        p, q = q, p
    return Segment(p, q)


def no_for_ann_justified(s: SegQueryStructure, seg: Segment) -> bool:
    """Recompute the endpoint-to-line distances that justify a NoForAnn answer."""
    lim = 2.0 * s.eps * s.delta
    near = [min(dist_point_line(w, l.origin, l.direction) for l in s.lines.lines) for w in (seg.start, seg.end)]
    return max(near) > lim


def suite_segment_query(seed: int = 0, scale: float = 1.0, tol_scale: float = 1.0) -> Dict:
    rng = suite_rng(seed, 4)
    delta = 1.0
    total = _count(500, scale)
    per_dim = [total // 3 + (1 if j < total % 3 else 0) for j in range(3)]
    viol = {"brute_invalid": 0, "canonical_invalid": 0, "unjustified_no": 0}
    kinds: Dict[str, int] = {}
    cases = 0
    for (d, eps, m), count in zip(SEGMENT_DIMENSIONS, per_dim):
        lam = 11.0 * eps * delta
        done = 0
        while done < count:
            n = 1 if d == 4 else 2
            T = [np.cumsum(rng.normal(0.0, 1.0, (m, d)), axis=0) for _ in range(n)]
            s = SegQueryStructure(T, eps, delta)
            brute = BruteOracle(s.G1)
            for _ in range(min(10, count - done)):
                seg = _random_segment(rng, T, 0.3)
                b = brute.query(seg)
                if b.is_no or not answer_valid(s.G1, seg, lam, b, 1e-9):
                    viol["brute_invalid"] += 1
                c = s.query(seg)
                kinds[c.kind] = kinds.get(c.kind, 0) + 1
                if c.is_no:
                    if not no_for_ann_justified(s, seg):
                        viol["unjustified_no"] += 1
                elif not answer_valid(s.G1, seg, lam, c, 1e-9):
                    viol["canonical_invalid"] += 1
                done += 1
                cases += 1
    return _result(cases, sum(viol.values()), detail=viol, canonical_kinds=dict(sorted(kinds.items())))


def suite_canonical_structure(seed: int = 0, scale: float = 1.0, tol_scale: float = 1.0) -> Dict:
    """Sampled closure, fattened-hit and first-cell properties of the canonical structure."""
    rng = suite_rng(seed, 5)
    eps, delta = 0.45, 1.0
    viol = {"closure": 0, "fattened_hit": 0, "first_missing": 0, "entered_early": 0}
    cases = 0
    for _ in range(_count(20, scale)):
        T = [rng.uniform(0.0, 2.0, (2, 2))]
        s = build_canonical_structure(T, eps, delta)
        G1, G3 = s.G1, s.grids.G3
        lines = rng.choice(len(s.lines), size=min(2, len(s.lines)), replace=False)
        for j in range(100):
            li = int(lines[j % len(lines)])
            line = s.lines[li]
            part = s.partition(li)
            gamma = G3.cells[int(rng.integers(len(G3)))]
            xi = int(rng.integers(len(part)))
            x = _sample_cylinder(rng, line, part.segments[xi], 2.0 * eps * delta)
            gb = G3.box(gamma)
            y = rng.uniform(gb.lo, gb.hi)
            look = s.lookup(li, gamma, xi)
            members = set(int(v) for v in look.members)
            t0, t1 = kernels.segment_boxes(x, y, G1.lo, G1.hi, 0.0)
            hit = [int(h) for h in np.flatnonzero(t0 <= t1)]
            cases += 1
            if any(h not in members for h in hit):
                viol["closure"] += 1
            if not members:
                continue
            mem = np.array(sorted(members))
            f0, f1 = kernels.segment_boxes(x, y, G1.lo[mem], G1.hi[mem], 5.0 * eps * delta)
            if not np.all(f0 <= f1):
                viol["fattened_hit"] += 1
            if look.first is None:
                viol["first_missing"] += 1
                continue
            e0, _ = kernels.segment_boxes(x, y, G1.lo[[look.first]], G1.hi[[look.first]], 11.0 * eps * delta)
            inside = [h for h in hit if h in members]
            if inside and min(t0[inside]) < e0[0] - 1e-9:
                viol["entered_early"] += 1
    return _result(cases, sum(viol.values()), detail=viol)


def _sample_cylinder(rng, line, seg, radius: float) -> np.ndarray:
    lo, hi = seg.lo, seg.hi
    if math.isinf(lo) and math.isinf(hi):
        lo, hi = -3.0, 3.0
    elif math.isinf(lo):
        lo = hi - 3.0
    elif math.isinf(hi):
        hi = lo + 3.0
    t = rng.uniform(lo, hi)
    basis = hyperplane_basis(line.direction)
    v = rng.normal(size=basis.shape[0])
    v /= np.linalg.norm(v)
    rad = radius * math.sqrt(rng.uniform())
    return line.at(t) + rad * (v @ basis)


# ---------------------------------------------------------------------------
# Eager versus lazy


SUB_MICRO_ONE_EPS = [np.array([[0.0], [0.3]])]


def suite_eager_lazy(seed: int = 0, scale: float = 1.0, tol_scale: float = 1.0) -> Dict:
    rng = suite_rng(seed, 6)
    eps, delta = 0.45, 1.0
    T = [rng.uniform(0.0, 2.0, (2, 2))]
    eager = build_three_eps(T, eps, delta, 3, mode=EAGER)
    lazy = build_three_eps(T, eps, delta, 3, mode=LAZY)
    bound3 = (3.0 + 24.0 * eps) * delta + BOUND_SLACK
    viol = {"three_disagree": 0, "three_bound": 0, "one_disagree": 0, "one_bound": 0, "one_refused": 0}
    n = _count(50, scale)
    for _ in range(n):
        sigma = np.array([T[0][0], 0.5 * (T[0][0] + T[0][1]), T[0][1]]) + rng.normal(0.0, 0.5, (3, 2))
        a, b = eager.query(sigma), lazy.query(sigma)
        if a != b:
            viol["three_disagree"] += 1
        for ans, idx in ((a, eager), (b, lazy)):
            if not ans.is_no and not frechet_decide(sigma, idx.T[ans.index], bound3):
                viol["three_bound"] += 1
    bound1 = (1.0 + 24.0 * eps) * delta + BOUND_SLACK
    one_keys = 0
    try:
        e1 = build_one_eps(SUB_MICRO_ONE_EPS, eps, delta, 3, mode=EAGER)
        one_keys = len(e1.trie)
        l1 = build_one_eps(SUB_MICRO_ONE_EPS, eps, delta, 3, mode=LAZY)
        for _ in range(n):
            sigma = np.sort(rng.uniform(-1.5, 1.8, 3)).reshape(3, 1)
            if rng.random() < 0.5:
                sigma = sigma[::-1]
            a, b = e1.query(sigma), l1.query(sigma)
            if a != b:
                viol["one_disagree"] += 1
            if not a.is_no and not frechet_decide(sigma, e1.T[a.index], bound1):
                viol["one_bound"] += 1
    except FeasibilityRefused:
        viol["one_refused"] += 1
    return _result(2 * n, sum(viol.values()), detail=viol, three_table_entries=len(eager.table),
                   g1_cells=len(eager.grids.G1), one_eps_keys=one_keys)


# ---------------------------------------------------------------------------
# Frechet engine


def _dense_matchable_loop(a, b, Q, r, steps):
    for i in range(steps + 1):
        s = i / steps
        x = a + s * (b - a)
        for j in range(i, steps + 1):
            t = j / steps
            y = a + t * (b - a)
            P = np.empty((2, a.shape[0]))
            P[0] = x
            P[1] = y
            if kernels._frechet_decide_loop(P, Q, r):
                return True
    return False


dense_matchable = pick(compiled(_dense_matchable_loop), _dense_matchable_loop)


def suite_frechet(seed: int = 0, scale: float = 1.0, tol_scale: float = 1.0) -> Dict:
    """Decision/value consistency, discrete bound, resampling bound, subsegment test.

    ``tol_scale`` loosens only the tolerance handed to the value search; the
    checks keep the base tolerance, so a large scale must trip part (a).
    """
    rng = suite_rng(seed, 7)
    tol = FRECHET_TOL
    delta = 1.0
    viol = {"a": 0, "b": 0, "c": 0, "d": 0}
    n_a = _count(200, scale)
    for _ in range(n_a):
        P = rng.uniform(0.0, 3.0, (int(rng.integers(2, 6)), 2))
        Q = rng.uniform(0.0, 3.0, (int(rng.integers(2, 6)), 2))
        v = frechet_value(P, Q, tol * tol_scale)
        if frechet_decide(P, Q, v - 2 * tol) or not frechet_decide(P, Q, v + 2 * tol):
            viol["a"] += 1
        if discrete_frechet(P, Q) < v - tol:
            viol["b"] += 1
    h = 0.05 * delta
    n_c = _count(100, scale)
    for _ in range(n_c):
        P = rng.uniform(0.0, 2.0, (int(rng.integers(2, 4)), 2))
        Q = rng.uniform(0.0, 2.0, (int(rng.integers(2, 4)), 2))
        v = frechet_value(P, Q, tol)
        vd = discrete_frechet(resample(P, h), resample(Q, h))
        if abs(vd - v) > h:
            viol["c"] += 1
    n_d = _count(200, scale)
    steps = 1000
    for _ in range(n_d):
        a = rng.uniform(0.0, 2.0, 2)
        b = rng.uniform(0.0, 2.0, 2)
        Q = rng.uniform(0.0, 2.0, (int(rng.integers(2, 4)), 2))
        r = float(rng.uniform(0.2, 1.2))
        exact = subsegment_matchable(Segment(a, b), Q, r)
        # Grid endpoints move each point by at most length/steps.
        slack = float(np.linalg.norm(b - a)) / steps
        if dense_matchable(a, b, Q, r, steps) and not exact:
            viol["d"] += 1
        elif exact and not dense_matchable(a, b, Q, r + slack, steps):
            viol["d"] += 1
    return _result(n_a + n_c + n_d, sum(viol.values()), detail=viol)


# ---------------------------------------------------------------------------
# F-regions


def _random_box(rng, d: int, lo: float = -2.0, hi: float = 2.0, size: float = 1.0) -> Box:
    a = rng.uniform(lo, hi, d)
    return Box(a, a + rng.uniform(0.1, size, d))


def _witness_from_scale(x: np.ndarray, f: FRegion) -> Optional[np.ndarray]:
    """A candidate y in gamma built from the scale parameter of the membership test."""
    c, g = f.c, f.gamma
    a = np.concatenate([c.lo - x, x - c.hi])
    b = np.concatenate([c.lo - g.hi, g.lo - c.hi])
    lo, hi = 0.0, 1e9
    for ai, bi in zip(a, b):
        if bi > 0:
            hi = min(hi, -ai / bi)
        elif bi < 0:
            lo = max(lo, -ai / bi)
    if lo > hi:
        return None
    u = 0.5 * (lo + hi) if hi < 1e9 else lo + 1.0
    if u <= 0.0:
        return 0.5 * (g.lo + g.hi)
    # x = (1+u) p - u y: per axis, p ranges over c intersected with the image of gamma.
    p_lo = np.maximum(c.lo, (x + u * g.lo) / (1.0 + u))
    p_hi = np.minimum(c.hi, (x + u * g.hi) / (1.0 + u))
    p = 0.5 * (p_lo + p_hi)
    return ((1.0 + u) * p - x) / u


def _has_witness(x: np.ndarray, f: FRegion, ys: np.ndarray) -> bool:
    for y in ys:
        t0, t1 = kernels.segment_boxes(x, y, f.c.lo[None, :], f.c.hi[None, :], 0.0)
        if t0[0] <= t1[0]:
            return True
    return False


def suite_f_region(seed: int = 0, scale: float = 1.0, tol_scale: float = 1.0) -> Dict:
    rng = suite_rng(seed, 8)
    tol = 1e-9
    band = 10.0 * tol
    viol = {"witness_but_outside": 0, "inside_without_witness": 0, "overlap": 0}
    n = _count(10_000, scale)
    positives = 0
    for _ in range(n):
        d = int(rng.integers(2, 4))
        c = _random_box(rng, d)
        g = _random_box(rng, d, 1.0, 4.0)
        f = FRegion(c, g)
        x = rng.uniform(-6.0, 4.0, d)
        ys = rng.uniform(g.lo, g.hi, (32, d))
        cand = _witness_from_scale(x, f)
        if cand is not None:
            ys = np.vstack([ys, cand])
        witness = _has_witness(x, f, ys)
        member = f_membership(x, f)
        positives += int(member)
        if witness and not member and f_distance(x, f) > band:
            viol["witness_but_outside"] += 1
        if member and not witness and f_membership(x, f, tol=-band):
            viol["inside_without_witness"] += 1
    m = _count(1000, scale)
    for _ in range(m):
        d = int(rng.integers(2, 4))
        while True:
            gamma = _random_box(rng, d)
            c = _random_box(rng, d)
            if not gamma.meets(c):
                break
        f1, f2 = FRegion(gamma, c), FRegion(c, gamma)
        span_lo = np.minimum(gamma.lo, c.lo) - 3.0
        span_hi = np.maximum(gamma.hi, c.hi) + 3.0
        for x in rng.uniform(span_lo, span_hi, (20, d)):
            if f_membership(x, f1) and f_membership(x, f2):
                viol["overlap"] += 1
    return _result(n + m, sum(viol.values()), detail=viol, members=positives)


# ---------------------------------------------------------------------------
# Reduction


def suite_reduction(seed: int = 0, scale: float = 1.0, tol_scale: float = 1.0) -> Dict:
    rng = suite_rng(seed, 9)
    eps = 0.4
    viol = 0
    worst = 0.0
    n = _count(50, scale)
    for _ in range(n):
        m = int(rng.integers(2, 5))
        T = [rng.uniform(0.0, 5.0, (m, 2)) for _ in range(int(rng.integers(1, 4)))]
        base = T[int(rng.integers(len(T)))]
        sigma = np.array([base[0], _along(base, 0.5 * (m - 1)), base[-1]]) + rng.normal(0.0, 0.4, (3, 2))
        ladder = build_ladder(T, eps, 3)
        i = ann_query(ladder, sigma)
        _, d_opt = brute_force_nn(ladder.T, sigma)
        limit = (3.0 + 24.0 * eps) * (1.0 + eps) * max(d_opt, ladder.deltas[0]) + BOUND_SLACK
        got = frechet_value(sigma, ladder.T[i])
        worst = max(worst, got / max(d_opt, ladder.deltas[0]))
        if not frechet_decide(sigma, ladder.T[i], limit):
            viol += 1
    return _result(n, viol, worst_ratio=round(worst, 6))


# ---------------------------------------------------------------------------


SUITES: Dict[str, Callable[..., Dict]] = {
    "one_eps": suite_one_eps,
    "three_eps": suite_three_eps,
    "sigma0": suite_sigma0,
    "segment_query": suite_segment_query,
    "canonical_structure": suite_canonical_structure,
    "eager_lazy": suite_eager_lazy,
    "frechet": suite_frechet,
    "f_region": suite_f_region,
    "reduction": suite_reduction,
}


def run_selftest(seed: int = 0, scale: float = 1.0, only: Optional[Sequence[str]] = None,
                 tol_scale: float = 1.0, on_suite: Optional[Callable[[str, Dict], None]] = None) -> Dict:
    names = list(only) if only else list(SUITES)
    suites = {}
    for name in names:
        res = SUITES[name](seed=seed, scale=scale, tol_scale=tol_scale)
        suites[name] = res
        if on_suite is not None:
            on_suite(name, res)
    return {
        "seed": int(seed),
        "scale": scale,
        "tol_scale": tol_scale,
        "suites": suites,
        "passed": all(r["passed"] for r in suites.values()),
    }


def report_json(report: Dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"
