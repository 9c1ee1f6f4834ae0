"""Timing report: compiled kernels against their numpy fallbacks, plus index queries."""

from __future__ import annotations

import time
from typing import Callable, Dict, Tuple

import numpy as np

from . import kernels
from ._accel import NUMBA_AVAILABLE, backend_name
from .index import build_one_eps, build_three_eps
from .selftest import planted_instance, suite_rng


def _best_of(fn: Callable, args: Tuple, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def kernel_cases(rng: np.random.Generator, size: str = "default") -> Dict[str, Tuple]:
    """Representative arguments for every kernel with a compiled twin."""
    small = size == "quick"
    n_boxes = 500 if small else 5000
    m = 20 if small else 60
    P = np.cumsum(rng.normal(0, 1, (m, 2)), axis=0)
    Q = P + rng.normal(0, 0.2, P.shape)
    lo = rng.uniform(-5, 5, (n_boxes, 2))
    hi = lo + 0.3
    n_pairs = 300 if small else 2000
    clo = rng.uniform(-3, 3, (n_pairs, 3))
    glo = rng.uniform(-3, 3, (n_pairs, 3))
    u = rng.normal(size=3)
    u /= np.linalg.norm(u)
    idx = np.arange(n_pairs, dtype=np.int64)
    pts = rng.uniform(0, 2, (6 if small else 10, 2))
    curves = rng.uniform(0, 2, (4, 2))
    offsets = np.array([0, 2, 4], dtype=np.int64)
    n_seq = pts.shape[0] ** 4
    W = np.cumsum(rng.normal(0, 0.5, (8, 2)), axis=0)
    X = W[0] + rng.normal(0, 0.5, (30, 2))
    Y = W[-1] + rng.normal(0, 0.5, (30, 2))
    return {
        "frechet_decide": (P, Q, 0.5),
        "segment_curve_decide": (P[0], P[-1], Q, 3.0),
        "discrete_frechet": (P, Q),
        "segment_boxes": (P[0], P[-1], lo, hi, 0.1),
        "f_region_dist2": (rng.uniform(-4, 4, (n_pairs, 3)), clo, clo + 0.3, glo, glo + 0.3),
        "line_f_intervals": (np.zeros(3), u, clo, clo + 0.3, glo, glo + 0.3, idx, idx, 0.4, 100.0, 1e-9),
        "window_pairs": (X, Y, W, 1.2),
        "sequence_table": (pts, curves, offsets, 4, 1.0, np.full(n_seq, 2, dtype=np.uint8)),
    }


def bench_kernels(seed: int = 0, size: str = "default", repeat: int = 3) -> Dict[str, Dict]:
    rng = suite_rng(seed, 100)
    out: Dict[str, Dict] = {}
    for name, args in kernel_cases(rng, size).items():
        row: Dict[str, float] = {"numpy_s": _best_of(kernels.FALLBACKS[name], args, repeat)}
        jit = kernels.COMPILED.get(name)
        if jit is not None:
            jit(*args)  # compile outside the timing
            row["numba_s"] = _best_of(jit, args, repeat)
            row["speedup"] = row["numpy_s"] / max(row["numba_s"], 1e-12)
        out[name] = row
    return out


def bench_queries(seed: int = 0, n: int = 10) -> Dict[str, Dict]:
    rng = suite_rng(seed, 101)
    out: Dict[str, Dict] = {}
    for variant, build in (("one_eps", build_one_eps), ("three_eps", build_three_eps)):
        total = 0.0
        for _ in range(n):
            T, _, sigma = planted_instance(rng)
            idx = build(T, 0.4, 1.0, 3)
            t = time.perf_counter()
            idx.query(sigma)
            total += time.perf_counter() - t
        out[variant] = {"queries": n, "mean_query_s": total / n}
    return out


def run_bench(seed: int = 0, size: str = "default", queries: int = 10) -> Dict:
    return {
        "backend": backend_name(),
        "numba_available": NUMBA_AVAILABLE,
        "kernels": bench_kernels(seed, size),
        "queries": bench_queries(seed, queries),
    }
