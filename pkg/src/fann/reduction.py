"""Scale-free queries through a geometric ladder of fixed-scale indexes.

Binary search keeps one scale whose index answers with a curve and the scale
just below it answering No. A No at scale delta proves every curve is farther
than delta, and a curve at scale delta is within kappa' * delta, so the
returned curve is within kappa' * (1 + eps) of the optimum (or of delta_0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import AllScalesNo, EmptyCorpus
from .frechet import frechet_value
from .geometry import PolyCurve, as_curve
from .grids import check_params
from .index import LAZY, ONE_EPS, THREE_EPS, AnnIndex, build_one_eps, build_three_eps, pad_corpus


def _vertex_spread(T: Sequence[PolyCurve]) -> Tuple[float, float]:
    """Smallest positive and largest pairwise distance over all input vertices."""
    V = np.unique(np.concatenate([c.vertices for c in T], axis=0), axis=0)
    if V.shape[0] < 2:
        return 0.0, 0.0
    diff = V[:, None, :] - V[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    pos = dist[dist > 0]
    return float(pos.min()), float(dist.max())


@dataclass
class ScaleLadder:
    T: List[PolyCurve]
    eps: float
    k: int
    variant: str
    mode: str
    deltas: List[float]
    oracle: str = "brute"
    _indexes: Dict[int, AnnIndex] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.deltas)

    def index(self, level: int) -> AnnIndex:
        idx = self._indexes.get(level)
        if idx is None:
            build = build_one_eps if self.variant == ONE_EPS else build_three_eps
            idx = build(self.T, self.eps, self.deltas[level], self.k, mode=self.mode, oracle=self.oracle)
            self._indexes[level] = idx
        return idx

    def bound_factor(self) -> float:
        base = 1.0 if self.variant == ONE_EPS else 3.0
        return base + 24.0 * self.eps


def build_ladder(T: Sequence, eps: float, k: int, variant: str = THREE_EPS, mode: str = LAZY,
                 oracle: str = "brute", eager_levels: bool = False) -> ScaleLadder:
    """Scales delta_0 * (1+eps)^i from a quarter of the closest vertex pair up to twice the diameter."""
    curves = pad_corpus(T)
    if not curves:
        raise EmptyCorpus("cannot build a ladder over an empty corpus")
    check_params(eps, 1.0)
    closest, diam = _vertex_spread(curves)
    if diam == 0.0:
        # Every vertex coincides; any positive scale sees the whole corpus at distance 0.
        closest = diam = 1.0
    delta0 = max(closest / 4.0, 1e-12 * diam)
    top = 2.0 * diam
    steps = int(math.ceil(math.log(top / delta0) / math.log1p(eps) - 1e-12))
    deltas = [delta0 * (1.0 + eps) ** i for i in range(steps + 1)]
    if deltas[-1] < top:
        deltas.append(delta0 * (1.0 + eps) ** (steps + 1))
    ladder = ScaleLadder(curves, float(eps), int(k), variant, mode, deltas, oracle)
    if eager_levels:
        for level in range(len(deltas)):
            ladder.index(level)
    return ladder


def ann_query(ladder: ScaleLadder, sigma, trace: Optional[list] = None, strict: bool = False) -> int:
    """Index of a curve within kappa'(1+eps) * max(d_opt, delta_0) of sigma.

    A query farther than the top scale from every curve makes all scales answer
    No. With ``strict`` that raises AllScalesNo, otherwise curve 0 is returned.
    """
    sigma = as_curve(sigma)

    def answer(level: int):
        ans = ladder.index(level).query(sigma)
        if trace is not None:
            trace.append((level, ans))
        return ans

    hi = len(ladder) - 1
    best = answer(hi)
    if best.is_no:
        if strict:
            raise AllScalesNo(f"no curve within the top scale {ladder.deltas[-1]:g}")
        # Every curve is farther than the top scale, which is at least twice the
        # vertex diameter, so any curve is within 1.5 times the optimum.
        return 0
    lo = -1  # virtual scale below delta_0 where the predicate is false
    while hi - lo > 1:
        mid = (lo + hi) // 2
        ans = answer(mid)
        if ans.is_no:
            lo = mid
        else:
            hi = mid
            best = ans
    return int(best.index)


def brute_force_nn(T: Sequence, sigma, tol: float = 1e-7) -> Tuple[int, float]:
    """Exact nearest curve by Fréchet value; ties go to the smaller index."""
    curves = [as_curve(c) for c in T]
    if not curves:
        raise EmptyCorpus("empty corpus")
    sigma = as_curve(sigma)
    best_i, best_d = 0, math.inf
    for i, c in enumerate(curves):
        v = frechet_value(sigma, c, tol)
        if v < best_d:
            best_i, best_d = i, v
    return best_i, best_d
