"""Centered interval tree answering stabbing queries."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Generic, List, Optional, Sequence, Tuple, TypeVar

V = TypeVar("V")


@dataclass
class _Node(Generic[V]):
    center: float
    by_lo: List[Tuple[float, float, int, V]] = field(default_factory=list)
    by_hi: List[Tuple[float, float, int, V]] = field(default_factory=list)
    left: Optional["_Node[V]"] = None
    right: Optional["_Node[V]"] = None


class IntervalTree(Generic[V]):
    """Static tree over closed intervals ``[lo, hi]`` (infinite ends allowed).

    ``stab(x)`` returns the payloads of all intervals containing ``x`` in
    insertion order.
    """

    def __init__(self, items: Sequence[Tuple[float, float, V]]):
        entries = [(float(lo), float(hi), i, v) for i, (lo, hi, v) in enumerate(items)]
        self._size = len(entries)
        self._root = self._build(entries)

    def __len__(self) -> int:
        return self._size

    @staticmethod
    def _pick_center(entries) -> float:
        pts = sorted(x for lo, hi, _, _ in entries for x in (lo, hi) if x not in (float("inf"), float("-inf")))
        if not pts:
            return 0.0
        return pts[len(pts) // 2]

    def _build(self, entries) -> Optional[_Node[V]]:
        if not entries:
            return None
        center = self._pick_center(entries)
        here, left, right = [], [], []
        for e in entries:
            if e[1] < center:
                left.append(e)
            elif e[0] > center:
                right.append(e)
            else:
                here.append(e)
        node = _Node(center)
        node.by_lo = sorted(here, key=lambda e: e[0])
        node.by_hi = sorted(here, key=lambda e: -e[1])
        node.left = self._build(left)
        node.right = self._build(right)
        return node

    def stab(self, x: float) -> List[V]:
        hits = []
        node = self._root
        while node is not None:
            if x < node.center:
                for e in node.by_lo:
                    if e[0] > x:
                        break
                    hits.append(e)
                node = node.left
            elif x > node.center:
                for e in node.by_hi:
                    if e[1] < x:
                        break
                    hits.append(e)
                node = node.right
            else:
                hits.extend(node.by_lo)
                node = None
        hits.sort(key=lambda e: e[2])
        return [e[3] for e in hits]
