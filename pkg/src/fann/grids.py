"""Integer-lattice grids of width eps*delta/sqrt(d) and the cell sets G1, G2, G3.

A cell is identified by its lattice tuple ``(l_1, ..., l_d)``; its closed box is
``[l_i * w, (l_i + 1) * w]`` per axis. Point location is lower-closed
(``floor``), while every distance and intersection predicate treats cells as
closed boxes.
"""

from __future__ import annotations

import itertools
import math
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import BadDelta, BadEpsilon
from .geometry import Box, PolyCurve, as_point

Cell = Tuple[int, ...]


def g1_radius(eps: float, delta: float) -> float:
    return delta


def g2_radius(eps: float, delta: float) -> float:
    return (2.0 + 12.0 * eps) * delta


def g3_radius(eps: float, delta: float) -> float:
    return (1.0 + 6.0 * eps) * delta


def cell_width(eps: float, delta: float, d: int) -> float:
    return eps * delta / math.sqrt(d)


def check_params(eps: float, delta: float) -> None:
    if not (0.0 < eps < 0.5):
        raise BadEpsilon(f"eps must lie in (0, 0.5), got {eps}")
    if not (delta > 0.0 and math.isfinite(delta)):
        raise BadDelta(f"delta must be positive and finite, got {delta}")


def cell_of_point(p, width: float) -> Cell:
    p = as_point(p)
    return tuple(int(v) for v in np.floor(p / width))


def cell_box(cell: Cell, width: float) -> Box:
    lo = np.asarray(cell, dtype=float) * width
    return Box(lo, lo + width)


def cell_lo(cell: Cell, width: float) -> np.ndarray:
    """Lexicographically smallest vertex of the cell."""
    return np.asarray(cell, dtype=float) * width


def cell_center(cell: Cell, width: float) -> np.ndarray:
    return (np.asarray(cell, dtype=float) + 0.5) * width


def _cells_near_box(lo: np.ndarray, hi: np.ndarray, radius: float, width: float) -> np.ndarray:
    """Lattice array of cells whose closed box is within ``radius`` of box [lo, hi]."""
    d = lo.shape[0]
    start = np.floor((lo - radius) / width).astype(np.int64) - 1
    stop = np.floor((hi + radius) / width).astype(np.int64) + 1
    ranges = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(start, stop)]
    r2 = radius * radius
    chunks = []
    # Sweep the first axis and vectorize the remaining ones to bound memory.
    rest = np.stack(np.meshgrid(*ranges[1:], indexing="ij"), axis=-1).reshape(-1, d - 1) if d > 1 else None
    for v in ranges[0]:
        if d > 1:
            lat = np.concatenate([np.full((rest.shape[0], 1), v, dtype=np.int64), rest], axis=1)
        else:
            lat = np.array([[v]], dtype=np.int64)
        clo = lat * width
        chi = clo + width
        gap = np.maximum(np.maximum(clo - hi, 0.0), lo - chi)
        keep = (gap * gap).sum(axis=1) <= r2
        if np.any(keep):
            chunks.append(lat[keep])
    if not chunks:
        return np.empty((0, d), dtype=np.int64)
    return np.concatenate(chunks, axis=0)


def cells_of_ball(center, radius: float, width: float) -> List[Cell]:
    """Cells whose closed box meets the closed ball, in lattice-lexicographic order."""
    c = as_point(center)
    lat = _cells_near_box(c, c, float(radius), width)
    return [tuple(int(x) for x in row) for row in _lex_unique(lat)]


def cells_near_cell(cell: Cell, radius: float, width: float) -> np.ndarray:
    """Lattice array of cells within ``radius`` of the given cell (closed boxes)."""
    lo = np.asarray(cell, dtype=float) * width
    return _lex_unique(_cells_near_box(lo, lo + width, float(radius), width))


def _lex_unique(lat: np.ndarray) -> np.ndarray:
    if lat.shape[0] == 0:
        return lat
    return np.unique(lat, axis=0)


class GridSet:
    """Finite set of lattice cells sharing one width."""

    def __init__(self, lattice, width: float, role: str = "", d: Optional[int] = None):
        arr = np.asarray(lattice, dtype=np.int64)
        if arr.size == 0:
            arr = np.empty((0, d if d is not None else 0), dtype=np.int64)
        elif arr.ndim == 1:
            arr = arr.reshape(1, -1)
        arr = _lex_unique(arr)
        arr.setflags(write=False)
        self.lattice = arr
        self.width = float(width)
        self.role = role

    @property
    def d(self) -> int:
        return self.lattice.shape[1]

    def __len__(self) -> int:
        return self.lattice.shape[0]

    @cached_property
    def cells(self) -> List[Cell]:
        return [tuple(int(x) for x in row) for row in self.lattice]

    @cached_property
    def _index(self) -> Dict[Cell, int]:
        return {c: i for i, c in enumerate(self.cells)}

    def __contains__(self, cell) -> bool:
        return tuple(cell) in self._index

    def __iter__(self):
        return iter(self.cells)

    def index_of(self, cell: Cell) -> int:
        return self._index[tuple(cell)]

    @cached_property
    def lo(self) -> np.ndarray:
        return self.lattice.astype(float) * self.width

    @cached_property
    def hi(self) -> np.ndarray:
        return self.lo + self.width

    def box(self, cell: Cell) -> Box:
        return cell_box(cell, self.width)

    def subset(self, lattice: np.ndarray) -> np.ndarray:
        """Rows of ``lattice`` that are cells of this set (order preserved)."""
        if lattice.shape[0] == 0:
            return lattice
        idx = self._index
        keep = [tuple(int(x) for x in row) in idx for row in lattice]
        return lattice[np.asarray(keep, dtype=bool)]

    def __repr__(self) -> str:
        return f"GridSet(role={self.role!r}, cells={len(self)}, width={self.width:g})"


def _union_of_balls(centers: np.ndarray, radius: float, width: float, role: str, d: int) -> GridSet:
    if centers.shape[0] == 0:
        return GridSet(np.empty((0, d), dtype=np.int64), width, role, d=d)
    parts = [_cells_near_box(c, c, radius, width) for c in np.unique(centers, axis=0)]
    return GridSet(np.concatenate(parts, axis=0), width, role, d=d)


def input_vertices(T: Sequence[PolyCurve]) -> np.ndarray:
    if not T:
        return np.empty((0, 0))
    return np.concatenate([c.vertices for c in T], axis=0)


class Grids:
    """The three cell sets of a corpus at one scale, built on first use."""

    def __init__(self, T: Sequence[PolyCurve], eps: float, delta: float, d: Optional[int] = None):
        check_params(eps, delta)
        self.eps = float(eps)
        self.delta = float(delta)
        self.vertices = input_vertices(T)
        if d is None:
            d = self.vertices.shape[1] if self.vertices.size else 2
        self.d = d
        self.width = cell_width(eps, delta, d)

    @cached_property
    def G1(self) -> GridSet:
        return _union_of_balls(self.vertices, g1_radius(self.eps, self.delta), self.width, "G1", self.d)

    @cached_property
    def G2(self) -> GridSet:
        return _union_of_balls(self.vertices, g2_radius(self.eps, self.delta), self.width, "G2", self.d)

    @cached_property
    def G3(self) -> GridSet:
        return _union_of_balls(self.vertices, g3_radius(self.eps, self.delta), self.width, "G3", self.d)

    def near_vertex(self, cell: Cell, radius: float) -> bool:
        """Whether the cell lies within ``radius`` of some input vertex."""
        if self.vertices.size == 0:
            return False
        lo = np.asarray(cell, dtype=float) * self.width
        gap = np.maximum(np.maximum(lo - self.vertices, 0.0), self.vertices - (lo + self.width))
        return bool(((gap * gap).sum(axis=1) <= radius * radius).any())


def build_grids(T: Sequence[PolyCurve], eps: float, delta: float) -> Tuple[GridSet, GridSet, GridSet]:
    g = Grids(T, eps, delta)
    return g.G1, g.G2, g.G3


def locate(g: GridSet, p) -> Optional[Cell]:
    cell = cell_of_point(p, g.width)
    return cell if cell in g else None


def grid_vertices(g: GridSet) -> np.ndarray:
    """Distinct corner points of all cells, as an (n, d) array in lexicographic order."""
    if len(g) == 0:
        return np.empty((0, g.d))
    offsets = np.array(list(itertools.product((0, 1), repeat=g.d)), dtype=np.int64)
    corners = (g.lattice[:, None, :] + offsets[None, :, :]).reshape(-1, g.d)
    return np.unique(corners, axis=0).astype(float) * g.width
