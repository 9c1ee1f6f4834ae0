"""Dataset ingestion and index files."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, DuplicateId, ParseError, StructureMismatch
from .geometry import PolyCurve
from .index import EAGER, ONE_EPS, AnnIndex, SequenceTable, Trie

INDEX_FORMAT = "fann-index"
INDEX_VERSION = 1


@dataclass
class Dataset:
    ids: List[str]
    curves: List[PolyCurve]

    @property
    def d(self) -> Optional[int]:
        return self.curves[0].d if self.curves else None

    @property
    def m(self) -> int:
        return max((c.m for c in self.curves), default=0)

    def __len__(self) -> int:
        return len(self.curves)


def _parse_jsonl_line(text: str, lineno: int):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc), lineno) from None
    if not isinstance(obj, dict) or "id" not in obj or "points" not in obj:
        raise ParseError('expected {"id": ..., "points": [...]}', lineno)
    return str(obj["id"]), obj["points"]


def _parse_csv_line(text: str, lineno: int):
    head, sep, rest = text.partition(",")
    if not sep or not head.strip():
        raise ParseError("expected id followed by coordinates", lineno)
    try:
        pts = [[float(x) for x in vert.split(",")] for vert in rest.split(";") if vert.strip()]
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from None
    return head.strip(), pts


def parse_lines(lines, fmt: str, pad: bool = True) -> Dataset:
    """Parse curve records; ``fmt`` is ``jsonl`` or ``csv``."""
    if fmt not in ("jsonl", "csv"):
        raise ValueError(f"unknown format {fmt!r}")
    parse = _parse_jsonl_line if fmt == "jsonl" else _parse_csv_line
    ids: List[str] = []
    curves: List[PolyCurve] = []
    seen = set()
    d = None
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        cid, pts = parse(text, lineno)
        try:
            arr = np.array(pts, dtype=float)
        except (TypeError, ValueError):
            raise DimensionMismatch(f"line {lineno}: ragged vertex coordinates") from None
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ParseError("a curve needs at least one vertex", lineno)
        if d is None:
            d = arr.shape[1]
        elif arr.shape[1] != d:
            raise DimensionMismatch(f"line {lineno}: dimension {arr.shape[1]}, corpus has {d}")
        if cid in seen:
            raise DuplicateId(f"line {lineno}: duplicate id {cid!r}")
        try:
            curve = PolyCurve(arr)
        except DimensionMismatch as exc:
            raise ParseError(str(exc), lineno) from None
        seen.add(cid)
        ids.append(cid)
        curves.append(curve)
    ds = Dataset(ids, curves)
    if pad and curves:
        m = ds.m
        ds.curves = [c.padded(m) for c in curves]
    return ds


def detect_format(path: str) -> str:
    return "csv" if path.lower().endswith(".csv") else "jsonl"


def ingest(path: str, fmt: Optional[str] = None, pad: bool = True) -> Dataset:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_lines(fh, fmt or detect_format(path), pad=pad)


def write_jsonl(path: str, ds: Dataset) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for cid, c in zip(ds.ids, ds.curves):
            fh.write(json.dumps({"id": cid, "points": c.vertices.tolist()}) + "\n")


# ---------------------------------------------------------------------------
# Index files


def corpus_digest(curves: Sequence[PolyCurve], ids: Optional[Sequence[str]] = None) -> str:
    h = hashlib.sha256()
    for i, c in enumerate(curves):
        name = ids[i] if ids is not None else str(i)
        h.update(name.encode("utf-8") + b"\0")
        h.update(np.asarray(c.vertices.shape, dtype="<i8").tobytes())
        h.update(np.ascontiguousarray(c.vertices, dtype="<f8").tobytes())
    return h.hexdigest()


def index_to_dict(idx: AnnIndex, ids: Optional[Sequence[str]] = None) -> Dict:
    ids = list(ids) if ids is not None else [str(i) for i in range(len(idx.T))]
    out: Dict = {
        "format": INDEX_FORMAT,
        "version": INDEX_VERSION,
        "variant": idx.variant,
        "mode": idx.mode,
        "oracle": idx.oracle_kind,
        "params": {"d": idx.d, "k": idx.k, "eps": repr(idx.eps), "delta": repr(idx.delta)},
        "corpus": {
            "ids": ids,
            "curves": [c.vertices.tolist() for c in idx.T],
            "digest": corpus_digest(idx.T, ids),
        },
    }
    if idx.mode == EAGER:
        out["grids"] = {"G1": idx.grids.G1.lattice.tolist()}
        if idx.variant == ONE_EPS:
            out["trie"] = [[key.hex(), v] for key, v in sorted(idx.trie.items())]
        else:
            out["table"] = idx.table.pack()
    return out


def index_from_dict(blob: Dict) -> AnnIndex:
    if blob.get("format") != INDEX_FORMAT:
        raise StructureMismatch("not an index file")
    if blob.get("version") != INDEX_VERSION:
        raise StructureMismatch(f"unsupported index version {blob.get('version')!r}")
    p = blob["params"]
    corpus = blob["corpus"]
    curves = [PolyCurve(v) for v in corpus["curves"]]
    if corpus_digest(curves, corpus["ids"]) != corpus["digest"]:
        raise StructureMismatch("corpus digest does not match the stored curves")
    idx = AnnIndex(blob["variant"], blob["mode"], curves, float(p["eps"]), float(p["delta"]),
                   int(p["k"]), int(p["d"]), blob.get("oracle", "brute"))
    if idx.mode == EAGER:
        stored = np.asarray(blob["grids"]["G1"], dtype=np.int64).reshape(-1, idx.d)
        if not np.array_equal(stored, idx.grids.G1.lattice):
            raise StructureMismatch("stored G1 differs from the rebuilt grid")
        if idx.variant == ONE_EPS:
            idx.trie = Trie({bytes.fromhex(k): int(v) for k, v in blob["trie"]})
        else:
            idx.table = SequenceTable.unpack(blob["table"], idx.grids.G1.cells, len(curves))
    return idx


def save_index(idx: AnnIndex, path: str, ids: Optional[Sequence[str]] = None) -> int:
    """Write the index as JSON; returns the file size in bytes."""
    text = json.dumps(index_to_dict(idx, ids), separators=(",", ":"), sort_keys=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return os.path.getsize(path)


def load_index(path: str):
    """Load an index file; returns ``(index, ids)``."""
    with open(path, "r", encoding="utf-8") as fh:
        blob = json.load(fh)
    return index_from_dict(blob), list(blob["corpus"]["ids"])
