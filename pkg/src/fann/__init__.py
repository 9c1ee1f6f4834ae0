"""Approximate nearest-neighbor search for polygonal curves under the Fréchet distance."""

from ._accel import backend_name
from .errors import (
    AllScalesNo,
    ArityMismatch,
    DimensionMismatch,
    EmptyCorpus,
    FannError,
    FeasibilityRefused,
    ParseError,
)
from .frechet import discrete_frechet, frechet_decide, frechet_value, segment_curve_decide, subsegment_matchable
from .geometry import Box, FRegion, PolyCurve, Segment, f_distance, f_membership
from .grids import Grids
from .index import AnnIndex, Answer, build_one_eps, build_sigma0, build_three_eps
from .io import Dataset, ingest, load_index, save_index
from .reduction import ScaleLadder, ann_query, brute_force_nn, build_ladder
from .segquery import BruteOracle, SegQueryStructure, answer_valid, brute_segment_query, build_canonical_structure

__version__ = "0.1.0"

__all__ = [
    "AllScalesNo",
    "AnnIndex",
    "Answer",
    "ArityMismatch",
    "Box",
    "BruteOracle",
    "Dataset",
    "DimensionMismatch",
    "EmptyCorpus",
    "FRegion",
    "FannError",
    "FeasibilityRefused",
    "Grids",
    "ParseError",
    "PolyCurve",
    "ScaleLadder",
    "SegQueryStructure",
    "Segment",
    "answer_valid",
    "ann_query",
    "backend_name",
    "brute_force_nn",
    "brute_segment_query",
    "build_canonical_structure",
    "build_ladder",
    "build_one_eps",
    "build_sigma0",
    "build_three_eps",
    "discrete_frechet",
    "f_distance",
    "f_membership",
    "frechet_decide",
    "frechet_value",
    "ingest",
    "load_index",
    "save_index",
    "segment_curve_decide",
    "subsegment_matchable",
]
