"""From polygon annotations to training-ready masks."""

from .aggregate import aggregate_majority, aggregate_soft, vote_counts
from .alignment import alignment_dice, alignment_gain, flip_consistency, misalignment_correct
from .annotation_io import (
    annotation_set_to_dict,
    dump_annotation_set,
    load_annotation_set,
    parse_annotation_set,
)
from .rasterize import coverage, oriented_rectangle, points_in_ring, rasterize
from .validity import aspect_ratio, pca_extents, validity_filter

__all__ = [
    "aggregate_majority",
    "aggregate_soft",
    "vote_counts",
    "alignment_dice",
    "alignment_gain",
    "flip_consistency",
    "misalignment_correct",
    "annotation_set_to_dict",
    "dump_annotation_set",
    "load_annotation_set",
    "parse_annotation_set",
    "coverage",
    "oriented_rectangle",
    "points_in_ring",
    "rasterize",
    "aspect_ratio",
    "pca_extents",
    "validity_filter",
]
