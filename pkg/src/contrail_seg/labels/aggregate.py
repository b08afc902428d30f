"""Soft and strict-majority aggregation of several annotators' masks."""

from typing import Optional

import numpy as np

from ..errors import UsageError
from ..models.annotation import AnnotationSet
from .rasterize import rasterize


def vote_counts(
    aset: AnnotationSet,
    h: Optional[int] = None,
    w: Optional[int] = None,
    convention: str = "center",
) -> np.ndarray:
    """Per-pixel number of annotators whose polygons cover the pixel."""
    if aset.annotator_count == 0:
        raise UsageError(f"sample {aset.sample_id} has no annotations to aggregate")
    h = aset.height if h is None else h
    w = aset.width if w is None else w
    counts = np.zeros((h, w), dtype=np.int32)
    for annotation in aset.annotations:
        counts += rasterize(annotation, h, w, convention)
    return counts


def aggregate_soft(
    aset: AnnotationSet,
    h: Optional[int] = None,
    w: Optional[int] = None,
    convention: str = "center",
) -> np.ndarray:
    """Fraction of annotators marking each pixel: count / N, in [0, 1]."""
    counts = vote_counts(aset, h, w, convention)
    return (counts / aset.annotator_count).astype(np.float32)


def aggregate_majority(
    aset: AnnotationSet,
    h: Optional[int] = None,
    w: Optional[int] = None,
    convention: str = "center",
) -> np.ndarray:
    """1 where strictly more than half the annotators agree; ties give 0."""
    counts = vote_counts(aset, h, w, convention)
    return (2 * counts > aset.annotator_count).astype(np.uint8)
