"""Contrail validity rules over a sequence of hard masks.

A component (8-connected) survives when it is large enough, elongated enough and,
for sequences of at least ``min_frames`` frames, part of a chain of overlapping
components spanning ``min_frames`` consecutive frames.
"""

import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np
from skimage import measure

from ..errors import DimensionError, UsageError
from ..models.reports import ComponentReport

logger = logging.getLogger(__name__)

Key = Tuple[int, int]  # (frame, label)


def pca_extents(coords: np.ndarray) -> Tuple[float, float]:
    """Extent of a pixel set along its two principal axes, major first.

    Extents count pixels, so a single row of n pixels measures (n, 1).
    """
    if len(coords) == 1:
        return 1.0, 1.0
    pts = coords.astype(np.float64)
    centered = pts - pts.mean(axis=0)
    cov = centered.T @ centered / len(pts)
    _, vectors = np.linalg.eigh(cov)
    projected = centered @ vectors
    spans = np.ptp(projected, axis=0) + 1.0
    major, minor = float(spans.max()), float(spans.min())
    return major, minor


def aspect_ratio(coords: np.ndarray) -> float:
    major, minor = pca_extents(coords)
    return major / minor


def _iou(a: np.ndarray, b: np.ndarray) -> float:
    union = np.logical_or(a, b).sum()
    return float(np.logical_and(a, b).sum() / union) if union else 0.0


def _longest_tracks(
    candidates: Dict[Key, np.ndarray], n_frames: int, min_iou: float
) -> Dict[Key, int]:
    """Length of the longest chain of consecutive-frame matches through each candidate."""
    by_frame: Dict[int, List[Key]] = {f: [] for f in range(n_frames)}
    for key in sorted(candidates):
        by_frame[key[0]].append(key)

    links: Dict[Key, List[Key]] = {key: [] for key in candidates}
    for f in range(n_frames - 1):
        for a in by_frame[f]:
            for b in by_frame[f + 1]:
                if _iou(candidates[a], candidates[b]) > min_iou:
                    links[a].append(b)

    backward: Dict[Key, int] = {}
    for f in range(n_frames):
        for key in by_frame[f]:
            backward.setdefault(key, 1)
            for nxt in links[key]:
                backward[nxt] = max(backward.get(nxt, 1), backward[key] + 1)
    forward: Dict[Key, int] = {}
    for f in reversed(range(n_frames)):
        for key in by_frame[f]:
            forward[key] = 1 + max((forward[n] for n in links[key]), default=0)
    return {key: forward[key] + backward[key] - 1 for key in candidates}


def _appearance(coords: np.ndarray, shape: Tuple[int, int], track: int) -> str:
    rows, cols = coords[:, 0], coords[:, 1]
    touches_row_edge = rows.min() == 0 or rows.max() == shape[0] - 1
    touches_col_edge = cols.min() == 0 or cols.max() == shape[1] - 1
    if touches_row_edge or touches_col_edge:
        return "edge"
    return "persisting" if track > 1 else "abrupt"


def validity_filter(
    masks: Sequence[np.ndarray],
    min_pixels: int = 10,
    min_aspect: float = 3.0,
    min_frames: int = 2,
    min_iou: float = 0.1,
) -> Tuple[List[np.ndarray], List[ComponentReport]]:
    """Drop components that fail the area, elongation or persistence rules.

    Args:
        masks: Binary H x W masks, one per consecutive frame
        min_pixels: Minimum component area
        min_aspect: Minimum ratio of principal-axis extents
        min_frames: Minimum chain length; only enforced when there are that many frames
        min_iou: Overlap a component needs with one in an adjacent frame to chain

    Returns:
        Filtered masks (uint8) and one report per component, ordered by (frame, label)
    """
    if not masks:
        raise UsageError("validity_filter needs at least one mask")
    shape = np.asarray(masks[0]).shape
    for index, mask in enumerate(masks):
        if np.asarray(mask).shape != shape:
            raise DimensionError(
                f"mask {index} has shape {np.asarray(mask).shape}, expected {shape} (frame axis 0)"
            )

    components: Dict[Key, np.ndarray] = {}
    coords_of: Dict[Key, np.ndarray] = {}
    for f, mask in enumerate(masks):
        labels = measure.label(np.asarray(mask) > 0, connectivity=2)
        for k in range(1, int(labels.max()) + 1):
            region = labels == k
            components[(f, k)] = region
            coords_of[(f, k)] = np.argwhere(region)

    area_ok = {key: len(coords_of[key]) >= min_pixels for key in components}
    aspects = {key: aspect_ratio(coords_of[key]) for key in components}
    aspect_ok = {key: aspects[key] >= min_aspect for key in components}
    candidates = {key: components[key] for key in components if area_ok[key] and aspect_ok[key]}
    tracks = _longest_tracks(candidates, len(masks), min_iou)
    enforce_temporal = len(masks) >= min_frames

    reports: List[ComponentReport] = []
    filtered = [np.zeros(shape, dtype=np.uint8) for _ in masks]
    for key in sorted(components):
        f, k = key
        track = tracks.get(key, 1)
        report = ComponentReport(
            frame=f,
            label=k,
            area=int(len(coords_of[key])),
            aspect=aspects[key],
            track_length=track,
            appearance=_appearance(coords_of[key], shape, track),
            passes_area=area_ok[key],
            passes_aspect=aspect_ok[key],
            passes_temporal=(track >= min_frames) if enforce_temporal else True,
        )
        reports.append(report)
        if report.kept:
            filtered[f][components[key]] = 1
    logger.debug(
        "validity filter kept %d of %d components", sum(r.kept for r in reports), len(reports)
    )
    return filtered, reports
