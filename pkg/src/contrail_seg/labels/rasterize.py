"""Polygon to mask conversion.

Pixel (i, j) covers the unit square [j, j+1) x [i, i+1). The ``center`` convention
tests its centre (j+0.5, i+0.5); the ``legacy`` convention tests (j+1, i+1), which
drops the leftmost boundary column while keeping the rightmost one.
"""

from typing import Iterable, List, Sequence, Union

import numpy as np

from ..errors import AnnotationError, UsageError
from ..models.annotation import PolygonAnnotation, Ring

CONVENTION_OFFSETS = {"center": 0.5, "legacy": 1.0}
_EDGE_EPS = 1e-9


def _ring_array(ring: Sequence) -> np.ndarray:
    pts = np.asarray(ring, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise AnnotationError(f"ring needs at least 3 (x, y) vertices, got {len(pts)}")
    return pts


def points_in_ring(px: np.ndarray, py: np.ndarray, ring: Sequence) -> np.ndarray:
    """Even-odd test for many points; points on an edge count as inside."""
    pts = _ring_array(ring)
    inside = np.zeros(px.shape, dtype=bool)
    on_edge = np.zeros(px.shape, dtype=bool)
    for (x1, y1), (x2, y2) in zip(pts, np.roll(pts, -1, axis=0)):
        crosses = (y1 > py) != (y2 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_at = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (px < x_at)

        cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
        scale = max(abs(x2 - x1), abs(y2 - y1), 1.0)
        within = (
            (px >= min(x1, x2) - _EDGE_EPS)
            & (px <= max(x1, x2) + _EDGE_EPS)
            & (py >= min(y1, y2) - _EDGE_EPS)
            & (py <= max(y1, y2) + _EDGE_EPS)
        )
        on_edge |= within & (np.abs(cross) <= _EDGE_EPS * scale)
    return inside | on_edge


def _rings_of(poly: Union[PolygonAnnotation, Iterable[Ring]]) -> List[Ring]:
    return list(poly.polygons) if isinstance(poly, PolygonAnnotation) else list(poly)


def rasterize(
    poly: Union[PolygonAnnotation, Iterable[Ring]],
    h: int,
    w: int,
    convention: str = "center",
) -> np.ndarray:
    """Binary H x W mask (uint8) of the union of the rings.

    Raises:
        AnnotationError: A ring has fewer than 3 vertices
    """
    if h < 1 or w < 1:
        raise UsageError(f"mask dimensions must be positive, got {h}x{w}")
    if convention not in CONVENTION_OFFSETS:
        raise UsageError(f"unknown rasterization convention {convention!r}")
    offset = CONVENTION_OFFSETS[convention]
    py, px = np.meshgrid(
        np.arange(h, dtype=np.float64) + offset,
        np.arange(w, dtype=np.float64) + offset,
        indexing="ij",
    )
    mask = np.zeros((h, w), dtype=bool)
    for ring in _rings_of(poly):
        mask |= points_in_ring(px, py, ring)
    return mask.astype(np.uint8)


def coverage(
    poly: Union[PolygonAnnotation, Iterable[Ring]], h: int, w: int, supersample: int = 4
) -> np.ndarray:
    """Fractional area coverage per pixel from an S x S grid of centre samples."""
    if supersample < 1:
        raise UsageError(f"supersample must be >= 1, got {supersample}")
    s = supersample
    fine = rasterize(_scale_rings(poly, s), h * s, w * s, "center")
    return fine.reshape(h, s, w, s).mean(axis=(1, 3)).astype(np.float32)


def _scale_rings(poly, factor: int) -> List[Ring]:
    return [[(x * factor, y * factor) for x, y in ring] for ring in _rings_of(poly)]


def oriented_rectangle(cx: float, cy: float, angle: float, length: float, width: float) -> Ring:
    """Four corners of a length x width rectangle centred at (cx, cy), rotated by ``angle`` rad."""
    ux, uy = np.cos(angle), np.sin(angle)
    vx, vy = -uy, ux
    hl, hw = length / 2.0, width / 2.0
    return [
        (float(cx - ux * hl - vx * hw), float(cy - uy * hl - vy * hw)),
        (float(cx + ux * hl - vx * hw), float(cy + uy * hl - vy * hw)),
        (float(cx + ux * hl + vx * hw), float(cy + uy * hl + vy * hw)),
        (float(cx - ux * hl + vx * hw), float(cy - uy * hl + vy * hw)),
    ]
