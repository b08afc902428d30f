"""Deterministic synthetic contrail scenes.

Each sample is a short frame sequence of smoothed noise with bright anti-aliased
capsules (the contrails) drifting along their own axis. Annotators see the true
contrail rectangles with independent vertex jitter and may miss a contrail.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
from skimage import filters, morphology

from ..errors import ConfigError
from ..labels.aggregate import aggregate_majority, aggregate_soft
from ..labels.rasterize import oriented_rectangle, rasterize
from ..models.annotation import AnnotationSet, PolygonAnnotation, Ring
from ..models.scene import Dataset, Sample, SceneConfig
from ..runtime import Runtime
from .store import save_dataset

logger = logging.getLogger(__name__)

GUARD_BAND = 2
MAX_PLACEMENT_ATTEMPTS = 200
SUPERSAMPLE = 4
GUARD_FOOTPRINT = np.ones((2 * GUARD_BAND + 1, 2 * GUARD_BAND + 1), dtype=bool)


@dataclass
class Contrail:
    cx: float
    cy: float
    angle: float
    length: float
    width: float

    def at_frame(self, frame: int, drift: float) -> "Contrail":
        step = frame * drift
        return Contrail(
            self.cx + step * math.cos(self.angle),
            self.cy + step * math.sin(self.angle),
            self.angle,
            self.length,
            self.width,
        )

    def rectangle(self) -> Ring:
        return oriented_rectangle(self.cx, self.cy, self.angle, self.length, self.width)

    def endpoints(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        """Ends of the capsule core segment (length minus the rounded caps)."""
        half = max(self.length - self.width, 0.0) / 2.0
        dx, dy = half * math.cos(self.angle), half * math.sin(self.angle)
        return (self.cx - dx, self.cy - dy), (self.cx + dx, self.cy + dy)


def capsule_coverage(
    contrail: Contrail, h: int, w: int, supersample: int = SUPERSAMPLE
) -> np.ndarray:
    """Fraction of each pixel within ``width / 2`` of the capsule core segment."""
    s = supersample
    offsets = (np.arange(s) + 0.5) / s
    ys = (np.arange(h)[:, None] + offsets[None, :]).reshape(-1)
    xs = (np.arange(w)[:, None] + offsets[None, :]).reshape(-1)
    py, px = np.meshgrid(ys, xs, indexing="ij")
    (x0, y0), (x1, y1) = contrail.endpoints()
    dx, dy = x1 - x0, y1 - y0
    seg2 = dx * dx + dy * dy
    if seg2 > 0:
        t = np.clip(((px - x0) * dx + (py - y0) * dy) / seg2, 0.0, 1.0)
    else:
        t = np.zeros_like(px)
    dist2 = (px - (x0 + t * dx)) ** 2 + (py - (y0 + t * dy)) ** 2
    inside = dist2 <= (contrail.width / 2.0) ** 2
    return inside.reshape(h, s, w, s).mean(axis=(1, 3)).astype(np.float32)


def _inside_margin(ring: Ring, size: int, margin: int) -> bool:
    return all(margin <= x <= size - margin and margin <= y <= size - margin for x, y in ring)


def _place_contrails(rng: np.random.Generator, cfg: SceneConfig) -> List[Contrail]:
    size = cfg.image_size
    count = int(rng.integers(cfg.contrails_per_scene[0], cfg.contrails_per_scene[1] + 1))
    occupied = np.zeros((size, size), dtype=bool)
    placed: List[Contrail] = []
    for _ in range(count):
        for _attempt in range(MAX_PLACEMENT_ATTEMPTS):
            candidate = Contrail(
                cx=float(rng.uniform(cfg.margin, size - cfg.margin)),
                cy=float(rng.uniform(cfg.margin, size - cfg.margin)),
                angle=float(rng.uniform(0.0, math.pi)),
                length=float(rng.uniform(*cfg.contrail_length)),
                width=float(rng.uniform(*cfg.contrail_width)),
            )
            rings = [
                candidate.at_frame(f, cfg.drift).rectangle() for f in range(cfg.frames_per_sample)
            ]
            if not all(_inside_margin(r, size, cfg.margin) for r in rings):
                continue
            footprint = rasterize(rings, size, size, "center").astype(bool)
            guarded = morphology.binary_dilation(footprint, GUARD_FOOTPRINT)
            if np.any(guarded & occupied):
                continue
            occupied |= guarded
            placed.append(candidate)
            break
        else:
            logger.debug("gave up placing a contrail after %d attempts", MAX_PLACEMENT_ATTEMPTS)
    if count and not placed:
        raise ConfigError(
            "could not place any contrail inside the frame; reduce contrail_length or margin",
            field="scene.contrail_length",
        )
    return placed


def _background(rng: np.random.Generator, cfg: SceneConfig) -> np.ndarray:
    size = cfg.image_size
    noise = rng.standard_normal((cfg.channels, size, size))
    if cfg.noise_smoothing > 0:
        noise = np.stack([filters.gaussian(c, sigma=cfg.noise_smoothing) for c in noise])
    std = noise.std()
    if std > 0:
        noise = noise / std
    return noise * cfg.noise_amplitude


def _jittered(rng: np.random.Generator, ring: Ring, sigma: float, size: int) -> Ring:
    if sigma == 0:
        return [tuple(p) for p in ring]
    out = []
    for x, y in ring:
        jx, jy = rng.normal(0.0, sigma, size=2)
        out.append(
            (float(np.clip(x + jx, -1.0, size + 1.0)), float(np.clip(y + jy, -1.0, size + 1.0)))
        )
    return out


def generate_sample(cfg: SceneConfig, index: int) -> Sample:
    """Build sample ``index``; its randomness depends only on (cfg.seed, index)."""
    rng = np.random.default_rng([cfg.seed, index])
    size = cfg.image_size
    sample_id = f"s{index:04d}"
    contrails = _place_contrails(rng, cfg)

    frames: List[np.ndarray] = []
    annotations: List[AnnotationSet] = []
    truth: List[List[Ring]] = []
    channel_gain = 1.0 - 0.2 * np.arange(cfg.channels) / max(1, cfg.channels)
    for f in range(cfg.frames_per_sample):
        moved = [c.at_frame(f, cfg.drift) for c in contrails]
        signal = np.zeros((size, size), dtype=np.float64)
        for c in moved:
            signal = np.maximum(signal, capsule_coverage(c, size, size))
        image = _background(rng, cfg) + cfg.intensity * channel_gain[:, None, None] * signal
        frames.append(image.astype(np.float32))

        rings = [c.rectangle() for c in moved]
        truth.append(rings)
        per_annotator = []
        for a in range(cfg.annotator_count):
            drawn = []
            for ring in rings:
                if cfg.annotator_miss > 0 and rng.random() < cfg.annotator_miss:
                    continue
                drawn.append(_jittered(rng, ring, cfg.annotator_jitter, size))
            per_annotator.append(PolygonAnnotation(annotator_id=a, polygons=drawn))
        annotations.append(
            AnnotationSet(sample_id=sample_id, height=size, width=size, annotations=per_annotator)
        )

    label_set = annotations[-1]
    labels = {
        "soft": aggregate_soft(label_set, convention=cfg.label_convention),
        "majority": aggregate_majority(label_set, convention=cfg.label_convention),
    }
    return Sample(sample_id, frames, annotations, truth, labels, cfg.label_convention)


def synthesize(cfg: SceneConfig, n_samples: int) -> Dataset:
    """Generate ``n_samples`` samples in memory (in parallel when threads allow)."""
    if n_samples < 1:
        raise ConfigError(f"n_samples must be >= 1, got {n_samples}", field="n_samples")
    cfg.check_geometry()
    samples = Runtime.map(lambda i: generate_sample(cfg, i), range(n_samples))
    return Dataset(scene=cfg, samples=samples)


def generate_dataset(
    cfg: SceneConfig, n_samples: int, path: Optional[Union[str, Path]] = None
) -> Dataset:
    """Generate a corpus and, when ``path`` is given, write it there."""
    dataset = synthesize(cfg, n_samples)
    if path is not None:
        save_dataset(dataset, path)
    return dataset
