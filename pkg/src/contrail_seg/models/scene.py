"""Synthetic scene configuration and in-memory dataset models."""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..errors import ConfigError, UsageError
from .annotation import AnnotationSet, Ring

CONVENTIONS = ("center", "legacy")


@dataclass
class SceneConfig:
    """Generator settings for the synthetic contrail corpus."""

    image_size: int = 64
    channels: int = 1
    frames_per_sample: int = 2
    contrails_per_scene: Tuple[int, int] = (1, 2)
    contrail_width: Tuple[float, float] = (1.0, 2.5)
    contrail_length: Tuple[float, float] = (16.0, 40.0)
    drift: float = 0.75  # px per frame
    intensity: float = 1.0
    noise_amplitude: float = 0.15
    noise_smoothing: float = 2.0
    annotator_count: int = 4
    annotator_jitter: float = 1.0
    annotator_miss: float = 0.0
    label_convention: str = "legacy"
    margin: int = 3
    seed: int = 0

    def __post_init__(self):
        self.contrails_per_scene = tuple(self.contrails_per_scene)
        self.contrail_width = tuple(self.contrail_width)
        self.contrail_length = tuple(self.contrail_length)
        if self.image_size < 8:
            raise ConfigError("image_size must be >= 8", field="image_size")
        if self.channels < 1:
            raise ConfigError("channels must be >= 1", field="channels")
        if self.frames_per_sample < 2:
            raise ConfigError("frames_per_sample must be >= 2", field="frames_per_sample")
        for name in ("contrails_per_scene", "contrail_width", "contrail_length"):
            low, high = getattr(self, name)
            if low > high or low < 0:
                raise ConfigError(f"{name} must be an ordered non-negative range", field=name)
        if self.contrail_width[0] <= 0:
            raise ConfigError("contrail_width must be positive", field="contrail_width")
        if self.contrail_length[0] < 3 * self.contrail_width[1]:
            raise ConfigError(
                "contrail_length minimum must be at least 3x the contrail_width maximum",
                field="contrail_length",
            )
        if self.annotator_count < 1:
            raise ConfigError("annotator_count must be >= 1", field="annotator_count")
        if self.annotator_jitter < 0:
            raise ConfigError("annotator_jitter must be >= 0", field="annotator_jitter")
        if not 0.0 <= self.annotator_miss < 1.0:
            raise ConfigError("annotator_miss must lie in [0, 1)", field="annotator_miss")
        if self.label_convention not in CONVENTIONS:
            raise ConfigError("label_convention must be center or legacy", field="label_convention")
        if self.margin < 0:
            raise ConfigError("margin must be >= 0", field="margin")
        if self.seed < 0:
            raise ConfigError("seed must be >= 0", field="seed")
        if self.noise_smoothing < 0:
            raise ConfigError("noise_smoothing must be >= 0", field="noise_smoothing")

    @property
    def usable_extent(self) -> float:
        return float(self.image_size - 2 * self.margin)

    def check_geometry(self) -> None:
        """Reject contrails that cannot fit inside the margin-bounded frame."""
        travel = self.drift * (self.frames_per_sample - 1)
        reach = self.contrail_length[1] + self.contrail_width[1] + 2 * travel
        diagonal = math.sqrt(2.0) * self.usable_extent
        if reach > diagonal:
            raise ConfigError(
                f"contrails up to {reach:.1f} px cannot fit the {diagonal:.1f} px usable diagonal",
                field="contrail_length",
            )


@dataclass
class Sample:
    """One multi-frame scene with its annotations and generator truth."""

    sample_id: str
    frames: List[np.ndarray]  # each C x H x W float32
    annotations: List[AnnotationSet]  # one per frame
    truth: List[List[Ring]] = field(default_factory=list)  # ideal polygons per frame
    labels: Dict[str, np.ndarray] = field(default_factory=dict)  # "soft" / "majority"
    # convention the stored labels were rasterized under; None disables reuse
    labels_convention: Optional[str] = None

    @property
    def height(self) -> int:
        return int(self.frames[0].shape[1])

    @property
    def width(self) -> int:
        return int(self.frames[0].shape[2])

    def frame(self, index: int = -1) -> np.ndarray:
        return self.frames[index]

    def annotation_set(self, index: int = -1) -> AnnotationSet:
        return self.annotations[index]

    def cached_label(self, kind: str, convention: str, index: int = -1) -> Optional[np.ndarray]:
        """Stored ``kind`` mask of frame ``index``, or None unless it was built the same way.

        Stored labels always describe the last frame.
        """
        if kind not in self.labels or self.labels_convention != convention:
            return None
        last = len(self.annotations) - 1
        if not self.annotations or index % len(self.annotations) != last:
            return None
        return self.labels[kind]


@dataclass
class Dataset:
    """Ordered samples plus the scene configuration that produced them."""

    scene: Optional[SceneConfig]
    samples: List[Sample]

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def ids(self) -> List[str]:
        return [s.sample_id for s in self.samples]

    def by_id(self) -> Dict[str, Sample]:
        return {s.sample_id: s for s in self.samples}

    def subset(self, ids: List[str]) -> "Dataset":
        lookup = self.by_id()
        return Dataset(self.scene, [lookup[i] for i in ids])

    def split(
        self, unlabeled_fraction: float, holdout_fraction: float
    ) -> Tuple["Dataset", "Dataset", "Dataset"]:
        """Partition by order into (labeled, unlabeled, holdout).

        Holdout takes the tail, unlabeled the block before it, labeled the head.
        """
        n = len(self.samples)
        n_holdout = int(round(n * holdout_fraction))
        n_unlabeled = int(round(n * unlabeled_fraction))
        n_labeled = n - n_holdout - n_unlabeled
        if n_labeled < 1:
            raise UsageError(
                f"split of {n} samples leaves no labeled data "
                f"(unlabeled={n_unlabeled}, holdout={n_holdout})"
            )
        labeled = self.samples[:n_labeled]
        unlabeled = self.samples[n_labeled : n_labeled + n_unlabeled]
        holdout = self.samples[n_labeled + n_unlabeled :]
        return (
            Dataset(self.scene, labeled),
            Dataset(self.scene, unlabeled),
            Dataset(self.scene, holdout),
        )
