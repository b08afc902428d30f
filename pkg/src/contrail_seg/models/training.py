"""Training, loss, label and ablation settings."""

from dataclasses import dataclass, field
from typing import List, Optional

from ..errors import ConfigError

MC_AXES = ("both", "x", "y")
DICE_REDUCTIONS = ("pooled", "per_image")


def _check_probability(obj, name: str) -> None:
    value = getattr(obj, name)
    if not 0.0 <= value <= 1.0:
        raise ConfigError(f"{name} must lie in [0, 1], got {value}", field=name)


@dataclass
class AugmentConfig:
    """Shared affine + flip augmentation; limits are fractions of the image size."""

    shift_scale_rotate_p: float = 0.6
    shift_limit: float = 0.0625
    scale_limit: float = 0.1
    rotate_limit_deg: float = 15.0
    hflip_p: float = 0.5
    rot90_p: float = 0.0

    def __post_init__(self):
        for name in ("shift_scale_rotate_p", "hflip_p", "rot90_p"):
            _check_probability(self, name)
        for name in ("shift_limit", "scale_limit", "rotate_limit_deg"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0", field=name)
        if self.scale_limit >= 1:
            raise ConfigError("scale_limit must be < 1", field="scale_limit")


@dataclass
class TrainConfig:
    epochs: int = 20
    batch_size: int = 4
    lr: float = 1e-3
    seed: int = 0
    folds: int = 5
    augmentation: AugmentConfig = field(default_factory=AugmentConfig)
    use_mc: bool = False
    use_soft_labels: bool = False
    use_pseudo_labels: bool = False
    image_size: int = 64
    optimizer: str = "adam"
    # None keeps pseudo-labels soft; a float hardens them at that threshold
    pseudo_threshold: Optional[float] = None
    phase2_restart: bool = True
    phase2_epochs: Optional[int] = None
    eval_threshold: float = 0.5
    dice_reduction: str = "pooled"

    def __post_init__(self):
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}", field="epochs")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}", field="batch_size")
        if self.lr <= 0:
            raise ConfigError(f"lr must be > 0, got {self.lr}", field="lr")
        if self.seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.seed}", field="seed")
        if self.folds < 2:
            raise ConfigError(f"folds must be >= 2, got {self.folds}", field="folds")
        if self.image_size < 1:
            raise ConfigError("image_size must be >= 1", field="image_size")
        if self.optimizer not in ("adam", "sgd"):
            raise ConfigError(
                f"optimizer must be adam or sgd, got {self.optimizer!r}", field="optimizer"
            )
        if self.pseudo_threshold is not None and not 0.0 < self.pseudo_threshold < 1.0:
            raise ConfigError("pseudo_threshold must lie in (0, 1)", field="pseudo_threshold")
        if self.phase2_epochs is not None and self.phase2_epochs < 0:
            raise ConfigError("phase2_epochs must be >= 0", field="phase2_epochs")
        if not 0.0 < self.eval_threshold < 1.0:
            raise ConfigError("eval_threshold must lie in (0, 1)", field="eval_threshold")
        if self.dice_reduction not in DICE_REDUCTIONS:
            raise ConfigError(
                f"dice_reduction must be one of {', '.join(DICE_REDUCTIONS)}",
                field="dice_reduction",
            )

    @property
    def effective_phase2_epochs(self) -> int:
        return self.epochs if self.phase2_epochs is None else self.phase2_epochs


@dataclass
class LossConfig:
    """Weights of the BCE + (1 - soft Dice) composite."""

    bce_weight: float = 0.5
    dice_weight: float = 0.5
    dice_smooth: float = 1e-6
    prob_clamp: float = 1e-7

    def __post_init__(self):
        if self.bce_weight < 0:
            raise ConfigError("bce_weight must be >= 0", field="bce_weight")
        if self.dice_weight < 0:
            raise ConfigError("dice_weight must be >= 0", field="dice_weight")
        if self.dice_smooth <= 0:
            raise ConfigError("dice_smooth must be > 0", field="dice_smooth")
        if not 0.0 < self.prob_clamp < 0.5:
            raise ConfigError("prob_clamp must lie in (0, 0.5)", field="prob_clamp")


@dataclass
class LabelConfig:
    """Annotation aggregation, misalignment correction and validity rules."""

    min_annotators: int = 4
    min_pixels: int = 10
    min_aspect: float = 3.0
    min_frames: int = 2
    min_iou: float = 0.1
    mc_shift: float = 0.5
    mc_axes: str = "both"
    label_frame: int = -1

    def __post_init__(self):
        if self.min_annotators < 1:
            raise ConfigError("min_annotators must be >= 1", field="min_annotators")
        if self.min_pixels < 1:
            raise ConfigError("min_pixels must be >= 1", field="min_pixels")
        if self.min_aspect < 1:
            raise ConfigError("min_aspect must be >= 1", field="min_aspect")
        if self.min_frames < 1:
            raise ConfigError("min_frames must be >= 1", field="min_frames")
        if not 0.0 <= self.min_iou < 1.0:
            raise ConfigError("min_iou must lie in [0, 1)", field="min_iou")
        if self.mc_axes not in MC_AXES:
            raise ConfigError(f"mc_axes must be one of {', '.join(MC_AXES)}", field="mc_axes")


@dataclass
class AblationConfig:
    """Corpus and seeds for the four-row ablation."""

    seeds: List[int] = field(default_factory=lambda: [0, 1, 2, 3, 4])
    n_samples: int = 60
    unlabeled_fraction: float = 0.4
    holdout_fraction: float = 0.2

    def __post_init__(self):
        if not self.seeds:
            raise ConfigError("at least one seed is required", field="seeds")
        if self.n_samples < 3:
            raise ConfigError("n_samples must be >= 3", field="n_samples")
        _check_probability(self, "unlabeled_fraction")
        _check_probability(self, "holdout_fraction")
        if self.unlabeled_fraction + self.holdout_fraction >= 1.0:
            raise ConfigError(
                "unlabeled_fraction + holdout_fraction must leave labeled samples",
                field="holdout_fraction",
            )
