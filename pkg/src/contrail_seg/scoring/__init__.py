"""Evaluation metrics and training losses."""

from .losses import bce, composite_loss, per_sample_terms, soft_dice
from .metrics import dice_coefficient, per_image_dice, pooled_dice, threshold

__all__ = [
    "bce",
    "composite_loss",
    "per_sample_terms",
    "soft_dice",
    "dice_coefficient",
    "per_image_dice",
    "pooled_dice",
    "threshold",
]
