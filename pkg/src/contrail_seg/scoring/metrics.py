"""Dice similarity and thresholding."""

from typing import Iterable, Tuple, Union

import numpy as np

from ..autograd.tensor import Tensor
from ..errors import DimensionError, UsageError

MaskPair = Tuple[np.ndarray, np.ndarray]


def _array(x: Union[Tensor, np.ndarray]) -> np.ndarray:
    return x.data if isinstance(x, Tensor) else np.asarray(x)


def dice_coefficient(pred: np.ndarray, truth: np.ndarray) -> float:
    """2|X n Y| / (|X| + |Y|); two empty masks score 1.0."""
    pred, truth = _array(pred), _array(truth)
    if pred.shape != truth.shape:
        raise DimensionError(f"dice: mask shapes differ: {pred.shape} vs {truth.shape}")
    x = pred.astype(bool)
    y = truth.astype(bool)
    total = int(x.sum()) + int(y.sum())
    if total == 0:
        return 1.0
    return 2.0 * int(np.logical_and(x, y).sum()) / total


def pooled_dice(pairs: Iterable[MaskPair]) -> float:
    """Dice over the union of all pixels of all pairs."""
    inter = 0
    total = 0
    for pred, truth in pairs:
        pred, truth = _array(pred), _array(truth)
        if pred.shape != truth.shape:
            raise DimensionError(f"dice: mask shapes differ: {pred.shape} vs {truth.shape}")
        x = pred.astype(bool)
        y = truth.astype(bool)
        inter += int(np.logical_and(x, y).sum())
        total += int(x.sum()) + int(y.sum())
    return 1.0 if total == 0 else 2.0 * inter / total


def per_image_dice(pairs: Iterable[MaskPair]) -> float:
    """Mean of the per-pair Dice scores."""
    scores = [dice_coefficient(pred, truth) for pred, truth in pairs]
    if not scores:
        raise UsageError("per-image Dice needs at least one mask pair")
    return float(np.mean(scores))


def threshold(pred: Union[Tensor, np.ndarray], t: float = 0.5) -> np.ndarray:
    """1 where the probability is strictly above ``t``."""
    if not 0.0 < t < 1.0:
        raise UsageError(f"threshold must lie in (0, 1), got {t}")
    return (_array(pred) > t).astype(np.uint8)
