"""Differentiable training losses: BCE, soft Dice and their weighted composite."""

from typing import Optional, Tuple, Union

import numpy as np

from ..autograd import ops
from ..autograd.tensor import Tensor, as_tensor
from ..errors import DimensionError, UsageError
from ..models.training import LossConfig

TensorLike = Union[Tensor, np.ndarray]


def _check_pair(pred: Tensor, truth: Tensor, name: str) -> None:
    if pred.shape != truth.shape:
        raise DimensionError(f"{name}: prediction {pred.shape} and truth {truth.shape} differ")


def _check_truth_range(truth: Tensor) -> None:
    if truth.size and (truth.data.min() < 0.0 or truth.data.max() > 1.0):
        raise UsageError("truth values must lie in [0, 1]")


def _bce_terms(pred: Tensor, truth: Tensor, prob_clamp: float) -> Tensor:
    p = ops.clamp(pred, prob_clamp, 1.0 - prob_clamp)
    pos = ops.mul(truth, ops.log(p))
    neg = ops.mul(ops.sub(1.0, truth), ops.log(ops.sub(1.0, p)))
    return ops.neg(ops.add(pos, neg))


def bce(pred: TensorLike, truth: TensorLike, prob_clamp: float = 1e-7) -> Tensor:
    """Mean binary cross-entropy of probabilities against (possibly soft) targets."""
    pred, truth = as_tensor(pred), as_tensor(truth)
    _check_pair(pred, truth, "bce")
    _check_truth_range(truth)
    return ops.reduce_mean(_bce_terms(pred, truth, prob_clamp))


def soft_dice(pred: TensorLike, truth: TensorLike, smooth: float = 1e-6) -> Tensor:
    """(2 sum(P*G) + smooth) / (sum(P) + sum(G) + smooth)."""
    pred, truth = as_tensor(pred), as_tensor(truth)
    _check_pair(pred, truth, "soft_dice")
    inter = ops.reduce_sum(ops.mul(pred, truth))
    total = ops.add(ops.reduce_sum(pred), ops.reduce_sum(truth))
    return ops.div(ops.add(ops.mul(2.0, inter), smooth), ops.add(total, smooth))


def per_sample_terms(
    logits: TensorLike, truth: TensorLike, cfg: Optional[LossConfig] = None
) -> Tuple[Tensor, Tensor, Tensor]:
    """Per-sample (bce, soft dice, loss) vectors for an N x ... batch."""
    cfg = cfg or LossConfig()
    logits, truth = as_tensor(logits), as_tensor(truth)
    _check_pair(logits, truth, "composite_loss")
    _check_truth_range(truth)
    n = logits.shape[0] if logits.data.ndim else 1
    flat_logits = ops.reshape(logits, (n, -1))
    flat_truth = ops.reshape(truth, (n, -1))
    probs = ops.sigmoid(flat_logits)

    bce_per = ops.reduce_mean(_bce_terms(probs, flat_truth, cfg.prob_clamp), axis=1)
    inter = ops.reduce_sum(ops.mul(probs, flat_truth), axis=1)
    total = ops.add(ops.reduce_sum(probs, axis=1), ops.reduce_sum(flat_truth, axis=1))
    dice_per = ops.div(
        ops.add(ops.mul(2.0, inter), cfg.dice_smooth), ops.add(total, cfg.dice_smooth)
    )
    loss_per = ops.add(
        ops.mul(cfg.bce_weight, bce_per), ops.mul(cfg.dice_weight, ops.sub(1.0, dice_per))
    )
    return bce_per, dice_per, loss_per


def composite_loss(
    logits: TensorLike, truth: TensorLike, cfg: Optional[LossConfig] = None
) -> Tensor:
    """bce_weight * BCE + dice_weight * (1 - soft Dice) on sigmoid(logits), averaged per sample."""
    _, _, loss_per = per_sample_terms(logits, truth, cfg)
    return ops.reduce_mean(loss_per)
