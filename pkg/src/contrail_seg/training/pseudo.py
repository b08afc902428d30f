"""Pseudo-labels: model predictions on unlabeled samples used as training targets."""

import logging
from typing import List, Union

import numpy as np

from ..config import RunConfig
from ..errors import ConfigError, UsageError
from ..models.network import NetworkSpec
from ..models.reports import PseudoLabelSet
from ..models.scene import Dataset
from ..network.model import Checkpoint, SegmentationModel
from .trainer import TrainItem, prepare_image

logger = logging.getLogger(__name__)


def check_compatible(spec: NetworkSpec, dataset: Dataset) -> None:
    """Raise ConfigError unless the samples fit the scaled network input.

    Raises:
        ConfigError: On a channel or resolution mismatch
    """
    if len(dataset) == 0:
        return
    sample = dataset.samples[0]
    channels = int(sample.frames[0].shape[0])
    if channels != spec.input_channels:
        raise ConfigError(
            f"model expects {spec.input_channels} channels, samples have {channels}",
            field="network.input_channels",
        )
    size = spec.scaled_input_size
    if (sample.height, sample.width) != (size, size):
        raise ConfigError(
            f"model expects {size}x{size} images, samples are {sample.height}x{sample.width}",
            field="network.input_size",
        )


def generate_pseudo_labels(
    checkpoint: Union[Checkpoint, SegmentationModel], unlabeled: Dataset, cfg: RunConfig
) -> PseudoLabelSet:
    """Predict a soft mask for every unlabeled sample.

    With ``train.pseudo_threshold`` set, masks are hardened to {0, 1} at that threshold.

    Raises:
        UsageError: If ``unlabeled`` is empty
        ConfigError: If the samples do not fit the model's input shape
    """
    if len(unlabeled) == 0:
        raise UsageError("pseudo-labelling needs at least one unlabeled sample")
    model = checkpoint.to_model() if isinstance(checkpoint, Checkpoint) else checkpoint
    check_compatible(model.base_spec, unlabeled)

    entries = []
    samples = list(unlabeled)
    batch_size = cfg.train.batch_size
    for start in range(0, len(samples), batch_size):
        batch = samples[start : start + batch_size]
        probs = model.predict(np.stack([prepare_image(s, cfg) for s in batch]))
        for sample, prob in zip(batch, probs[:, 0]):
            mask = prob.astype(np.float32)
            if cfg.train.pseudo_threshold is not None:
                mask = (mask > cfg.train.pseudo_threshold).astype(np.float32)
            entries.append((sample.sample_id, mask))
    logger.info("Generated %d pseudo-labels", len(entries))
    return PseudoLabelSet(entries)


def pseudo_items(
    unlabeled: Dataset, pseudo: PseudoLabelSet, cfg: RunConfig
) -> List[TrainItem]:
    """Training pairs from unlabeled samples and their pseudo-labels."""
    masks = pseudo.as_dict()
    missing = [s.sample_id for s in unlabeled if s.sample_id not in masks]
    if missing:
        raise UsageError(f"no pseudo-label for samples {missing[:5]}")
    return [TrainItem(s.sample_id, prepare_image(s, cfg), masks[s.sample_id]) for s in unlabeled]
