"""Model fitting, evaluation and k-fold cross-validation."""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..autograd import ops
from ..autograd.optim import Optimizer
from ..autograd.tensor import no_grad
from ..config import RunConfig
from ..errors import AnnotationError, DimensionError, TrainingError, UsageError
from ..labels.aggregate import aggregate_majority, aggregate_soft
from ..labels.alignment import misalignment_correct
from ..models.network import NetworkSpec
from ..models.reports import CrossValReport, EvaluationReport, FoldResult, MetricReport
from ..models.scene import Dataset, Sample
from ..network.model import Checkpoint, SegmentationModel
from ..runtime import Runtime
from ..scoring.losses import bce, composite_loss, per_sample_terms, soft_dice
from ..scoring.metrics import dice_coefficient, per_image_dice, pooled_dice, threshold
from .augment import augment
from .folds import kfold_split

logger = logging.getLogger(__name__)


@dataclass
class TrainItem:
    """One image/target pair ready for the network."""

    sample_id: str
    image: np.ndarray  # C x H x W, misalignment-corrected when enabled
    target: np.ndarray  # H x W float32 in [0, 1]


def label_convention(dataset: Dataset, cfg: RunConfig) -> str:
    return dataset.scene.label_convention if dataset.scene else cfg.scene.label_convention


def prepare_image(sample: Sample, cfg: RunConfig) -> np.ndarray:
    """The label frame of ``sample``, shifted by misalignment correction iff enabled."""
    image = sample.frame(cfg.labels.label_frame)
    if cfg.train.use_mc:
        image = misalignment_correct(image, cfg.labels.mc_shift, cfg.labels.mc_axes)
    return np.asarray(image, dtype=np.float32)


def label_target(sample: Sample, cfg: RunConfig, convention: str, soft: bool) -> np.ndarray:
    """Soft or majority target of the label frame, reusing stored labels when they match."""
    aset = sample.annotation_set(cfg.labels.label_frame)
    if aset.annotator_count < cfg.labels.min_annotators:
        raise AnnotationError(
            f"sample {sample.sample_id} has {aset.annotator_count} annotators, "
            f"at least {cfg.labels.min_annotators} are required"
        )
    cached = sample.cached_label("soft" if soft else "majority", convention, cfg.labels.label_frame)
    if cached is not None:
        return np.array(cached, dtype=np.float32)
    if soft:
        return aggregate_soft(aset, convention=convention)
    return aggregate_majority(aset, convention=convention).astype(np.float32)


def labeled_items(dataset: Dataset, cfg: RunConfig) -> List[TrainItem]:
    """Training pairs whose targets are soft or majority labels per ``train.use_soft_labels``."""
    convention = label_convention(dataset, cfg)
    return [
        TrainItem(
            s.sample_id,
            prepare_image(s, cfg),
            label_target(s, cfg, convention, cfg.train.use_soft_labels),
        )
        for s in dataset
    ]


def fit(
    items: Sequence[TrainItem],
    spec: NetworkSpec,
    cfg: RunConfig,
    epochs: Optional[int] = None,
    fold: Optional[int] = None,
    init: Optional[Checkpoint] = None,
) -> Tuple[SegmentationModel, List[float]]:
    """Train a model on ``items`` with the composite loss.

    Returns:
        (model, mean loss per epoch)

    Raises:
        TrainingError: If a batch loss is not finite
    """
    train = cfg.train
    epochs = train.epochs if epochs is None else epochs
    if not items and epochs:
        raise UsageError("cannot train on an empty set")
    model = SegmentationModel(spec, seed=train.seed)
    if init is not None:
        model.load_state_dict(init.params)
    optimizer = Optimizer(model.parameters(), lr=train.lr, kind=train.optimizer)
    tag = "full" if fold is None else f"fold {fold}"

    epoch_losses: List[float] = []
    for epoch in range(epochs):
        rng = np.random.default_rng([train.seed, 0 if fold is None else fold + 1, epoch])
        order = rng.permutation(len(items))
        logger.debug("%s epoch %d order %s", tag, epoch, order.tolist())
        total = 0.0
        for start in range(0, len(order), train.batch_size):
            batch = [items[i] for i in order[start : start + train.batch_size]]
            pairs = [augment(b.image, b.target, train.augmentation, rng) for b in batch]
            images = np.stack([image for image, _ in pairs])
            targets = np.stack([mask for _, mask in pairs])[:, None]

            loss = composite_loss(model(images), targets, cfg.loss)
            value = loss.item()
            if not math.isfinite(value):
                raise TrainingError(f"{tag}: loss became {value}", epoch=epoch, fold=fold)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += value * len(batch)
        epoch_losses.append(total / len(items))
        logger.info("%s epoch %d/%d loss %.4f", tag, epoch + 1, epochs, epoch_losses[-1])
    return model, epoch_losses


def _as_model(model: Union[SegmentationModel, Checkpoint]) -> SegmentationModel:
    return model.to_model() if isinstance(model, Checkpoint) else model


def evaluate_model(
    model: Union[SegmentationModel, Checkpoint], dataset: Dataset, cfg: RunConfig
) -> EvaluationReport:
    """Score predictions on ``dataset`` against its majority labels.

    Dice uses predictions thresholded at ``train.eval_threshold``; BCE and loss use the
    raw sigmoid outputs.
    """
    if len(dataset) == 0:
        raise UsageError("cannot evaluate on an empty set")
    model = _as_model(model)
    convention = label_convention(dataset, cfg)
    batch_size = cfg.train.batch_size
    t = cfg.train.eval_threshold

    reports: List[MetricReport] = []
    pairs = []
    samples = list(dataset)
    for start in range(0, len(samples), batch_size):
        batch = samples[start : start + batch_size]
        images = np.stack([prepare_image(s, cfg) for s in batch])
        truth = np.stack([label_target(s, cfg, convention, soft=False) for s in batch])
        with no_grad():
            logits = model(images)
            bce_per, _, loss_per = per_sample_terms(logits, truth[:, None], cfg.loss)
            probs = ops.sigmoid(logits).data[:, 0]
        for i, sample in enumerate(batch):
            predicted = threshold(probs[i], t)
            pairs.append((predicted, truth[i]))
            reports.append(
                MetricReport(
                    sample_id=sample.sample_id,
                    dice=dice_coefficient(predicted, truth[i]),
                    bce=float(bce_per.data[i]),
                    loss=float(loss_per.data[i]),
                )
            )
    return EvaluationReport(
        per_sample=reports,
        pooled_dice=pooled_dice(pairs),
        per_image_dice=per_image_dice(pairs),
        threshold=t,
    )


def score_masks(
    predictions: Dict[str, np.ndarray], dataset: Dataset, cfg: RunConfig
) -> EvaluationReport:
    """Score stored probability masks against the majority labels of ``dataset``.

    Raises:
        UsageError: If a sample has no prediction
        DimensionError: If a prediction is not H x W
    """
    if len(dataset) == 0:
        raise UsageError("cannot evaluate on an empty set")
    missing = [s.sample_id for s in dataset if s.sample_id not in predictions]
    if missing:
        raise UsageError(f"no prediction for samples {missing[:5]}")
    convention = label_convention(dataset, cfg)
    t = cfg.train.eval_threshold
    loss_cfg = cfg.loss

    reports: List[MetricReport] = []
    pairs = []
    for sample in dataset:
        prob = np.asarray(predictions[sample.sample_id], dtype=np.float32)
        truth = label_target(sample, cfg, convention, soft=False)
        if prob.shape != truth.shape:
            raise DimensionError(
                f"prediction for {sample.sample_id} is {prob.shape}, labels are {truth.shape}"
            )
        prob = np.clip(prob, 0.0, 1.0)
        bce_value = bce(prob, truth, loss_cfg.prob_clamp).item()
        dice_term = soft_dice(prob, truth, loss_cfg.dice_smooth).item()
        predicted = threshold(prob, t)
        pairs.append((predicted, truth))
        reports.append(
            MetricReport(
                sample_id=sample.sample_id,
                dice=dice_coefficient(predicted, truth),
                bce=bce_value,
                loss=loss_cfg.bce_weight * bce_value + loss_cfg.dice_weight * (1.0 - dice_term),
            )
        )
    return EvaluationReport(
        per_sample=reports,
        pooled_dice=pooled_dice(pairs),
        per_image_dice=per_image_dice(pairs),
        threshold=t,
    )


def train_fold(
    train_set: Dataset,
    val_set: Dataset,
    spec: NetworkSpec,
    cfg: RunConfig,
    fold: int = 0,
) -> FoldResult:
    """Fit on ``train_set`` and score on ``val_set``; error is 1 - validation Dice."""
    if len(train_set) == 0 or len(val_set) == 0:
        raise UsageError(f"fold {fold}: train and validation sets must be non-empty")
    overlap = set(train_set.ids()) & set(val_set.ids())
    if overlap:
        raise UsageError(f"fold {fold}: validation samples seen in training: {sorted(overlap)}")
    model, losses = fit(labeled_items(train_set, cfg), spec, cfg, fold=fold)
    report = evaluate_model(model, val_set, cfg)
    val_dice = report.dice(cfg.train.dice_reduction)
    error = 1.0 - val_dice
    logger.info("fold %d done: val_dice %.4f error %.4f", fold, val_dice, error)
    return FoldResult(
        fold=fold,
        train_ids=train_set.ids(),
        val_ids=val_set.ids(),
        val_dice=val_dice,
        error=error,
        epoch_losses=losses,
        checkpoint=Checkpoint.from_model(model, fold=fold),
    )


def train_full(
    labeled: Dataset,
    spec: NetworkSpec,
    cfg: RunConfig,
    extra_items: Sequence[TrainItem] = (),
    epochs: Optional[int] = None,
    init: Optional[Checkpoint] = None,
) -> Checkpoint:
    """Train one model on every labeled sample (plus ``extra_items``) without validation."""
    items = labeled_items(labeled, cfg) + list(extra_items)
    model, losses = fit(items, spec, cfg, epochs=epochs, init=init)
    return Checkpoint.from_model(model, final_loss=losses[-1] if losses else None)


def cross_validate(dataset: Dataset, spec: NetworkSpec, cfg: RunConfig) -> CrossValReport:
    """Run ``train.folds`` folds; folds may run on parallel threads, results keep fold order."""
    splits = kfold_split(dataset.ids(), cfg.train.folds, cfg.train.seed)

    def run(indexed):
        fold, (train_ids, val_ids) = indexed
        return train_fold(dataset.subset(train_ids), dataset.subset(val_ids), spec, cfg, fold)

    folds = Runtime.map(run, list(enumerate(splits)))
    report = CrossValReport.from_errors([f.error for f in folds], folds)
    logger.info("cross-validation e_cv %.4f over %d folds", report.e_cv, len(folds))
    return report
