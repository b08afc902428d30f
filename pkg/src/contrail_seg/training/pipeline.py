"""Two-phase training: cross-validated primary training, pseudo-labels, retraining."""

import logging
from typing import Optional, Tuple

from ..config import RunConfig, config_hash
from ..models.network import NetworkSpec
from ..models.reports import TwoPhaseReport
from ..models.scene import Dataset
from ..network.model import Checkpoint
from .pseudo import check_compatible, generate_pseudo_labels, pseudo_items
from .trainer import cross_validate, evaluate_model, train_full

logger = logging.getLogger(__name__)


def two_phase_train(
    labeled: Dataset,
    unlabeled: Dataset,
    spec: NetworkSpec,
    cfg: RunConfig,
    holdout: Optional[Dataset] = None,
) -> Tuple[Checkpoint, TwoPhaseReport]:
    """Train, pseudo-label ``unlabeled`` with the best fold, then retrain on both sets.

    With an empty ``unlabeled`` set this is plain single-phase training on ``labeled``.
    The final model is scored on ``holdout`` when given, otherwise on ``labeled``.
    """
    for part in (labeled, unlabeled, holdout):
        if part is not None:
            check_compatible(spec, part)
    scored = holdout if holdout is not None and len(holdout) else labeled

    if len(unlabeled) == 0:
        logger.info("No unlabeled samples: training a single phase")
        final = train_full(labeled, spec, cfg)
        evaluation = evaluate_model(final, scored, cfg)
        return final, TwoPhaseReport(
            config_hash=config_hash(cfg),
            phase1=None,
            best_fold=None,
            pseudo_count=0,
            phase2_dice=evaluation.dice(cfg.train.dice_reduction),
            per_sample=evaluation.per_sample,
            phase2_per_image_dice=evaluation.per_image_dice,
        )

    phase1 = cross_validate(labeled, spec, cfg)
    best = phase1.best_fold
    best_checkpoint = phase1.folds[best].checkpoint
    logger.info("Phase 1: e_cv %.4f, best fold %d", phase1.e_cv, best)
    phase1_holdout = None
    if holdout is not None and len(holdout):
        phase1_holdout = evaluate_model(best_checkpoint, holdout, cfg).dice(
            cfg.train.dice_reduction
        )

    pseudo = generate_pseudo_labels(best_checkpoint, unlabeled, cfg)
    extra = pseudo_items(unlabeled, pseudo, cfg)
    init = None if cfg.train.phase2_restart else best_checkpoint
    final = train_full(
        labeled, spec, cfg, extra_items=extra, epochs=cfg.train.effective_phase2_epochs, init=init
    )

    evaluation = evaluate_model(final, scored, cfg)
    phase2_dice = evaluation.dice(cfg.train.dice_reduction)
    logger.info("Phase 2: dice %.4f on %d samples", phase2_dice, len(scored))
    return final, TwoPhaseReport(
        config_hash=config_hash(cfg),
        phase1=phase1,
        best_fold=best,
        pseudo_count=len(pseudo),
        phase2_dice=phase2_dice,
        per_sample=evaluation.per_sample,
        phase1_holdout_dice=phase1_holdout,
        phase2_per_image_dice=evaluation.per_image_dice,
    )
