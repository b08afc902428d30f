"""The four-row ablation: baseline, then misalignment correction, soft labels and pseudo-labels."""

import dataclasses
import logging
from typing import Callable, List, Optional, Tuple

from ..config import RunConfig, config_hash
from ..models.network import NetworkSpec
from ..models.reports import AblationReport, AblationRow
from ..models.scene import Dataset
from .pipeline import two_phase_train
from .trainer import evaluate_model, train_full

logger = logging.getLogger(__name__)

# (name, use_mc, use_soft_labels, use_pseudo_labels), in report order
ABLATION_ROWS: List[Tuple[str, bool, bool, bool]] = [
    ("Baseline", False, False, False),
    ("Baseline + MC (Misalignment Correction)", True, False, False),
    ("Baseline + MC + SL (Soft Label)", True, True, False),
    ("Baseline + MC + SL + PL (Pseudo-Label)", True, True, True),
]


def row_config(cfg: RunConfig, seed: int, mc: bool, sl: bool, pl: bool) -> RunConfig:
    train = dataclasses.replace(
        cfg.train, seed=seed, use_mc=mc, use_soft_labels=sl, use_pseudo_labels=pl
    )
    return dataclasses.replace(cfg, train=train)


def run_row(
    labeled: Dataset,
    unlabeled: Dataset,
    holdout: Dataset,
    spec: NetworkSpec,
    cfg: RunConfig,
) -> float:
    """Held-out Dice of one configuration."""
    if cfg.train.use_pseudo_labels:
        _, report = two_phase_train(labeled, unlabeled, spec, cfg, holdout=holdout)
        return report.phase2_dice
    checkpoint = train_full(labeled, spec, cfg)
    return evaluate_model(checkpoint, holdout, cfg).dice(cfg.train.dice_reduction)


def run_ablation(
    corpus: Dataset,
    spec: NetworkSpec,
    cfg: RunConfig,
    progress: Optional[Callable[[str, int], None]] = None,
) -> AblationReport:
    """Run every ablation row for every seed in ``ablation.seeds`` on one corpus.

    The corpus is split once into labeled, unlabeled and held-out samples; rows without
    pseudo-labels ignore the unlabeled part. Rows are reported in ``ABLATION_ROWS`` order
    with the median held-out Dice over seeds.
    """
    ablation = cfg.ablation
    labeled, unlabeled, holdout = corpus.split(
        ablation.unlabeled_fraction, ablation.holdout_fraction
    )
    logger.info(
        "Ablation split: %d labeled, %d unlabeled, %d held out",
        len(labeled),
        len(unlabeled),
        len(holdout),
    )
    scored = holdout if len(holdout) else labeled

    rows = []
    for name, mc, sl, pl in ABLATION_ROWS:
        row = AblationRow(name=name, use_mc=mc, use_soft_labels=sl, use_pseudo_labels=pl)
        for seed in ablation.seeds:
            if progress:
                progress(name, seed)
            dice = run_row(labeled, unlabeled, scored, spec, row_config(cfg, seed, mc, sl, pl))
            logger.info("%s seed %d: dice %.4f", name, seed, dice)
            row.dices.append(dice)
        rows.append(row)
    return AblationReport(config_hash=config_hash(cfg), seeds=list(ablation.seeds), rows=rows)
