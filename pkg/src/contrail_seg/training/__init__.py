"""Cross-validation, augmentation, pseudo-labelling and the ablation study."""

from .ablation import ABLATION_ROWS, run_ablation
from .augment import augment
from .folds import kfold_split
from .pipeline import two_phase_train
from .pseudo import generate_pseudo_labels, pseudo_items
from .trainer import (
    TrainItem,
    cross_validate,
    evaluate_model,
    fit,
    labeled_items,
    prepare_image,
    score_masks,
    train_fold,
    train_full,
)

__all__ = [
    "ABLATION_ROWS",
    "run_ablation",
    "augment",
    "kfold_split",
    "two_phase_train",
    "generate_pseudo_labels",
    "pseudo_items",
    "TrainItem",
    "cross_validate",
    "evaluate_model",
    "fit",
    "labeled_items",
    "prepare_image",
    "score_masks",
    "train_fold",
    "train_full",
]
