"""Result models produced by training, evaluation and diagnostics."""

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Tuple

import numpy as np

from ..errors import UsageError

if TYPE_CHECKING:
    from ..network.model import Checkpoint


@dataclass
class MetricReport:
    """Per-sample evaluation scores."""

    sample_id: str
    dice: float
    bce: float
    loss: float

    def to_dict(self) -> Dict[str, Any]:
        return {"sample_id": self.sample_id, "dice": self.dice, "bce": self.bce, "loss": self.loss}


@dataclass
class FoldResult:
    fold: int
    train_ids: List[str]
    val_ids: List[str]
    val_dice: float
    error: float
    epoch_losses: List[float] = field(default_factory=list)
    checkpoint: Optional["Checkpoint"] = field(default=None, repr=False, compare=False)


@dataclass
class CrossValReport:
    """Per-fold errors (1 - Dice) and their mean."""

    fold_errors: List[float]
    e_cv: float
    folds: List[FoldResult] = field(default_factory=list)

    @classmethod
    def from_errors(
        cls, fold_errors: List[float], folds: Optional[List[FoldResult]] = None
    ) -> "CrossValReport":
        if not fold_errors:
            raise UsageError("a cross-validation report needs at least one fold")
        errors = [float(e) for e in fold_errors]
        return cls(fold_errors=errors, e_cv=math.fsum(errors) / len(errors), folds=folds or [])

    @property
    def best_fold(self) -> int:
        """Index of the lowest fold error; ties go to the lowest index."""
        return min(range(len(self.fold_errors)), key=lambda i: (self.fold_errors[i], i))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "fold_errors": self.fold_errors,
            "e_cv": self.e_cv,
            "folds": [
                {
                    "fold": f.fold,
                    "val_ids": f.val_ids,
                    "val_dice": f.val_dice,
                    "error": f.error,
                    "epoch_losses": f.epoch_losses,
                }
                for f in self.folds
            ],
        }


@dataclass
class PseudoLabelSet:
    """Soft model predictions for every unlabeled sample."""

    entries: List[Tuple[str, np.ndarray]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def ids(self) -> List[str]:
        return [sample_id for sample_id, _ in self.entries]

    def as_dict(self) -> Dict[str, np.ndarray]:
        return dict(self.entries)


@dataclass
class EvaluationReport:
    per_sample: List[MetricReport]
    pooled_dice: float
    per_image_dice: float
    threshold: float = 0.5

    def dice(self, reduction: str = "pooled") -> float:
        return self.pooled_dice if reduction == "pooled" else self.per_image_dice

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pooled_dice": self.pooled_dice,
            "per_image_dice": self.per_image_dice,
            "threshold": self.threshold,
            "per_sample": [m.to_dict() for m in self.per_sample],
        }


@dataclass
class TwoPhaseReport:
    """Both phases of pseudo-label training."""

    config_hash: str
    phase1: Optional[CrossValReport]
    best_fold: Optional[int]
    pseudo_count: int
    phase2_dice: float
    per_sample: List[MetricReport] = field(default_factory=list)
    phase1_holdout_dice: Optional[float] = None
    phase2_per_image_dice: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config_hash": self.config_hash,
            "fold_errors": self.phase1.fold_errors if self.phase1 else [],
            "e_cv": self.phase1.e_cv if self.phase1 else None,
            "best_fold": self.best_fold,
            "pseudo_count": self.pseudo_count,
            "phase1_holdout_dice": self.phase1_holdout_dice,
            "phase2_dice": self.phase2_dice,
            "phase2_per_image_dice": self.phase2_per_image_dice,
            "per_sample": [m.to_dict() for m in self.per_sample],
        }


@dataclass
class AblationRow:
    name: str
    use_mc: bool
    use_soft_labels: bool
    use_pseudo_labels: bool
    dices: List[float] = field(default_factory=list)

    @property
    def median_dice(self) -> float:
        return float(np.median(self.dices)) if self.dices else float("nan")


@dataclass
class AblationReport:
    config_hash: str
    seeds: List[int]
    rows: List[AblationRow]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config_hash": self.config_hash,
            "seeds": self.seeds,
            "rows": [
                {
                    "name": r.name,
                    "use_mc": r.use_mc,
                    "use_soft_labels": r.use_soft_labels,
                    "use_pseudo_labels": r.use_pseudo_labels,
                    "dices": r.dices,
                    "median_dice": r.median_dice,
                }
                for r in self.rows
            ],
        }


@dataclass
class ComponentReport:
    """Verdicts of the validity rules for one connected component."""

    frame: int
    label: int
    area: int
    aspect: float
    track_length: int
    appearance: str  # edge | abrupt | persisting (informational)
    passes_area: bool
    passes_aspect: bool
    passes_temporal: bool
    sample_id: str = ""

    @property
    def kept(self) -> bool:
        return self.passes_area and self.passes_aspect and self.passes_temporal


@dataclass
class GradcheckResult:
    name: str
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.error <= self.tolerance
