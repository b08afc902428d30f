"""Data models for contrail-seg."""

from .annotation import AnnotationSet, PolygonAnnotation, Ring
from .network import MBConvSpec, NetworkSpec, ScalingConfig, StageSpec
from .reports import (
    AblationReport,
    AblationRow,
    ComponentReport,
    CrossValReport,
    EvaluationReport,
    FoldResult,
    GradcheckResult,
    MetricReport,
    PseudoLabelSet,
    TwoPhaseReport,
)
from .scene import Dataset, Sample, SceneConfig
from .training import AblationConfig, AugmentConfig, LabelConfig, LossConfig, TrainConfig

__all__ = [
    "AnnotationSet",
    "PolygonAnnotation",
    "Ring",
    "MBConvSpec",
    "NetworkSpec",
    "ScalingConfig",
    "StageSpec",
    "AblationReport",
    "AblationRow",
    "ComponentReport",
    "CrossValReport",
    "EvaluationReport",
    "FoldResult",
    "GradcheckResult",
    "MetricReport",
    "PseudoLabelSet",
    "TwoPhaseReport",
    "Dataset",
    "Sample",
    "SceneConfig",
    "AblationConfig",
    "AugmentConfig",
    "LabelConfig",
    "LossConfig",
    "TrainConfig",
]
