"""Network construction: scaling, blocks and the segmentation model."""

from .blocks import MBConvParams, SEParams, mbconv_block, se_block
from .model import (
    Checkpoint,
    SegmentationModel,
    build_segmentation_model,
    load_checkpoint,
    save_checkpoint,
)
from .scaling import compound_scale, scale_network_spec

__all__ = [
    "MBConvParams",
    "SEParams",
    "mbconv_block",
    "se_block",
    "Checkpoint",
    "SegmentationModel",
    "build_segmentation_model",
    "load_checkpoint",
    "save_checkpoint",
    "compound_scale",
    "scale_network_spec",
]
