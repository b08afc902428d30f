"""Contrail segmentation from scratch: autograd, U-Net, multi-annotator labels and training."""

__version__ = "0.3.0"
