"""Synthetic contrail corpus: generation and persistence."""

from .store import load_dataset, save_dataset
from .synth import capsule_coverage, generate_dataset, generate_sample, synthesize

__all__ = [
    "load_dataset",
    "save_dataset",
    "capsule_coverage",
    "generate_dataset",
    "generate_sample",
    "synthesize",
]
