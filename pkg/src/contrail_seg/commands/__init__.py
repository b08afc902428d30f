"""CLI command modules."""

from .ablate import ablate_cli
from .checks import gradcheck_cli, validate_cli
from .evaluate import eval_cli, report_cli
from .pseudolabel import pseudolabel_cli
from .synth import synth_cli
from .train import crossval_cli, train_cli, two_phase_cli

__all__ = [
    "ablate_cli",
    "gradcheck_cli",
    "validate_cli",
    "eval_cli",
    "report_cli",
    "pseudolabel_cli",
    "synth_cli",
    "crossval_cli",
    "train_cli",
    "two_phase_cli",
]
