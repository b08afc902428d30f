"""Reverse-mode automatic differentiation over numpy float32 arrays."""

from . import ops
from .container import load_tensors, save_tensors
from .gradcheck import gradcheck
from .optim import Optimizer, OptimizerState, optimizer_step
from .tensor import (
    Tape,
    Tensor,
    as_tensor,
    debug_checks_enabled,
    grad_enabled,
    no_grad,
    set_debug_checks,
)

__all__ = [
    "ops",
    "Tensor",
    "Tape",
    "as_tensor",
    "grad_enabled",
    "no_grad",
    "set_debug_checks",
    "debug_checks_enabled",
    "Optimizer",
    "OptimizerState",
    "optimizer_step",
    "gradcheck",
    "save_tensors",
    "load_tensors",
]
