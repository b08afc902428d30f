"""Parameter update rules: plain SGD and Adam."""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from ..errors import ConfigError, UsageError
from .tensor import Tensor

OPTIMIZERS = ("sgd", "adam")


@dataclass
class OptimizerState:
    """Mutable optimizer memory carried between steps."""

    kind: str = "adam"
    step: int = 0
    betas: Tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8
    first_moment: List[np.ndarray] = field(default_factory=list)
    second_moment: List[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in OPTIMIZERS:
            raise ConfigError(
                f"optimizer must be one of {', '.join(OPTIMIZERS)}, got {self.kind!r}",
                field="optimizer",
            )


def optimizer_step(params: Sequence[Tensor], state: OptimizerState, lr: float) -> OptimizerState:
    """Apply one update to every parameter from its accumulated gradient.

    The update is a pure function of (data, grad, state, lr), so identical inputs always
    give identical parameters.

    Args:
        params: Parameters with ``grad`` populated by a prior backward pass
        state: Optimizer memory; updated in place and returned
        lr: Learning rate

    Returns:
        The updated state

    Raises:
        UsageError: If any parameter has no gradient
    """
    for index, p in enumerate(params):
        if p.grad is None:
            raise UsageError(f"parameter {index} {p.shape} has no gradient; call backward() first")

    lr32 = np.float32(lr)
    if state.kind == "sgd":
        for p in params:
            p.data = (p.data - lr32 * p.grad).astype(np.float32)
        state.step += 1
        return state

    if not state.first_moment:
        state.first_moment = [np.zeros_like(p.data) for p in params]
        state.second_moment = [np.zeros_like(p.data) for p in params]
    if len(state.first_moment) != len(params):
        raise UsageError(
            f"optimizer state tracks {len(state.first_moment)} parameters, got {len(params)}"
        )

    state.step += 1
    b1, b2 = state.betas
    correction1 = 1.0 - b1**state.step
    correction2 = 1.0 - b2**state.step
    for i, p in enumerate(params):
        g = p.grad
        state.first_moment[i] = (b1 * state.first_moment[i] + (1 - b1) * g).astype(np.float32)
        state.second_moment[i] = (b2 * state.second_moment[i] + (1 - b2) * g * g).astype(
            np.float32
        )
        m_hat = state.first_moment[i] / correction1
        v_hat = state.second_moment[i] / correction2
        p.data = (p.data - lr32 * m_hat / (np.sqrt(v_hat) + state.eps)).astype(np.float32)
    return state


class Optimizer:
    """Convenience wrapper binding a parameter list to its optimizer state."""

    def __init__(self, params: Sequence[Tensor], lr: float = 1e-3, kind: str = "adam"):
        self.params = list(params)
        self.lr = lr
        self.state = OptimizerState(kind=kind)

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def step(self) -> None:
        optimizer_step(self.params, self.state, self.lr)
