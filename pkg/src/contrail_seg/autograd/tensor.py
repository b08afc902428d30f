"""Tensor and Tape: the core of the reverse-mode differentiation engine."""

import logging
import threading
from contextlib import contextmanager
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import DimensionError, NumericalError, UsageError

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, float, int, Sequence[float]]
# Backward rule: gradient w.r.t. the output -> gradients w.r.t. each parent (None = no grad)
BackwardFn = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]

_debug_checks = False


def set_debug_checks(enabled: bool) -> None:
    """Toggle the finiteness check on every forward result."""
    global _debug_checks
    _debug_checks = bool(enabled)


def debug_checks_enabled() -> bool:
    return _debug_checks


# Grad mode is thread-local
_grad_mode = threading.local()


def grad_enabled() -> bool:
    return getattr(_grad_mode, "enabled", True)


@contextmanager
def no_grad() -> Iterator[None]:
    """Run ops without recording provenance on the current thread."""
    previous = grad_enabled()
    _grad_mode.enabled = False
    try:
        yield
    finally:
        _grad_mode.enabled = previous


class Tensor:
    """N-dimensional float32 array with an optional gradient and recorded provenance.

    Leaves (tensors created by the user) accumulate gradients additively across
    backward passes. Tensors produced by an op remember their parents and the
    rule mapping the output gradient to parent gradients; they never hold
    ``grad`` themselves.
    """

    def __init__(
        self,
        data: ArrayLike,
        requires_grad: bool = False,
        parents: Tuple["Tensor", ...] = (),
        backward_fn: Optional[BackwardFn] = None,
        op: str = "leaf",
    ):
        self.data = np.ascontiguousarray(data, dtype=np.float32)
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = bool(requires_grad)
        self.parents = parents
        self.backward_fn = backward_fn
        self.op = op

    @classmethod
    def from_op(
        cls,
        data: np.ndarray,
        parents: Tuple["Tensor", ...],
        backward_fn: BackwardFn,
        op: str,
    ) -> "Tensor":
        """Wrap an op result, recording provenance only when a parent needs gradients."""
        requires_grad = grad_enabled() and any(p.requires_grad for p in parents)
        out = cls(
            data,
            requires_grad=requires_grad,
            parents=parents if requires_grad else (),
            backward_fn=backward_fn if requires_grad else None,
            op=op,
        )
        if _debug_checks and not np.all(np.isfinite(out.data)):
            raise NumericalError(f"{op} produced non-finite values", op=op)
        return out

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def is_leaf(self) -> bool:
        return self.backward_fn is None

    def numpy(self) -> np.ndarray:
        """Return a copy of the underlying data."""
        return self.data.copy()

    def item(self) -> float:
        if self.data.size != 1:
            raise UsageError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def zero_grad(self) -> None:
        self.grad = None

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy(), requires_grad=False)

    def backward(self, grad: Optional[ArrayLike] = None) -> None:
        """Back-propagate from this tensor into every reachable leaf."""
        Tape.record(self).backward(grad)

    def accumulate(self, grad: np.ndarray) -> None:
        if grad.shape != self.data.shape:
            raise DimensionError(
                f"gradient shape {grad.shape} does not match tensor shape {self.data.shape}"
            )
        grad = grad.astype(np.float32, copy=False)
        self.grad = grad.copy() if self.grad is None else self.grad + grad

    # Operator sugar; the rules live in ops.py
    def __add__(self, other):
        from . import ops

        return ops.add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        from . import ops

        return ops.sub(self, other)

    def __rsub__(self, other):
        from . import ops

        return ops.sub(other, self)

    def __mul__(self, other):
        from . import ops

        return ops.mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        from . import ops

        return ops.div(self, other)

    def __rtruediv__(self, other):
        from . import ops

        return ops.div(other, self)

    def __neg__(self):
        from . import ops

        return ops.neg(self)

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}, op={self.op}{flag})"


def as_tensor(value: Union[Tensor, ArrayLike]) -> Tensor:
    """Wrap constants so ops can treat every operand as a Tensor."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value, requires_grad=False)


class Tape:
    """Ordered list of recorded operations leading to one output.

    The order is a topological order of the graph (parents before children),
    built by a deterministic depth-first walk. Replaying it in reverse visits
    every operation exactly once.
    """

    def __init__(self, output: Tensor, entries: List[Tensor]):
        self.output = output
        self.entries = entries

    @classmethod
    def record(cls, output: Tensor) -> "Tape":
        order: List[Tensor] = []
        visited = set()
        stack: List[Tuple[Tensor, bool]] = [(output, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in reversed(node.parents):
                if id(parent) not in visited:
                    stack.append((parent, False))
        return cls(output, order)

    def __len__(self) -> int:
        return len(self.entries)

    def operations(self) -> List[str]:
        return [node.op for node in self.entries if not node.is_leaf]

    def backward(self, grad: Optional[ArrayLike] = None) -> None:
        """Replay the tape in reverse, accumulating gradients into leaves."""
        output = self.output
        if grad is None:
            if output.data.size != 1:
                raise UsageError(
                    f"backward() without a gradient needs a scalar output, got {output.shape}"
                )
            seed = np.ones_like(output.data)
        else:
            seed = np.asarray(grad, dtype=np.float32).reshape(output.shape)
        if not output.requires_grad:
            logger.debug("backward() on a tensor that does not require grad; nothing to do")
            return

        pending: Dict[int, np.ndarray] = {id(output): seed}
        for node in reversed(self.entries):
            g = pending.pop(id(node), None)
            if g is None:
                continue
            if node.is_leaf:
                if node.requires_grad:
                    node.accumulate(g)
                continue
            parent_grads = node.backward_fn(g)
            for parent, parent_grad in zip(node.parents, parent_grads):
                if parent_grad is None or not parent.requires_grad:
                    continue
                key = id(parent)
                if key in pending:
                    pending[key] = pending[key] + parent_grad
                else:
                    pending[key] = parent_grad
