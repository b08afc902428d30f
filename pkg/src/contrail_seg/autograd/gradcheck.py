"""Finite-difference gradient oracle."""

import logging
from typing import Callable, Optional, Sequence

import numpy as np

from ..errors import UsageError
from .tensor import Tensor

logger = logging.getLogger(__name__)


def _evaluate(f: Callable[..., Tensor], inputs: Sequence[Tensor]) -> float:
    out = f(*inputs)
    if out.size != 1:
        raise UsageError(f"gradcheck needs a scalar-valued function, got output shape {out.shape}")
    return float(out.data.reshape(-1)[0])


def gradcheck(
    f: Callable[..., Tensor],
    inputs: Sequence[Tensor],
    h: float = 1e-3,
    max_elements: Optional[int] = None,
    seed: int = 0,
) -> float:
    """Compare reverse-mode gradients of ``f`` against central differences.

    Only inputs with ``requires_grad`` are checked. Perturbations are made in float32
    and the realised step (x+h) - (x-h) is used as the divisor.

    Args:
        f: Function of ``inputs`` returning a single-element tensor
        inputs: Tensors passed positionally to ``f``
        h: Finite-difference step
        max_elements: Check at most this many randomly chosen elements per input
        seed: Seed for the element sample

    Returns:
        max |analytic - numeric| / max(1, |numeric|) over every checked element

    Raises:
        UsageError: If ``f`` is not scalar-valued
    """
    inputs = list(inputs)
    for t in inputs:
        t.zero_grad()
    out = f(*inputs)
    if out.size != 1:
        raise UsageError(f"gradcheck needs a scalar-valued function, got output shape {out.shape}")
    out.backward()

    rng = np.random.default_rng(seed)
    worst = 0.0
    for index, t in enumerate(inputs):
        if not t.requires_grad:
            continue
        analytic = t.grad if t.grad is not None else np.zeros_like(t.data)
        positions = np.arange(t.size)
        if max_elements is not None and t.size > max_elements:
            positions = np.sort(rng.choice(t.size, size=max_elements, replace=False))
            logger.debug("gradcheck input %d: sampled positions %s", index, positions.tolist())

        original = t.data
        for pos in positions:
            flat = original.reshape(-1)
            plus = flat.copy()
            minus = flat.copy()
            plus[pos] = flat[pos] + np.float32(h)
            minus[pos] = flat[pos] - np.float32(h)
            step = float(plus[pos]) - float(minus[pos])
            t.data = plus.reshape(original.shape)
            f_plus = _evaluate(f, inputs)
            t.data = minus.reshape(original.shape)
            f_minus = _evaluate(f, inputs)
            t.data = original
            numeric = (f_plus - f_minus) / step
            a = float(analytic.reshape(-1)[pos])
            worst = max(worst, abs(a - numeric) / max(1.0, abs(numeric)))
    logger.debug("gradcheck max relative error %.3e", worst)
    return worst
