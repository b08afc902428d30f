"""Squeeze-and-excitation and MBConv building blocks.

Blocks are plain functions over parameter dataclasses; the model owns the Tensors.
"""

import math
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from ..autograd import ops
from ..autograd.tensor import Tensor
from ..errors import ConfigError, DimensionError
from ..models.network import MBConvSpec


def he_normal(rng: np.random.Generator, shape, fan_in: int) -> Tensor:
    std = math.sqrt(2.0 / fan_in)
    return Tensor(rng.standard_normal(shape) * std, requires_grad=True)


def zeros(shape) -> Tensor:
    return Tensor(np.zeros(shape, dtype=np.float32), requires_grad=True)


def beta_param(value: float) -> Tensor:
    return Tensor(np.full((1,), value, dtype=np.float32), requires_grad=True)


@dataclass
class SEParams:
    """Channel gate weights: W1 squeezes C channels to S, W2 restores C."""

    reduce_weights: Tensor  # (S, C, 1, 1)
    reduce_bias: Tensor
    expand_weights: Tensor  # (C, S, 1, 1)
    expand_bias: Tensor

    @classmethod
    def init(cls, rng: np.random.Generator, channels: int, squeezed: int) -> "SEParams":
        return cls(
            reduce_weights=he_normal(rng, (squeezed, channels, 1, 1), channels),
            reduce_bias=zeros((squeezed,)),
            expand_weights=he_normal(rng, (channels, squeezed, 1, 1), squeezed),
            expand_bias=zeros((channels,)),
        )

    def named(self) -> Dict[str, Tensor]:
        return {
            "reduce.weight": self.reduce_weights,
            "reduce.bias": self.reduce_bias,
            "expand.weight": self.expand_weights,
            "expand.bias": self.expand_bias,
        }


def _activate(x: Tensor, activation: str, beta: Optional[Tensor] = None) -> Tensor:
    if activation == "relu":
        return ops.relu(x)
    if activation == "swish":
        return ops.swish(x, beta if beta is not None else np.ones((1,), dtype=np.float32))
    if activation == "identity":
        return x
    raise ConfigError(f"unknown SE activation {activation!r}", field="se_activation")


def se_block(x: Tensor, params: SEParams, activation: str = "relu") -> Tensor:
    """Rescale every channel of ``x`` by a gate in (0, 1) computed from its global mean."""
    channels = params.reduce_weights.shape[1]
    if x.data.ndim != 4 or x.shape[1] != channels:
        raise DimensionError(
            f"se_block: input channels (axis 1) = {x.shape[1] if x.data.ndim > 1 else '?'} "
            f"but the gate expects {channels}"
        )
    pooled = ops.global_avg_pool(x)
    squeezed = _activate(ops.conv2d(pooled, params.reduce_weights, params.reduce_bias), activation)
    gate = ops.sigmoid(ops.conv2d(squeezed, params.expand_weights, params.expand_bias))
    return ops.mul(x, gate)


@dataclass
class MBConvParams:
    expand_weights: Optional[Tensor]  # None when expansion == 1
    expand_bias: Optional[Tensor]
    expand_beta: Optional[Tensor]
    depthwise_weights: Tensor
    depthwise_bias: Tensor
    depthwise_beta: Tensor
    se: SEParams
    project_weights: Tensor
    project_bias: Tensor

    @classmethod
    def init(
        cls, rng: np.random.Generator, spec: MBConvSpec, beta_init: float = 1.0
    ) -> "MBConvParams":
        hidden = spec.hidden_channels
        k = spec.kernel
        if spec.expansion > 1:
            expand_w = he_normal(rng, (hidden, spec.in_channels, 1, 1), spec.in_channels)
            expand_b = zeros((hidden,))
            expand_beta = beta_param(beta_init)
        else:
            expand_w = expand_b = expand_beta = None
        return cls(
            expand_weights=expand_w,
            expand_bias=expand_b,
            expand_beta=expand_beta,
            depthwise_weights=he_normal(rng, (hidden, 1, k, k), k * k),
            depthwise_bias=zeros((hidden,)),
            depthwise_beta=beta_param(beta_init),
            se=SEParams.init(rng, hidden, spec.squeezed_channels),
            project_weights=he_normal(rng, (spec.out_channels, hidden, 1, 1), hidden),
            project_bias=zeros((spec.out_channels,)),
        )

    def named(self) -> Dict[str, Tensor]:
        out: Dict[str, Tensor] = {}
        if self.expand_weights is not None:
            out["expand.weight"] = self.expand_weights
            out["expand.bias"] = self.expand_bias
            out["expand.beta"] = self.expand_beta
        out["depthwise.weight"] = self.depthwise_weights
        out["depthwise.bias"] = self.depthwise_bias
        out["depthwise.beta"] = self.depthwise_beta
        for name, tensor in self.se.named().items():
            out[f"se.{name}"] = tensor
        out["project.weight"] = self.project_weights
        out["project.bias"] = self.project_bias
        return out


def mbconv_block(
    x: Tensor, params: MBConvParams, spec: MBConvSpec, se_activation: str = "relu"
) -> Tensor:
    """Expand (1x1) -> depthwise -> SE -> linear project (1x1), plus residual when shapes allow."""
    if x.data.ndim != 4 or x.shape[1] != spec.in_channels:
        raise DimensionError(
            f"mbconv_block: input channels (axis 1) = {x.shape[1] if x.data.ndim > 1 else '?'} "
            f"but the block expects {spec.in_channels}"
        )
    h = x
    if params.expand_weights is not None:
        h = ops.conv2d(h, params.expand_weights, params.expand_bias)
        h = ops.swish(h, params.expand_beta)
    h = ops.conv2d(
        h,
        params.depthwise_weights,
        params.depthwise_bias,
        stride=spec.stride,
        padding=spec.kernel // 2,
        groups=spec.hidden_channels,
    )
    h = ops.swish(h, params.depthwise_beta)
    h = se_block(h, params.se, se_activation)
    h = ops.conv2d(h, params.project_weights, params.project_bias)
    if spec.has_residual:
        h = ops.add(h, x)
    return h
