"""Micro-EfficientNet encoder with a U-Net decoder."""

import dataclasses
import logging
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np

from ..autograd import ops
from ..autograd.container import load_tensors, save_tensors
from ..autograd.tensor import Tensor, as_tensor, no_grad
from ..config import build_dataclass
from ..errors import ConfigError, DimensionError, FormatError
from ..models.network import MBConvSpec, NetworkSpec
from .blocks import MBConvParams, beta_param, he_normal, mbconv_block, zeros
from .scaling import scale_network_spec

logger = logging.getLogger(__name__)


class SegmentationModel:
    """Maps N x C x H x W images to N x 1 x H x W logits.

    ``base_spec`` is the configured architecture; ``spec`` is the same architecture
    after compound scaling, which is what the parameters are built for.
    """

    def __init__(self, base_spec: NetworkSpec, seed: int = 0):
        self.base_spec = base_spec
        self.spec = scale_network_spec(base_spec)
        if self.spec.input_size % self.spec.downsample_factor:
            raise ConfigError(
                f"resolution {self.spec.input_size} is not divisible by the downsample factor "
                f"{self.spec.downsample_factor}",
                field="network.input_size",
            )
        self.seed = seed
        self.block_specs: List[Tuple[MBConvSpec, int]] = []  # (spec, level after block)
        self._params: "OrderedDict[str, Tensor]" = OrderedDict()
        self._blocks: List[MBConvParams] = []
        self._build(np.random.default_rng(seed))

    @property
    def downsample_factor(self) -> int:
        return self.spec.downsample_factor

    @property
    def input_channels(self) -> int:
        return self.spec.input_channels

    def _add(self, name: str, tensor: Tensor) -> Tensor:
        self._params[name] = tensor
        return tensor

    def _build(self, rng: np.random.Generator) -> None:
        spec = self.spec
        beta = spec.swish_beta_init
        cin = spec.input_channels
        self._add("stem.weight", he_normal(rng, (spec.stem_channels, cin, 3, 3), cin * 9))
        self._add("stem.bias", zeros((spec.stem_channels,)))
        self._add("stem.beta", beta_param(beta))

        # channels available at each resolution level, for the decoder skips
        level = 0
        skip_channels: Dict[int, int] = {0: spec.stem_channels}
        channels = spec.stem_channels
        for s, stage in enumerate(spec.stages):
            for r in range(stage.repeats):
                stride = stage.stride if r == 0 else 1
                block_spec = MBConvSpec(
                    in_channels=channels,
                    out_channels=stage.channels,
                    expansion=stage.expansion,
                    kernel=stage.kernel,
                    stride=stride,
                    se_ratio=spec.se_ratio,
                )
                params = MBConvParams.init(rng, block_spec, beta)
                for name, tensor in params.named().items():
                    self._add(f"stages.{s}.{r}.{name}", tensor)
                if stride == 2:
                    level += 1
                channels = stage.channels
                skip_channels[level] = channels
                self.block_specs.append((block_spec, level))
                self._blocks.append(params)

        for d, out_ch in enumerate(spec.decoder_channels):
            level -= 1
            cin = channels + skip_channels[level]
            self._add(f"decoder.{d}.weight", he_normal(rng, (out_ch, cin, 3, 3), cin * 9))
            self._add(f"decoder.{d}.bias", zeros((out_ch,)))
            self._add(f"decoder.{d}.beta", beta_param(beta))
            channels = out_ch

        self._add("head.weight", he_normal(rng, (1, channels, 1, 1), channels))
        self._add("head.bias", zeros((1,)))
        logger.debug(
            "Built model: %d parameter tensors, %d values, downsample x%d",
            len(self._params),
            sum(t.size for t in self._params.values()),
            self.downsample_factor,
        )

    # ------------------------------------------------------------------
    def parameters(self) -> List[Tensor]:
        return list(self._params.values())

    def named_parameters(self) -> "OrderedDict[str, Tensor]":
        return OrderedDict(self._params)

    def zero_grad(self) -> None:
        for p in self._params.values():
            p.zero_grad()

    def state_dict(self) -> "OrderedDict[str, np.ndarray]":
        return OrderedDict((name, t.data.copy()) for name, t in self._params.items())

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        missing = [name for name in self._params if name not in state]
        unexpected = [name for name in state if name not in self._params]
        if missing or unexpected:
            raise ConfigError(
                f"checkpoint does not match the model spec (missing={missing[:3]}, "
                f"unexpected={unexpected[:3]})",
                field="network",
            )
        for name, tensor in self._params.items():
            array = np.asarray(state[name], dtype=np.float32)
            if array.shape != tensor.shape:
                raise ConfigError(
                    f"parameter {name} has shape {array.shape}, model expects {tensor.shape}",
                    field="network",
                )
            tensor.data = array.copy()
            tensor.zero_grad()

    # ------------------------------------------------------------------
    def forward(self, x: Union[Tensor, np.ndarray]) -> Tensor:
        x = as_tensor(x)
        if x.data.ndim != 4:
            raise DimensionError(f"model input must be NCHW, got shape {x.shape}")
        if x.shape[1] != self.input_channels:
            raise DimensionError(
                f"model input channels (axis 1) = {x.shape[1]}, expected {self.input_channels}"
            )
        factor = self.downsample_factor
        for axis in (2, 3):
            if x.shape[axis] % factor:
                raise DimensionError(
                    f"model input axis {axis} = {x.shape[axis]} is not divisible by the "
                    f"downsample factor {factor}"
                )
        p = self._params
        h = ops.conv2d(x, p["stem.weight"], p["stem.bias"], padding=1)
        h = ops.swish(h, p["stem.beta"])

        skips: Dict[int, Tensor] = {0: h}
        level = 0
        for (block_spec, block_level), params in zip(self.block_specs, self._blocks):
            h = mbconv_block(h, params, block_spec, self.spec.se_activation)
            level = block_level
            skips[level] = h

        for d in range(len(self.spec.decoder_channels)):
            level -= 1
            h = ops.upsample_bilinear(h, 2)
            h = ops.concat([h, skips[level]], axis=1)
            h = ops.conv2d(h, p[f"decoder.{d}.weight"], p[f"decoder.{d}.bias"], padding=1)
            h = ops.swish(h, p[f"decoder.{d}.beta"])

        return ops.conv2d(h, p["head.weight"], p["head.bias"])

    __call__ = forward

    def predict(self, images: np.ndarray) -> np.ndarray:
        """Sigmoid probabilities without recording a graph."""
        with no_grad():
            return ops.sigmoid(self.forward(images)).data.copy()


def build_segmentation_model(spec: NetworkSpec, seed: int = 0) -> SegmentationModel:
    """Build a model with He-normal weights drawn from ``seed``."""
    return SegmentationModel(spec, seed)


@dataclass
class Checkpoint:
    """Architecture plus parameter values, detached from any graph."""

    spec: NetworkSpec
    params: Dict[str, np.ndarray]
    meta: Dict[str, object] = dataclasses.field(default_factory=dict)

    @classmethod
    def from_model(cls, model: SegmentationModel, **meta) -> "Checkpoint":
        return cls(spec=model.base_spec, params=model.state_dict(), meta=dict(meta))

    def to_model(self) -> SegmentationModel:
        model = SegmentationModel(self.spec, seed=0)
        model.load_state_dict(self.params)
        return model


def save_checkpoint(
    checkpoint: Union[Checkpoint, SegmentationModel], path: Union[str, Path]
) -> None:
    if isinstance(checkpoint, SegmentationModel):
        checkpoint = Checkpoint.from_model(checkpoint)
    meta = {"network": dataclasses.asdict(checkpoint.spec), **checkpoint.meta}
    save_tensors(path, checkpoint.params, meta=meta)


def load_checkpoint(path: Union[str, Path]) -> Checkpoint:
    params, meta = load_tensors(path)
    if "network" not in meta:
        raise FormatError("checkpoint header carries no network spec", pointer="/meta/network")
    spec = build_dataclass(NetworkSpec, meta["network"], "network")
    extra = {k: v for k, v in meta.items() if k != "network"}
    return Checkpoint(spec=spec, params=params, meta=extra)
