"""Compound scaling of depth, width and resolution."""

import dataclasses
import math
from typing import Tuple

from ..models.network import NetworkSpec, ScalingConfig, StageSpec

CHANNEL_DIVISOR = 4


def compound_scale(cfg: ScalingConfig) -> Tuple[float, float, float]:
    """Return the (depth, width, resolution) multipliers alpha^phi, beta^phi, gamma^phi."""
    return cfg.alpha**cfg.phi, cfg.beta_w**cfg.phi, cfg.gamma**cfg.phi


def adjust_depth(repeats: int, depth_mult: float) -> int:
    return max(1, int(math.ceil(repeats * depth_mult)))


def adjust_channels(channels: int, width_mult: float, divisor: int = CHANNEL_DIVISOR) -> int:
    """Nearest multiple of ``divisor``, never below ``divisor``."""
    return max(divisor, int(math.floor(channels * width_mult / divisor + 0.5)) * divisor)


def scale_network_spec(spec: NetworkSpec) -> NetworkSpec:
    """Apply the spec's own scaling multipliers and return the scaled copy.

    The returned spec keeps ``scaling`` so it can be echoed, but its sizes are final.
    """
    depth, width, _ = compound_scale(spec.scaling)
    stages = [
        StageSpec(
            repeats=adjust_depth(stage.repeats, depth),
            channels=adjust_channels(stage.channels, width),
            stride=stage.stride,
            expansion=stage.expansion,
            kernel=stage.kernel,
        )
        for stage in spec.stages
    ]
    return dataclasses.replace(
        spec,
        input_size=spec.scaled_input_size,
        stem_channels=adjust_channels(spec.stem_channels, width),
        stages=stages,
        decoder_channels=[adjust_channels(c, width) for c in spec.decoder_channels],
    )
