"""Network architecture specifications."""

from dataclasses import dataclass, field
from typing import List

from ..errors import ConfigError

SE_ACTIVATIONS = ("relu", "swish", "identity")


@dataclass
class ScalingConfig:
    """Compound-scaling coefficient and the depth/width/resolution bases."""

    phi: float = 0.0
    alpha: float = 1.2  # depth base
    beta_w: float = 1.1  # width base (not the swish beta)
    gamma: float = 1.15  # resolution base

    def __post_init__(self):
        if self.phi < 0:
            raise ConfigError(f"phi must be >= 0, got {self.phi}", field="phi")
        for name in ("alpha", "beta_w", "gamma"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}", field=name)


@dataclass
class StageSpec:
    """One encoder stage: ``repeats`` MBConv blocks, the first with ``stride``."""

    repeats: int
    channels: int
    stride: int = 1
    expansion: int = 4
    kernel: int = 3

    def __post_init__(self):
        if self.repeats < 1:
            raise ConfigError(f"repeats must be >= 1, got {self.repeats}", field="repeats")
        if self.channels < 1:
            raise ConfigError(f"channels must be >= 1, got {self.channels}", field="channels")
        if self.stride not in (1, 2):
            raise ConfigError(f"stride must be 1 or 2, got {self.stride}", field="stride")
        if self.expansion < 1:
            raise ConfigError(f"expansion must be >= 1, got {self.expansion}", field="expansion")
        if self.kernel < 1 or self.kernel % 2 == 0:
            raise ConfigError(f"kernel must be odd, got {self.kernel}", field="kernel")


def _default_stages() -> List[StageSpec]:
    return [
        StageSpec(repeats=1, channels=8, stride=1),
        StageSpec(repeats=2, channels=16, stride=2),
        StageSpec(repeats=2, channels=24, stride=2),
    ]


@dataclass
class NetworkSpec:
    """Micro-EfficientNet encoder with a U-Net decoder.

    The decoder has one upsampling step per stride-2 stage, so ``decoder_channels``
    must have exactly that many entries.
    """

    input_channels: int = 1
    input_size: int = 64
    stem_channels: int = 8
    stages: List[StageSpec] = field(default_factory=_default_stages)
    decoder_channels: List[int] = field(default_factory=lambda: [16, 8])
    se_ratio: int = 4
    se_activation: str = "relu"
    swish_beta_init: float = 1.0
    scaling: ScalingConfig = field(default_factory=ScalingConfig)

    def __post_init__(self):
        if self.input_channels < 1:
            raise ConfigError("input_channels must be >= 1", field="input_channels")
        if self.input_size < 1:
            raise ConfigError("input_size must be >= 1", field="input_size")
        if self.stem_channels < 1:
            raise ConfigError("stem_channels must be >= 1", field="stem_channels")
        if not self.stages:
            raise ConfigError("at least one stage is required", field="stages")
        if self.se_ratio < 1:
            raise ConfigError(f"se_ratio must be >= 1, got {self.se_ratio}", field="se_ratio")
        if self.se_activation not in SE_ACTIVATIONS:
            raise ConfigError(
                f"se_activation must be one of {', '.join(SE_ACTIVATIONS)}, "
                f"got {self.se_activation!r}",
                field="se_activation",
            )
        if len(self.decoder_channels) != self.downsample_steps:
            raise ConfigError(
                f"decoder_channels needs {self.downsample_steps} entries (one per stride-2 stage), "
                f"got {len(self.decoder_channels)}",
                field="decoder_channels",
            )
        if any(c < 1 for c in self.decoder_channels):
            raise ConfigError("decoder channels must be >= 1", field="decoder_channels")

    @property
    def scaled_input_size(self) -> int:
        """Resolution after compound scaling: round(input_size * gamma^phi)."""
        return int(round(self.input_size * self.scaling.gamma**self.scaling.phi))

    @property
    def downsample_steps(self) -> int:
        return sum(1 for stage in self.stages if stage.stride == 2)

    @property
    def downsample_factor(self) -> int:
        return 2**self.downsample_steps


@dataclass
class MBConvSpec:
    """Geometry of a single mobile inverted bottleneck block."""

    in_channels: int
    out_channels: int
    expansion: int = 4
    kernel: int = 3
    stride: int = 1
    se_ratio: int = 4

    def __post_init__(self):
        if self.in_channels < 1 or self.out_channels < 1:
            raise ConfigError("block channels must be >= 1", field="channels")
        if self.expansion < 1:
            raise ConfigError(f"expansion must be >= 1, got {self.expansion}", field="expansion")
        if self.kernel < 1 or self.kernel % 2 == 0:
            raise ConfigError(f"kernel must be odd, got {self.kernel}", field="kernel")
        if self.stride < 1:
            raise ConfigError(f"stride must be >= 1, got {self.stride}", field="stride")
        if self.se_ratio < 1:
            raise ConfigError(f"se_ratio must be >= 1, got {self.se_ratio}", field="se_ratio")

    @property
    def hidden_channels(self) -> int:
        return self.in_channels * self.expansion

    @property
    def squeezed_channels(self) -> int:
        return max(1, self.hidden_channels // self.se_ratio)

    @property
    def has_residual(self) -> bool:
        return self.stride == 1 and self.in_channels == self.out_channels
