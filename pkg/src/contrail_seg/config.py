"""Run configuration: one YAML/JSON document plus command-line overrides."""

import dataclasses
import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import (
    Any,
    Dict,
    List,
    Mapping,
    Optional,
    Tuple,
    Union,
    get_args,
    get_origin,
    get_type_hints,
)

import yaml

from .errors import ConfigError
from .models.network import NetworkSpec
from .models.scene import SceneConfig
from .models.training import AblationConfig, LabelConfig, LossConfig, TrainConfig

logger = logging.getLogger(__name__)

RESOLVED_CONFIG_NAME = "config.resolved.json"

# CLI flag -> dotted config keys it sets
FLAG_OVERRIDES: Dict[str, Tuple[str, ...]] = {
    "seed": ("train.seed", "scene.seed"),
    "use_mc": ("train.use_mc",),
    "use_soft_labels": ("train.use_soft_labels",),
    "use_pseudo_labels": ("train.use_pseudo_labels",),
    "image_size": ("train.image_size", "scene.image_size", "network.input_size"),
    "folds": ("train.folds",),
    "epochs": ("train.epochs",),
    "out": ("output_dir",),
}


@dataclass
class RunConfig:
    """Every setting a command needs, each with a default."""

    scene: SceneConfig = field(default_factory=SceneConfig)
    network: NetworkSpec = field(default_factory=NetworkSpec)
    train: TrainConfig = field(default_factory=TrainConfig)
    loss: LossConfig = field(default_factory=LossConfig)
    labels: LabelConfig = field(default_factory=LabelConfig)
    ablation: AblationConfig = field(default_factory=AblationConfig)
    output_dir: str = "runs/latest"

    def __post_init__(self):
        resolution = self.network.scaled_input_size
        if self.train.image_size != resolution:
            scaled = (
                f" (scaled to {resolution} by network.scaling)"
                if resolution != self.network.input_size
                else ""
            )
            raise ConfigError(
                f"network.input_size ({self.network.input_size}){scaled} must equal "
                f"train.image_size ({self.train.image_size})",
                field="network.input_size",
            )
        factor = self.network.downsample_factor
        if self.train.image_size % factor:
            raise ConfigError(
                f"image size {self.train.image_size} is not divisible by the model "
                f"downsample factor {factor}",
                field="train.image_size",
            )
        if self.scene.channels != self.network.input_channels:
            raise ConfigError(
                f"network.input_channels ({self.network.input_channels}) must equal "
                f"scene.channels ({self.scene.channels})",
                field="network.input_channels",
            )
        if self.scene.image_size != self.train.image_size:
            raise ConfigError(
                f"scene.image_size ({self.scene.image_size}) must equal "
                f"train.image_size ({self.train.image_size})",
                field="scene.image_size",
            )


# ----------------------------------------------------------------------
# Dict -> dataclass conversion
# ----------------------------------------------------------------------
def _type_name(hint: Any) -> str:
    return getattr(hint, "__name__", None) or str(hint).replace("typing.", "")


def _coerce(value: Any, hint: Any, path: str) -> Any:
    origin = get_origin(hint)
    args = get_args(hint)

    if origin is Union:
        if value is None and type(None) in args:
            return None
        inner = [a for a in args if a is not type(None)]
        return _coerce(value, inner[0], path)
    if dataclasses.is_dataclass(hint):
        if isinstance(value, hint):
            return value
        return build_dataclass(hint, value, path)
    if origin in (list, List):
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"expected a list, got {type(value).__name__}", field=path)
        return [_coerce(v, args[0], f"{path}.{i}") for i, v in enumerate(value)]
    if origin in (tuple, Tuple):
        if not isinstance(value, (list, tuple)) or len(value) != len(args):
            raise ConfigError(f"expected a list of {len(args)} values", field=path)
        return tuple(_coerce(v, a, f"{path}.{i}") for i, (v, a) in enumerate(zip(value, args)))
    if hint is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"expected true/false, got {value!r}", field=path)
        return value
    if hint is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", field=path)
        return value
    if hint is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", field=path)
        return float(value)
    if hint is str:
        if not isinstance(value, str):
            raise ConfigError(f"expected a string, got {value!r}", field=path)
        return value
    raise ConfigError(f"unsupported field type {_type_name(hint)}", field=path)


def build_dataclass(cls, data: Optional[Mapping[str, Any]], path: str = ""):
    """Build ``cls`` from a mapping, rejecting unknown keys.

    Errors carry the dotted path of the offending field.
    """
    if data is None:
        data = {}
    if not isinstance(data, Mapping):
        raise ConfigError(f"expected a mapping, got {type(data).__name__}", field=path or None)
    hints = get_type_hints(cls)
    names = [f.name for f in dataclasses.fields(cls)]
    for key in data:
        if key not in names:
            dotted = f"{path}.{key}" if path else str(key)
            raise ConfigError(f"unknown configuration key {key!r}", field=dotted)
    kwargs = {}
    for name in names:
        if name in data:
            kwargs[name] = _coerce(data[name], hints[name], f"{path}.{name}" if path else name)
    try:
        return cls(**kwargs)
    except ConfigError as error:
        raise (error.with_prefix(path) if path else error) from None


def config_to_dict(cfg: RunConfig) -> Dict[str, Any]:
    """Plain-data view of a config with tuples turned into lists."""

    def plain(value):
        if isinstance(value, dict):
            return {k: plain(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [plain(v) for v in value]
        return value

    return plain(dataclasses.asdict(cfg))


def load_run_config(path: Optional[Union[str, Path]] = None) -> RunConfig:
    """Read a YAML or JSON config file; a missing path or empty file gives the defaults."""
    if path is None:
        return RunConfig()
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        document = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    logger.debug("Loaded config from %s", path)
    return build_dataclass(RunConfig, document or {})


def apply_overrides(cfg: RunConfig, overrides: Mapping[str, Any]) -> RunConfig:
    """Return a new config with dotted-key overrides applied and re-validated."""
    data = config_to_dict(cfg)
    for dotted, value in overrides.items():
        if value is None:
            continue
        node = data
        parts = dotted.split(".")
        for part in parts[:-1]:
            if not isinstance(node, dict) or part not in node:
                raise ConfigError(f"unknown configuration key {dotted!r}", field=dotted)
            node = node[part]
        if not isinstance(node, dict) or parts[-1] not in node:
            raise ConfigError(f"unknown configuration key {dotted!r}", field=dotted)
        node[parts[-1]] = value
    return build_dataclass(RunConfig, data)


def flag_overrides(**flags: Any) -> Dict[str, Any]:
    """Translate CLI flag values into dotted config overrides (None means unset)."""
    overrides: Dict[str, Any] = {}
    for flag, value in flags.items():
        if value is None:
            continue
        for key in FLAG_OVERRIDES[flag]:
            overrides[key] = value
    return overrides


def canonical_json(cfg: RunConfig) -> str:
    return json.dumps(config_to_dict(cfg), sort_keys=True, indent=2) + "\n"


def config_hash(cfg: RunConfig) -> str:
    return hashlib.sha256(canonical_json(cfg).encode("utf-8")).hexdigest()


def write_resolved_config(cfg: RunConfig, out_dir: Union[str, Path]) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    target = out / RESOLVED_CONFIG_NAME
    target.write_text(canonical_json(cfg), encoding="utf-8")
    return target


def default_entries() -> List[Tuple[str, Any]]:
    """Every dotted config key with its default value, in declaration order."""
    entries: List[Tuple[str, Any]] = []

    def walk(value: Any, prefix: str) -> None:
        for f in dataclasses.fields(value):
            item = getattr(value, f.name)
            key = f"{prefix}.{f.name}" if prefix else f.name
            if dataclasses.is_dataclass(item):
                walk(item, key)
            elif isinstance(item, list) and item and dataclasses.is_dataclass(item[0]):
                entries.append((key, [dataclasses.asdict(v) for v in item]))
            else:
                entries.append((key, list(item) if isinstance(item, tuple) else item))

    walk(RunConfig(), "")
    return entries