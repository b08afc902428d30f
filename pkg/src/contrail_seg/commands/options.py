"""Options, config resolution and error translation shared by every command."""

import json
import sys
from functools import wraps
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import click
from rich.console import Console

from ..config import (
    RunConfig,
    apply_overrides,
    default_entries,
    flag_overrides,
    load_run_config,
    write_resolved_config,
)
from ..data.store import load_dataset
from ..errors import ConfigError, ContrailSegError
from ..models.scene import Dataset

console = Console(file=sys.stderr)


class CommandError(click.ClickException):
    """A library error rendered as the one-line ``error: <kind>: ...`` message."""

    def __init__(self, error: ContrailSegError):
        super().__init__(error.one_line())
        self.exit_code = error.exit_code

    def show(self, file=None) -> None:
        click.echo(self.format_message(), err=True)


def handle_errors(func: Callable) -> Callable:
    """Translate ContrailSegError into a click exception with the matching exit code."""

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ContrailSegError as error:
            raise CommandError(error) from None

    return wrapper


def config_epilog() -> str:
    """Every config key with its default, for command help pages."""
    lines = ["\b", "Config keys (defaults):"]
    for key, value in default_entries():
        lines.append(f"  {key} = {json.dumps(value)}")
    return "\n".join(lines)


def run_options(func: Callable) -> Callable:
    """Add the shared run flags and pass them through as a ``run_flags`` dict."""
    options = [
        click.option(
            "--config",
            "config_path",
            type=click.Path(dir_okay=False, path_type=Path),
            help="YAML or JSON run config; flags override its values.",
        ),
        click.option("--seed", type=click.IntRange(min=0), help="Seed for data and training."),
        click.option("--out", type=click.Path(file_okay=False), help="Output directory."),
        click.option(
            "--use-mc/--no-use-mc", default=None, help="Apply half-pixel misalignment correction."
        ),
        click.option(
            "--use-soft-labels/--no-use-soft-labels",
            default=None,
            help="Train on soft (vote fraction) labels instead of majority labels.",
        ),
        click.option(
            "--use-pseudo-labels/--no-use-pseudo-labels",
            default=None,
            help="Add pseudo-labelled samples in a second training phase.",
        ),
        click.option("--image-size", type=click.IntRange(min=8), help="Image side in pixels."),
        click.option("--folds", type=click.IntRange(min=2), help="Cross-validation folds."),
        click.option("--epochs", type=click.IntRange(min=0), help="Training epochs."),
    ]
    names = (
        "config_path",
        "seed",
        "out",
        "use_mc",
        "use_soft_labels",
        "use_pseudo_labels",
        "image_size",
        "folds",
        "epochs",
    )

    @wraps(func)
    def wrapper(*args, **kwargs):
        kwargs["run_flags"] = {name: kwargs.pop(name) for name in names}
        return func(*args, **kwargs)

    for option in reversed(options):
        wrapper = option(wrapper)
    return wrapper


def resolve_config(run_flags: Dict[str, Any]) -> RunConfig:
    """Load ``--config`` and apply flag overrides; flags win."""
    flags = dict(run_flags)
    cfg = load_run_config(flags.pop("config_path", None))
    return apply_overrides(cfg, flag_overrides(**flags))


def output_dir(cfg: RunConfig) -> Path:
    """Create the output directory and echo the resolved config into it."""
    out = Path(cfg.output_dir)
    write_resolved_config(cfg, out)
    return out


def open_dataset(path: Path, cfg: Optional[RunConfig] = None) -> Dataset:
    """Load a dataset and check it fits the configured network."""
    with console.status(f"[bold green]Loading dataset from {path}..."):
        dataset = load_dataset(path)
    if cfg is not None and len(dataset):
        sample = dataset.samples[0]
        resolution = cfg.network.scaled_input_size
        if (sample.height, sample.width) != (resolution, resolution):
            raise ConfigError(
                f"dataset images are {sample.height}x{sample.width} but the network expects "
                f"{resolution}; pass --image-size {sample.height}",
                field="network.input_size",
            )
        channels = int(sample.frames[0].shape[0])
        if channels != cfg.network.input_channels:
            raise ConfigError(
                f"dataset has {channels} channels, the network expects "
                f"{cfg.network.input_channels}",
                field="network.input_channels",
            )
    console.print(f"[dim]Loaded {len(dataset)} samples[/dim]")
    return dataset


def data_option(func: Callable) -> Callable:
    return click.option(
        "--data",
        "data_path",
        required=True,
        type=click.Path(exists=True, file_okay=False, path_type=Path),
        help="Dataset directory written by `contrailseg synth`.",
    )(func)


def checkpoint_option(func: Callable) -> Callable:
    return click.option(
        "--checkpoint",
        "checkpoint_path",
        required=True,
        type=click.Path(exists=True, dir_okay=False, path_type=Path),
        help="Model checkpoint written by `train` or `two-phase`.",
    )(func)
