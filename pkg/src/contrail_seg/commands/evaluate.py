"""Evaluation commands: score predictions and render metric reports with overlays."""

import sys
from pathlib import Path
from typing import Dict, Optional

import click
import numpy as np
from rich.console import Console

from ..autograd.container import load_tensors
from ..config import RunConfig, config_hash
from ..data.store import MANIFEST_NAME, load_dataset
from ..errors import FormatError, UsageError
from ..formatters.format_decorator import format_decorator
from ..formatters.json_formatter import dumps
from ..formatters.overlay import save_overlay
from ..models.scene import Dataset
from ..network.model import load_checkpoint
from ..scoring.metrics import threshold
from ..training.trainer import (
    evaluate_model,
    label_convention,
    label_target,
    prepare_image,
    score_masks,
)
from .options import (
    checkpoint_option,
    config_epilog,
    data_option,
    handle_errors,
    open_dataset,
    output_dir,
    resolve_config,
    run_options,
)
from .pseudolabel import MASK_TENSOR

console = Console(file=sys.stderr)


def load_predictions(path: Path, cfg: RunConfig) -> Dict[str, np.ndarray]:
    """Masks by sample id from a dataset directory or a directory of ``<id>.ten`` files.

    A dataset directory contributes its majority labels.
    """
    if (path / MANIFEST_NAME).exists():
        dataset = load_dataset(path)
        convention = label_convention(dataset, cfg)
        return {s.sample_id: label_target(s, cfg, convention, soft=False) for s in dataset}
    predictions = {}
    for file in sorted(path.glob("*.ten")):
        tensors, _ = load_tensors(file)
        if MASK_TENSOR not in tensors:
            raise FormatError(f"{file} has no {MASK_TENSOR!r} tensor", pointer="/tensors")
        predictions[file.stem] = tensors[MASK_TENSOR]
    if not predictions:
        raise UsageError(f"{path} holds neither a dataset nor any .ten prediction files")
    return predictions


@click.command(name="eval", epilog=config_epilog())
@run_options
@data_option
@click.option(
    "--checkpoint",
    "checkpoint_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Score this model's predictions.",
)
@click.option(
    "--pred",
    "pred_path",
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    help="Score stored masks: a dataset directory or a directory of <sample_id>.ten files.",
)
@format_decorator("evaluation")
@handle_errors
def eval_cli(
    run_flags,
    data_path: Path,
    checkpoint_path: Optional[Path],
    pred_path: Optional[Path],
    format_handler,
):
    """Score predictions against a dataset's majority labels (Dice, BCE, loss)."""
    if (checkpoint_path is None) == (pred_path is None):
        raise click.UsageError("pass exactly one of --checkpoint or --pred")
    cfg = resolve_config(run_flags)

    if checkpoint_path is not None:
        dataset = open_dataset(data_path, cfg)
        checkpoint = load_checkpoint(checkpoint_path)
        with console.status(f"[bold green]Evaluating {len(dataset)} samples..."):
            report = evaluate_model(checkpoint, dataset, cfg)
    else:
        dataset = open_dataset(data_path)
        report = score_masks(load_predictions(pred_path, cfg), dataset, cfg)

    format_handler(report)
    console.print(
        f"\n[dim]Pooled Dice {report.pooled_dice:.4f}, "
        f"per-image Dice {report.per_image_dice:.4f}[/dim]"
    )


def _render_overlays(checkpoint, dataset: Dataset, cfg: RunConfig, target: Path) -> int:
    model = checkpoint.to_model()
    convention = label_convention(dataset, cfg)
    samples = list(dataset)
    batch_size = cfg.train.batch_size
    for start in range(0, len(samples), batch_size):
        batch = samples[start : start + batch_size]
        images = np.stack([prepare_image(s, cfg) for s in batch])
        probs = model.predict(images)[:, 0]
        for sample, image, prob in zip(batch, images, probs):
            save_overlay(
                target / f"{sample.sample_id}.png",
                image,
                threshold(prob, cfg.train.eval_threshold),
                label_target(sample, cfg, convention, soft=False),
            )
    return len(samples)


@click.command(name="report", epilog=config_epilog())
@run_options
@checkpoint_option
@data_option
@handle_errors
def report_cli(run_flags, checkpoint_path: Path, data_path: Path):
    """Write metrics.json and overlays/<sample_id>.png for a model on a dataset.

    Overlays show the image in grayscale with the prediction boundary in red and the
    label boundary in green.
    """
    cfg = resolve_config(run_flags)
    dataset = open_dataset(data_path, cfg)
    checkpoint = load_checkpoint(checkpoint_path)
    out = output_dir(cfg)

    with console.status("[bold green]Scoring and rendering overlays..."):
        report = evaluate_model(checkpoint, dataset, cfg)
        metrics = {"config_hash": config_hash(cfg), **report.to_dict()}
        (out / "metrics.json").write_text(dumps(metrics) + "\n", encoding="utf-8")
        count = _render_overlays(checkpoint, dataset, cfg, out / "overlays")

    console.print(f"[green]Wrote metrics.json and {count} overlays to {out}[/green]")
    console.print(f"[dim]Pooled Dice {report.pooled_dice:.4f}[/dim]")
