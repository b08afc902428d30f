"""Diagnostic commands: gradient checks and the label validity filter."""

import dataclasses
import sys
from typing import Tuple

import click
from rich.console import Console

from ..diagnostics import run_gradchecks
from ..formatters.format_decorator import format_decorator
from ..labels.rasterize import rasterize
from ..labels.validity import validity_filter
from ..training.trainer import label_convention
from .options import (
    config_epilog,
    data_option,
    handle_errors,
    open_dataset,
    resolve_config,
    run_options,
)

console = Console(file=sys.stderr)


@click.command(name="gradcheck", epilog=config_epilog())
@run_options
@click.option(
    "--check",
    "names",
    multiple=True,
    help="Run only the named check; repeat for several. Default: all.",
)
@click.option(
    "--max-elements",
    type=click.IntRange(min=1),
    default=8,
    show_default=True,
    help="Input elements sampled per tensor.",
)
@format_decorator("gradcheck")
@handle_errors
@click.pass_context
def gradcheck_cli(ctx, run_flags, names: Tuple[str, ...], max_elements: int, format_handler):
    """Compare analytic gradients of every block with central differences.

    Exits with status 1 when any check exceeds its tolerance.
    """
    cfg = resolve_config(run_flags)
    with console.status("[bold green]Running gradient checks..."):
        results = run_gradchecks(seed=cfg.train.seed, max_elements=max_elements, names=names)
    if not results:
        raise click.BadParameter(f"no check named {', '.join(names)}", param_hint="--check")

    format_handler(results)
    failed = [r.name for r in results if not r.passed]
    if failed:
        console.print(
            f"[red]{len(failed)} of {len(results)} checks failed: {', '.join(failed)}[/red]"
        )
        ctx.exit(1)
    console.print(f"\n[dim]All {len(results)} checks passed[/dim]")


@click.command(name="validate", epilog=config_epilog())
@run_options
@data_option
@click.option(
    "--sample",
    "sample_ids",
    multiple=True,
    help="Only this sample id; repeat for several. Default: all.",
)
@format_decorator("components", formats=["table", "json", "csv"])
@handle_errors
def validate_cli(run_flags, data_path, sample_ids: Tuple[str, ...], format_handler):
    """Run the contrail validity rules on each sample's ground-truth masks.

    Every connected component is reported with its area, aspect ratio and track length.
    """
    cfg = resolve_config(run_flags)
    dataset = open_dataset(data_path)
    if sample_ids:
        unknown = sorted(set(sample_ids) - set(dataset.ids()))
        if unknown:
            raise click.BadParameter(f"unknown samples {', '.join(unknown)}", param_hint="--sample")
        dataset = dataset.subset(list(sample_ids))
    convention = label_convention(dataset, cfg)
    rules = cfg.labels

    components = []
    for sample in dataset:
        masks = [
            rasterize(rings, sample.height, sample.width, convention) for rings in sample.truth
        ]
        _, reports = validity_filter(
            masks,
            min_pixels=rules.min_pixels,
            min_aspect=rules.min_aspect,
            min_frames=rules.min_frames,
            min_iou=rules.min_iou,
        )
        components += [dataclasses.replace(r, sample_id=sample.sample_id) for r in reports]

    format_handler(components)
    kept = sum(c.kept for c in components)
    console.print(f"\n[dim]{kept} of {len(components)} components kept[/dim]")
