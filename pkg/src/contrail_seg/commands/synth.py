"""Synthetic corpus generation command."""

import sys

import click
from rich.console import Console

from ..data.synth import generate_dataset
from .options import config_epilog, handle_errors, output_dir, resolve_config, run_options

console = Console(file=sys.stderr)


@click.command(name="synth", epilog=config_epilog())
@run_options
@click.option(
    "--n-samples",
    type=click.IntRange(min=1),
    default=20,
    show_default=True,
    help="Number of samples to generate.",
)
@handle_errors
def synth_cli(run_flags, n_samples):
    """Generate a synthetic contrail dataset with multi-annotator labels.

    The same config and seed always produce byte-identical directories.
    """
    cfg = resolve_config(run_flags)
    out = output_dir(cfg)
    with console.status(f"[bold green]Generating {n_samples} samples..."):
        dataset = generate_dataset(cfg.scene, n_samples, out)
    contrails = sum(len(s.truth[-1]) for s in dataset)
    console.print(f"[green]Wrote {len(dataset)} samples to {out}[/green]")
    console.print(f"[dim]{contrails} contrails in label frames[/dim]")
