"""Pseudo-label generation command."""

import sys

import click
from rich.console import Console

from ..autograd.container import save_tensors
from ..network.model import load_checkpoint
from ..training.pseudo import generate_pseudo_labels
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

console = Console(file=sys.stderr)

PSEUDO_DIR = "pseudo"
MASK_TENSOR = "mask"


@click.command(name="pseudolabel", epilog=config_epilog())
@run_options
@checkpoint_option
@data_option
@handle_errors
def pseudolabel_cli(run_flags, checkpoint_path, data_path):
    """Predict soft masks for every sample of a dataset.

    Each mask is written to pseudo/<sample_id>.ten as the tensor "mask"; `eval --pred`
    reads the same layout.
    """
    cfg = resolve_config(run_flags)
    checkpoint = load_checkpoint(checkpoint_path)
    dataset = open_dataset(data_path)
    out = output_dir(cfg)

    with console.status(f"[bold green]Predicting {len(dataset)} masks..."):
        pseudo = generate_pseudo_labels(checkpoint, dataset, cfg)
    target = out / PSEUDO_DIR
    target.mkdir(parents=True, exist_ok=True)
    for sample_id, mask in pseudo.entries:
        save_tensors(
            target / f"{sample_id}.ten", {MASK_TENSOR: mask}, meta={"sample_id": sample_id}
        )

    console.print(f"[green]Wrote {len(pseudo)} pseudo-labels to {target}[/green]")
