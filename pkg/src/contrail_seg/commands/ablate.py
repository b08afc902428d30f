"""Ablation command: the four-row MC / soft-label / pseudo-label study."""

import sys
from pathlib import Path
from typing import Optional

import click
from rich.console import Console

from ..data.synth import synthesize
from ..formatters.format_decorator import format_decorator
from ..formatters.json_formatter import dumps
from ..training.ablation import ABLATION_ROWS, run_ablation
from .options import (
    config_epilog,
    handle_errors,
    open_dataset,
    output_dir,
    resolve_config,
    run_options,
)

console = Console(file=sys.stderr)


@click.command(name="ablate", epilog=config_epilog())
@run_options
@click.option(
    "--data",
    "data_path",
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    help="Use this dataset instead of synthesizing ablation.n_samples samples.",
)
@format_decorator("ablation")
@handle_errors
def ablate_cli(run_flags, data_path: Optional[Path], format_handler):
    """Compare baseline, +MC, +MC+SL and +MC+SL+PL on one corpus over several seeds."""
    cfg = resolve_config(run_flags)
    if data_path is not None:
        corpus = open_dataset(data_path, cfg)
    else:
        with console.status(f"[bold green]Synthesizing {cfg.ablation.n_samples} samples..."):
            corpus = synthesize(cfg.scene, cfg.ablation.n_samples)
    out = output_dir(cfg)

    runs = len(ABLATION_ROWS) * len(cfg.ablation.seeds)
    with console.status("[bold green]Running ablation...") as status:
        done = []

        def progress(name: str, seed: int) -> None:
            done.append(name)
            status.update(f"[bold green]{name}, seed {seed} ({len(done)}/{runs})")

        report = run_ablation(corpus, cfg.network, cfg, progress=progress)
    (out / "ablation.json").write_text(dumps(report.to_dict()) + "\n", encoding="utf-8")

    format_handler(report)
    console.print(f"\n[dim]{runs} training runs, results in {out / 'ablation.json'}[/dim]")
