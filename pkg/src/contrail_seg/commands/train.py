"""Training commands: single model, cross-validation and two-phase pseudo-label training."""

import sys

import click
from rich.console import Console

from ..config import config_hash
from ..formatters.format_decorator import format_decorator
from ..formatters.json_formatter import dumps
from ..network.model import save_checkpoint
from ..training import cross_validate, train_full, two_phase_train
from .options import (
    config_epilog,
    data_option,
    handle_errors,
    open_dataset,
    output_dir,
    resolve_config,
    run_options,
)

console = Console(file=sys.stderr)

MODEL_NAME = "model.ten"
BEST_FOLD_NAME = "best_fold.ten"


@click.command(name="train", epilog=config_epilog())
@run_options
@data_option
@handle_errors
def train_cli(run_flags, data_path):
    """Train one model on every sample of a dataset and save it as model.ten."""
    cfg = resolve_config(run_flags)
    dataset = open_dataset(data_path, cfg)
    out = output_dir(cfg)
    if cfg.train.use_pseudo_labels:
        console.print("[yellow]--use-pseudo-labels is ignored here; use `two-phase`[/yellow]")

    with console.status(f"[bold green]Training for {cfg.train.epochs} epochs..."):
        checkpoint = train_full(dataset, cfg.network, cfg)
    checkpoint.meta["config_hash"] = config_hash(cfg)
    save_checkpoint(checkpoint, out / MODEL_NAME)

    final_loss = checkpoint.meta.get("final_loss")
    console.print(f"[green]Saved {out / MODEL_NAME}[/green]")
    if final_loss is not None:
        console.print(f"[dim]Final loss {final_loss:.4f}[/dim]")


@click.command(name="crossval", epilog=config_epilog())
@run_options
@data_option
@format_decorator("crossval")
@handle_errors
def crossval_cli(run_flags, data_path, format_handler):
    """Run k-fold cross-validation and report per-fold errors and E_cv."""
    cfg = resolve_config(run_flags)
    dataset = open_dataset(data_path, cfg)
    out = output_dir(cfg)

    with console.status(f"[bold green]Training {cfg.train.folds} folds..."):
        report = cross_validate(dataset, cfg.network, cfg)
    best = report.folds[report.best_fold].checkpoint
    best.meta["config_hash"] = config_hash(cfg)
    save_checkpoint(best, out / BEST_FOLD_NAME)
    (out / "crossval.json").write_text(dumps(report.to_dict()) + "\n", encoding="utf-8")

    format_handler(report)
    console.print(f"\n[dim]Best fold {report.best_fold}, E_cv {report.e_cv:.4f}[/dim]")


@click.command(name="two-phase", epilog=config_epilog())
@run_options
@data_option
@format_decorator("two_phase")
@handle_errors
def two_phase_cli(run_flags, data_path, format_handler):
    """Cross-validate, pseudo-label the unlabeled split with the best fold, then retrain.

    The dataset is split by order using ablation.unlabeled_fraction and
    ablation.holdout_fraction; the final model is scored on the held-out tail.
    """
    cfg = resolve_config(run_flags)
    dataset = open_dataset(data_path, cfg)
    out = output_dir(cfg)
    labeled, unlabeled, holdout = dataset.split(
        cfg.ablation.unlabeled_fraction, cfg.ablation.holdout_fraction
    )
    console.print(
        f"[dim]{len(labeled)} labeled, {len(unlabeled)} unlabeled, "
        f"{len(holdout)} held out[/dim]"
    )

    with console.status("[bold green]Running two-phase training..."):
        checkpoint, report = two_phase_train(labeled, unlabeled, cfg.network, cfg, holdout)
    checkpoint.meta["config_hash"] = report.config_hash
    save_checkpoint(checkpoint, out / MODEL_NAME)
    (out / "two_phase.json").write_text(dumps(report.to_dict()) + "\n", encoding="utf-8")

    format_handler(report)
