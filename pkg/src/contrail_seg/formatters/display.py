"""Rich tables for training, evaluation and diagnostic reports."""

import sys
from typing import List

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from ..models import (
    AblationReport,
    ComponentReport,
    CrossValReport,
    EvaluationReport,
    GradcheckResult,
    TwoPhaseReport,
)

# Console for status/info messages (goes to stderr)
console_stderr = Console(file=sys.stderr)
# Console for data output (goes to stdout)
console_stdout = Console(file=sys.stdout)


def is_script_context() -> bool:
    """Return True if stdout is not a TTY (piped/redirected/script context)."""
    return not sys.stdout.isatty()


def _table(title: str) -> Table:
    return Table(title=title, box=box.ROUNDED, show_header=True, header_style="bold magenta")


def _verdict(ok: bool) -> str:
    return "[green]yes[/green]" if ok else "[red]no[/red]"


class DisplayFormatter:
    """Renders reports to the terminal."""

    @staticmethod
    def display_crossval_table(report: CrossValReport):
        table = _table("Cross-validation")
        table.add_column("Fold", style="cyan", justify="right")
        table.add_column("Val samples", style="dim", justify="right")
        table.add_column("Val Dice", style="green", justify="right")
        table.add_column("Error", style="yellow", justify="right")
        table.add_column("Final loss", style="white", justify="right")

        best = report.best_fold
        if report.folds:
            for fold in report.folds:
                marker = " *" if fold.fold == best else ""
                final_loss = f"{fold.epoch_losses[-1]:.4f}" if fold.epoch_losses else "-"
                table.add_row(
                    f"{fold.fold}{marker}",
                    str(len(fold.val_ids)),
                    f"{fold.val_dice:.4f}",
                    f"{fold.error:.4f}",
                    final_loss,
                )
        else:
            for i, error in enumerate(report.fold_errors):
                table.add_row(str(i), "-", f"{1.0 - error:.4f}", f"{error:.4f}", "-")
        table.add_section()
        table.add_row("[bold]E_cv[/bold]", "", "", f"[bold]{report.e_cv:.4f}[/bold]", "")
        console_stdout.print(table)

    @staticmethod
    def display_evaluation_table(report: EvaluationReport):
        table = _table(f"Evaluation (threshold {report.threshold})")
        table.add_column("Sample", style="cyan")
        table.add_column("Dice", style="green", justify="right")
        table.add_column("BCE", style="yellow", justify="right")
        table.add_column("Loss", style="white", justify="right")

        for m in report.per_sample:
            table.add_row(m.sample_id, f"{m.dice:.4f}", f"{m.bce:.4f}", f"{m.loss:.4f}")
        table.add_section()
        table.add_row("[bold]pooled[/bold]", f"[bold]{report.pooled_dice:.4f}[/bold]", "", "")
        table.add_row("[bold]per image[/bold]", f"{report.per_image_dice:.4f}", "", "")
        console_stdout.print(table)

    @staticmethod
    def display_ablation_table(report: AblationReport):
        table = _table("Ablation (median held-out Dice)")
        table.add_column("Configuration", style="cyan")
        table.add_column("Median Dice", style="green", justify="right")
        for seed in report.seeds:
            table.add_column(f"seed {seed}", style="dim", justify="right")

        for row in report.rows:
            table.add_row(row.name, f"{row.median_dice:.4f}", *[f"{d:.4f}" for d in row.dices])
        console_stdout.print(table)

    @staticmethod
    def display_gradcheck_table(results: List[GradcheckResult]):
        table = _table("Gradient checks")
        table.add_column("Check", style="cyan")
        table.add_column("Max error", style="yellow", justify="right")
        table.add_column("Tolerance", style="dim", justify="right")
        table.add_column("Passed", justify="center")

        for r in results:
            table.add_row(r.name, f"{r.error:.2e}", f"{r.tolerance:.0e}", _verdict(r.passed))
        console_stdout.print(table)

    @staticmethod
    def display_components_table(components: List[ComponentReport]):
        table = _table("Connected components")
        table.add_column("Sample", style="green")
        table.add_column("Frame", style="dim", justify="right")
        table.add_column("Label", style="cyan", justify="right")
        table.add_column("Area", justify="right")
        table.add_column("Aspect", justify="right")
        table.add_column("Track", justify="right")
        table.add_column("Appearance", style="blue")
        table.add_column("Kept", justify="center")

        for c in components:
            table.add_row(
                c.sample_id,
                str(c.frame),
                str(c.label),
                f"{c.area}{'' if c.passes_area else ' [red]<[/red]'}",
                f"{c.aspect:.2f}{'' if c.passes_aspect else ' [red]<[/red]'}",
                f"{c.track_length}{'' if c.passes_temporal else ' [red]<[/red]'}",
                c.appearance,
                _verdict(c.kept),
            )
        console_stdout.print(table)

    @staticmethod
    def display_two_phase_table(report: TwoPhaseReport):
        lines = [f"[bold]Config hash:[/bold] {report.config_hash[:16]}"]
        if report.phase1 is not None:
            errors = ", ".join(f"{e:.4f}" for e in report.phase1.fold_errors)
            lines += [
                f"[bold]Phase 1 fold errors:[/bold] {errors}",
                f"[bold]Phase 1 E_cv:[/bold] {report.phase1.e_cv:.4f}",
                f"[bold]Best fold:[/bold] {report.best_fold}",
            ]
            if report.phase1_holdout_dice is not None:
                lines.append(
                    f"[bold]Phase 1 held-out Dice:[/bold] {report.phase1_holdout_dice:.4f}"
                )
        else:
            lines.append("[bold]Phase 1:[/bold] [dim]skipped (no unlabeled samples)[/dim]")
        lines += [
            f"[bold]Pseudo-labels:[/bold] {report.pseudo_count}",
            f"[bold]Phase 2 Dice:[/bold] [green]{report.phase2_dice:.4f}[/green]",
        ]
        if report.phase2_per_image_dice is not None:
            lines.append(
                f"[bold]Phase 2 per-image Dice:[/bold] {report.phase2_per_image_dice:.4f}"
            )
        panel = Panel("\n".join(lines), title="Two-phase training", border_style="blue")
        console_stdout.print(panel)
