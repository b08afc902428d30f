"""Markdown table output formatter."""

from typing import List

from ..models import (
    AblationReport,
    CrossValReport,
    EvaluationReport,
    GradcheckResult,
    TwoPhaseReport,
)


class MarkdownFormatter:
    """Formats reports as Markdown tables, ready to paste into a write-up."""

    @staticmethod
    def format_crossval(report: CrossValReport) -> str:
        lines = [
            "| Fold | Val Dice | Error |",
            "|------|----------|-------|",
        ]
        for i, error in enumerate(report.fold_errors):
            lines.append(f"| {i} | {1.0 - error:.4f} | {error:.4f} |")
        lines.append(f"| **E_cv** | | **{report.e_cv:.4f}** |")
        return "\n".join(lines)

    @staticmethod
    def format_evaluation(report: EvaluationReport) -> str:
        lines = [
            "| Sample | Dice | BCE | Loss |",
            "|--------|------|-----|------|",
        ]
        for m in report.per_sample:
            lines.append(f"| {m.sample_id} | {m.dice:.4f} | {m.bce:.4f} | {m.loss:.4f} |")
        lines.append(f"| **pooled** | **{report.pooled_dice:.4f}** | | |")
        lines.append(f"| *per image* | {report.per_image_dice:.4f} | | |")
        return "\n".join(lines)

    @staticmethod
    def format_ablation(report: AblationReport) -> str:
        lines = [
            "| Configuration | Dice |",
            "|---------------|------|",
        ]
        for row in report.rows:
            lines.append(f"| {row.name} | {row.median_dice:.4f} |")
        return "\n".join(lines)

    @staticmethod
    def format_gradcheck(results: List[GradcheckResult]) -> str:
        lines = [
            "| Check | Error | Passed |",
            "|-------|-------|--------|",
        ]
        for r in results:
            lines.append(f"| {r.name} | {r.error:.2e} | {'yes' if r.passed else 'no'} |")
        return "\n".join(lines)

    @staticmethod
    def format_two_phase(report: TwoPhaseReport) -> str:
        lines = [
            "| Metric | Value |",
            "|--------|-------|",
        ]
        if report.phase1 is not None:
            lines.append(f"| Phase 1 E_cv | {report.phase1.e_cv:.4f} |")
            lines.append(f"| Best fold | {report.best_fold} |")
        if report.phase1_holdout_dice is not None:
            lines.append(f"| Phase 1 held-out Dice | {report.phase1_holdout_dice:.4f} |")
        lines.append(f"| Pseudo-labels | {report.pseudo_count} |")
        lines.append(f"| Phase 2 Dice | {report.phase2_dice:.4f} |")
        return "\n".join(lines)
