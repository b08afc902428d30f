"""CSV output formatter."""

import csv
import io
from typing import List

from ..models import (
    AblationReport,
    ComponentReport,
    CrossValReport,
    EvaluationReport,
    GradcheckResult,
    TwoPhaseReport,
)


def _render(header: List[str], rows: List[list]) -> str:
    output = io.StringIO()
    writer = csv.writer(output, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return output.getvalue()


class CSVFormatter:
    """Formats reports as CSV."""

    @staticmethod
    def format_crossval(report: CrossValReport) -> str:
        """One row per fold, then an ``e_cv`` summary row."""
        rows = []
        for i, error in enumerate(report.fold_errors):
            rows.append([i, f"{1.0 - error:.6f}", f"{error:.6f}"])
        rows.append(["e_cv", "", f"{report.e_cv:.6f}"])
        return _render(["fold", "val_dice", "error"], rows)

    @staticmethod
    def format_evaluation(report: EvaluationReport) -> str:
        rows = [
            [m.sample_id, f"{m.dice:.6f}", f"{m.bce:.6f}", f"{m.loss:.6f}"]
            for m in report.per_sample
        ]
        rows.append(["pooled", f"{report.pooled_dice:.6f}", "", ""])
        rows.append(["per_image", f"{report.per_image_dice:.6f}", "", ""])
        return _render(["sample_id", "dice", "bce", "loss"], rows)

    @staticmethod
    def format_ablation(report: AblationReport) -> str:
        header = ["configuration", "median_dice"] + [f"seed_{s}" for s in report.seeds]
        rows = [
            [r.name, f"{r.median_dice:.6f}"] + [f"{d:.6f}" for d in r.dices] for r in report.rows
        ]
        return _render(header, rows)

    @staticmethod
    def format_gradcheck(results: List[GradcheckResult]) -> str:
        rows = [[r.name, f"{r.error:.3e}", f"{r.tolerance:.0e}", r.passed] for r in results]
        return _render(["check", "error", "tolerance", "passed"], rows)

    @staticmethod
    def format_components(components: List[ComponentReport]) -> str:
        rows = [
            [
                c.sample_id,
                c.frame,
                c.label,
                c.area,
                f"{c.aspect:.4f}",
                c.track_length,
                c.appearance,
                c.passes_area,
                c.passes_aspect,
                c.passes_temporal,
                c.kept,
            ]
            for c in components
        ]
        header = [
            "sample_id",
            "frame",
            "label",
            "area",
            "aspect",
            "track_length",
            "appearance",
            "passes_area",
            "passes_aspect",
            "passes_temporal",
            "kept",
        ]
        return _render(header, rows)

    @staticmethod
    def format_two_phase(report: TwoPhaseReport) -> str:
        rows = []
        if report.phase1 is not None:
            for i, error in enumerate(report.phase1.fold_errors):
                rows.append([f"phase1_fold_{i}_error", f"{error:.6f}"])
            rows.append(["phase1_e_cv", f"{report.phase1.e_cv:.6f}"])
            rows.append(["best_fold", report.best_fold])
        if report.phase1_holdout_dice is not None:
            rows.append(["phase1_holdout_dice", f"{report.phase1_holdout_dice:.6f}"])
        rows.append(["pseudo_count", report.pseudo_count])
        rows.append(["phase2_dice", f"{report.phase2_dice:.6f}"])
        return _render(["metric", "value"], rows)
