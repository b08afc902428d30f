"""JSON output formatter."""

import json
from dataclasses import asdict
from typing import Any, List

from ..models import (
    AblationReport,
    ComponentReport,
    CrossValReport,
    EvaluationReport,
    GradcheckResult,
    TwoPhaseReport,
)


def dumps(data: Any) -> str:
    """Stable JSON: sorted keys, two-space indent."""
    return json.dumps(data, indent=2, sort_keys=True)


class JSONFormatter:
    """Formats reports as JSON."""

    @staticmethod
    def format_crossval(report: CrossValReport) -> str:
        return dumps(report.to_dict())

    @staticmethod
    def format_evaluation(report: EvaluationReport) -> str:
        return dumps(report.to_dict())

    @staticmethod
    def format_ablation(report: AblationReport) -> str:
        return dumps(report.to_dict())

    @staticmethod
    def format_two_phase(report: TwoPhaseReport) -> str:
        return dumps(report.to_dict())

    @staticmethod
    def format_gradcheck(results: List[GradcheckResult]) -> str:
        return dumps([{**asdict(r), "passed": r.passed} for r in results])

    @staticmethod
    def format_components(components: List[ComponentReport]) -> str:
        return dumps([{**asdict(c), "kept": c.kept} for c in components])
