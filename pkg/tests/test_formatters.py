import csv
import io
import json

import click
import numpy as np
import pytest
from click.testing import CliRunner
from PIL import Image
from rich.console import Console

from contrail_seg.errors import DimensionError
from contrail_seg.formatters import display
from contrail_seg.formatters.csv_formatter import CSVFormatter
from contrail_seg.formatters.display import DisplayFormatter
from contrail_seg.formatters.format_decorator import format_decorator
from contrail_seg.formatters.generic_handlers import create_format_handlers
from contrail_seg.formatters.json_formatter import JSONFormatter
from contrail_seg.formatters.markdown_formatter import MarkdownFormatter
from contrail_seg.formatters.overlay import (
    LABEL_COLOR,
    PREDICTION_COLOR,
    render_overlay,
    save_overlay,
)
from contrail_seg.models import (
    AblationReport,
    AblationRow,
    ComponentReport,
    CrossValReport,
    EvaluationReport,
    FoldResult,
    MetricReport,
)


def crossval_report():
    folds = [
        FoldResult(0, ["a", "b"], ["c"], val_dice=0.6, error=0.4, epoch_losses=[0.9, 0.7]),
        FoldResult(1, ["a", "c"], ["b"], val_dice=0.8, error=0.2, epoch_losses=[0.8, 0.5]),
    ]
    return CrossValReport.from_errors([0.4, 0.2], folds)


def evaluation_report():
    return EvaluationReport(
        per_sample=[MetricReport("s0000", 0.75, 0.3, 0.25), MetricReport("s0001", 0.5, 0.4, 0.45)],
        pooled_dice=0.7,
        per_image_dice=0.625,
    )


def test_crossval_table_marks_the_best_fold(monkeypatch):
    output = io.StringIO()
    monkeypatch.setattr(
        display, "console_stdout", Console(file=output, force_terminal=False, width=120)
    )

    DisplayFormatter.display_crossval_table(crossval_report())

    rendered = output.getvalue()
    assert "1 *" in rendered
    assert "0.3000" in rendered
    assert "0.5000" in rendered


def test_components_table_lists_the_sample(monkeypatch):
    output = io.StringIO()
    monkeypatch.setattr(
        display, "console_stdout", Console(file=output, force_terminal=False, width=160)
    )
    component = ComponentReport(0, 1, 30, 10.0, 2, "persisting", True, True, True, "s0007")

    DisplayFormatter.display_components_table([component])

    assert "s0007" in output.getvalue()


def test_evaluation_markdown_has_a_row_per_sample_and_both_dice_values():
    output = MarkdownFormatter.format_evaluation(evaluation_report())

    assert "| s0000 | 0.7500 | 0.3000 | 0.2500 |" in output
    assert "| **pooled** | **0.7000** | | |" in output
    assert "| *per image* | 0.6250 | | |" in output


def test_ablation_markdown_keeps_row_order():
    report = AblationReport(
        "abc",
        [0, 1],
        [
            AblationRow("Baseline", False, False, False, [0.5, 0.7]),
            AblationRow("Baseline + MC", True, False, False, [0.6, 0.8]),
        ],
    )

    lines = MarkdownFormatter.format_ablation(report).splitlines()

    assert lines[2] == "| Baseline | 0.6000 |"
    assert lines[3] == "| Baseline + MC | 0.7000 |"


def test_crossval_csv_ends_with_the_mean_error():
    rows = list(csv.reader(io.StringIO(CSVFormatter.format_crossval(crossval_report()))))

    assert rows[0] == ["fold", "val_dice", "error"]
    assert rows[-1] == ["e_cv", "", "0.300000"]


def test_components_csv_starts_with_the_sample_id():
    component = ComponentReport(1, 2, 9, 1.0, 1, "abrupt", False, False, False, "s0001")

    rows = list(csv.reader(io.StringIO(CSVFormatter.format_components([component]))))

    assert rows[0][0] == "sample_id"
    assert rows[1][0] == "s0001"
    assert rows[1][-1] == "False"


def test_json_output_is_stable_and_complete():
    text = JSONFormatter.format_crossval(crossval_report())

    doc = json.loads(text)
    assert doc["e_cv"] == pytest.approx(0.3)
    assert [f["fold"] for f in doc["folds"]] == [0, 1]
    assert text == JSONFormatter.format_crossval(crossval_report())


def test_unknown_formatter_method_is_rejected():
    with pytest.raises(ValueError, match="format_nothing"):
        create_format_handlers("nothing", ["json"])


def test_unknown_format_is_rejected():
    with pytest.raises(ValueError, match="Unknown format"):
        create_format_handlers("crossval", ["yaml"])


def test_format_defaults_to_json_when_piped():
    @click.command()
    @format_decorator("evaluation")
    def show(format_handler):
        format_handler(evaluation_report())

    result = CliRunner().invoke(show, [])

    assert result.exit_code == 0
    assert json.loads(result.output)["pooled_dice"] == 0.7


def test_explicit_format_wins():
    @click.command()
    @format_decorator("evaluation")
    def show(format_handler):
        format_handler(evaluation_report())

    result = CliRunner().invoke(show, ["--format", "csv"])

    assert result.output.splitlines()[0] == "sample_id,dice,bce,loss"


def test_overlay_draws_prediction_over_label_boundaries():
    image = np.zeros((1, 8, 8), dtype=np.float32)
    prediction = np.zeros((8, 8), dtype=np.uint8)
    prediction[2:6, 2:6] = 1
    label = np.zeros((8, 8), dtype=np.uint8)
    label[1:7, 1:7] = 1

    rgb = np.asarray(render_overlay(image, prediction, label, scale=1))

    assert rgb.shape == (8, 8, 3)
    assert tuple(rgb[2, 2]) == PREDICTION_COLOR
    assert tuple(rgb[1, 1]) == LABEL_COLOR
    assert tuple(rgb[0, 0]) == (0, 0, 0)


def test_overlay_is_upscaled_and_saved_as_png(tmp_path):
    image = np.random.default_rng(0).random((1, 4, 4)).astype(np.float32)

    path = save_overlay(tmp_path / "sub" / "o.png", image, np.zeros((4, 4)), scale=3)

    with Image.open(path) as png:
        assert png.format == "PNG"
        assert png.size == (12, 12)


def test_overlay_rejects_mismatched_masks():
    with pytest.raises(DimensionError):
        render_overlay(np.zeros((1, 4, 4)), np.zeros((4, 5)))
