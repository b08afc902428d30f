"""Trend experiments on the synthetic corpus; each trains several 64 x 64 models.

Run with ``pytest -m slow``.
"""

import dataclasses

import pytest

from contrail_seg.config import RunConfig, apply_overrides
from contrail_seg.data import synthesize
from contrail_seg.labels import alignment_gain
from contrail_seg.training import evaluate_model, run_ablation, train_full, two_phase_train

pytestmark = pytest.mark.slow

SEEDS = [0, 1, 2, 3, 4]


def easy_config(**overrides):
    base = {
        "scene.contrails_per_scene": [1, 1],
        "scene.intensity": 2.0,
        "scene.noise_amplitude": 0.1,
        "train.epochs": 20,
    }
    return apply_overrides(RunConfig(), {**base, **overrides})


def test_smoke_training_reaches_half_dice_on_the_easy_corpus():
    cfg = easy_config()
    corpus = synthesize(cfg.scene, 24)
    train, _, holdout = corpus.split(0.0, 0.25)

    checkpoint = train_full(train, cfg.network, cfg)

    assert evaluate_model(checkpoint, holdout, cfg).pooled_dice >= 0.5


def test_misalignment_correction_recovers_legacy_masks():
    plain, corrected = alignment_gain(n_polygons=50, size=64, seed=0)

    assert corrected > plain


def test_misalignment_correction_helps_training_on_legacy_labels():
    wins = 0
    for seed in SEEDS:
        cfg = easy_config(**{"train.seed": seed, "scene.seed": seed})
        corpus = synthesize(cfg.scene, 30)
        train, _, holdout = corpus.split(0.0, 0.2)
        scores = []
        for use_mc in (False, True):
            run = dataclasses.replace(cfg, train=dataclasses.replace(cfg.train, use_mc=use_mc))
            checkpoint = train_full(train, run.network, run)
            scores.append(evaluate_model(checkpoint, holdout, run).pooled_dice)
        wins += scores[1] >= scores[0]

    assert wins >= 3


def test_second_phase_does_not_hurt_held_out_dice():
    wins = 0
    for seed in SEEDS:
        cfg = easy_config(**{"train.seed": seed, "scene.seed": seed})
        corpus = synthesize(cfg.scene, 100)
        labeled, unlabeled, holdout = corpus.split(0.4, 0.2)

        _, report = two_phase_train(labeled, unlabeled, cfg.network, cfg, holdout=holdout)
        wins += report.phase2_dice >= report.phase1_holdout_dice

    assert wins >= 3


def test_ablation_rows_improve_monotonically():
    cfg = RunConfig()
    corpus = synthesize(cfg.scene, cfg.ablation.n_samples)

    report = run_ablation(corpus, cfg.network, cfg)

    medians = [row.median_dice for row in report.rows]
    assert all(a <= b for a, b in zip(medians, medians[1:])), medians
    assert medians[0] < medians[-1]
