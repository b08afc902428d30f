import dataclasses

import numpy as np
import pytest

from contrail_seg.autograd import Optimizer, Tensor
from contrail_seg.labels import aggregate_soft
from contrail_seg.errors import AnnotationError, DimensionError, TrainingError, UsageError
from contrail_seg.models import AugmentConfig, CrossValReport, LabelConfig
from contrail_seg.network import SegmentationModel
from contrail_seg.runtime import Runtime
from contrail_seg.scoring import composite_loss
from contrail_seg.training import (
    augment,
    cross_validate,
    evaluate_model,
    fit,
    kfold_split,
    labeled_items,
    prepare_image,
    score_masks,
    train_fold,
)
from contrail_seg.training.augment import centred_affine, warp_plane
from contrail_seg.training.trainer import label_target

NO_AUGMENT = AugmentConfig(shift_scale_rotate_p=0.0, hflip_p=0.0, rot90_p=0.0)


@pytest.mark.parametrize("n, k", [(6, 2), (10, 5), (7, 7), (11, 3)])
def test_kfold_validation_sets_partition_the_ids(n, k):
    ids = [f"s{i:04d}" for i in range(n)]

    splits = kfold_split(ids, k, seed=4)

    assert len(splits) == k
    seen = [i for _, val in splits for i in val]
    assert sorted(seen) == ids
    for train, val in splits:
        assert not set(train) & set(val)
        assert sorted(train + val) == ids
    sizes = [len(val) for _, val in splits]
    assert max(sizes) - min(sizes) <= 1


def test_ten_samples_in_five_folds_gives_pairs():
    splits = kfold_split([str(i) for i in range(10)], 5)

    assert [len(val) for _, val in splits] == [2, 2, 2, 2, 2]


def test_kfold_is_deterministic_per_seed():
    ids = [str(i) for i in range(9)]

    assert kfold_split(ids, 3, seed=1) == kfold_split(ids, 3, seed=1)
    assert kfold_split(ids, 3, seed=1) != kfold_split(ids, 3, seed=2)


def test_more_folds_than_samples_is_a_usage_error():
    with pytest.raises(UsageError, match="3 samples into 4 folds"):
        kfold_split(["a", "b", "c"], 4)


def test_duplicate_ids_cannot_be_split():
    with pytest.raises(UsageError, match="unique"):
        kfold_split(["a", "a", "b"], 2)


def test_cross_validation_error_is_the_mean_fold_error():
    report = CrossValReport.from_errors([0.1, 0.2, 0.3])

    assert report.e_cv == pytest.approx(0.2, abs=1e-12)


def test_best_fold_ties_go_to_the_lowest_index():
    report = CrossValReport.from_errors([0.3, 0.1, 0.1])

    assert report.best_fold == 1


def test_augment_without_transforms_is_the_identity():
    rng = np.random.default_rng(0)
    image = rng.random((2, 8, 8)).astype(np.float32)
    mask = rng.random((8, 8)).astype(np.float32)

    out_image, out_mask = augment(image, mask, NO_AUGMENT, rng)

    np.testing.assert_array_equal(out_image, image)
    np.testing.assert_array_equal(out_mask, mask)


def test_augment_flips_image_and_mask_together():
    rng = np.random.default_rng(0)
    image = rng.random((1, 6, 6)).astype(np.float32)
    mask = (image[0] > 0.5).astype(np.float32)

    out_image, out_mask = augment(image, mask, dataclasses.replace(NO_AUGMENT, hflip_p=1.0), rng)

    np.testing.assert_array_equal(out_image, image[:, :, ::-1])
    np.testing.assert_array_equal(out_mask, mask[:, ::-1])


def test_augment_keeps_image_and_mask_aligned_under_affine_warps():
    image = np.zeros((1, 16, 16), dtype=np.float32)
    image[0, 6:10, 3:13] = 1.0
    mask = image[0].copy()
    cfg = AugmentConfig(shift_scale_rotate_p=1.0, hflip_p=0.5)

    out_image, out_mask = augment(image, mask, cfg, np.random.default_rng(5))

    np.testing.assert_allclose(out_image[0], out_mask, atol=1e-6)
    assert out_mask.min() >= 0.0 and out_mask.max() <= 1.0


@pytest.mark.parametrize("size", [7, 8])
def test_quarter_turn_about_the_centre_pixel_matches_rot90(size):
    mask = np.zeros((size, size), dtype=np.float32)
    mask[1:-1, 1:-1] = np.random.default_rng(size).random((size - 2, size - 2))

    turned = warp_plane(mask, centred_affine(size, size, np.pi / 2))

    # +90 degrees in (x, y) with y pointing down is a clockwise quarter turn
    np.testing.assert_allclose(turned, np.rot90(mask, -1), atol=1e-5)


def test_augment_rejects_mismatched_mask():
    with pytest.raises(DimensionError):
        augment(np.zeros((1, 8, 8)), np.zeros((8, 7)), NO_AUGMENT, np.random.default_rng(0))


def test_labeled_items_follow_the_soft_label_switch(tiny_cfg, tiny_dataset):
    soft_cfg = dataclasses.replace(
        tiny_cfg, train=dataclasses.replace(tiny_cfg.train, use_soft_labels=True)
    )

    hard = labeled_items(tiny_dataset, tiny_cfg)
    soft = labeled_items(tiny_dataset, soft_cfg)

    assert set(np.unique(np.concatenate([i.target.ravel() for i in hard]))) <= {0.0, 1.0}
    np.testing.assert_array_equal(soft[0].target, tiny_dataset.samples[0].labels["soft"])


def with_stored_soft_label(sample, value):
    marker = np.full((sample.height, sample.width), value, dtype=np.float32)
    return dataclasses.replace(sample, labels={**sample.labels, "soft": marker})


def test_label_target_reuses_stored_labels_built_the_same_way(tiny_cfg, tiny_dataset):
    sample = with_stored_soft_label(tiny_dataset.samples[0], 0.25)

    target = label_target(sample, tiny_cfg, "legacy", soft=True)

    np.testing.assert_array_equal(target, 0.25)
    target[...] = 1.0
    np.testing.assert_array_equal(sample.labels["soft"], 0.25)


def test_label_target_recomputes_for_another_convention_or_frame(tiny_cfg, tiny_dataset):
    sample = with_stored_soft_label(tiny_dataset.samples[0], 0.25)
    first_frame = dataclasses.replace(tiny_cfg, labels=LabelConfig(label_frame=0))

    center = label_target(sample, tiny_cfg, "center", soft=True)
    earlier = label_target(sample, first_frame, "legacy", soft=True)

    last, first = sample.annotations[-1], sample.annotations[0]
    np.testing.assert_array_equal(center, aggregate_soft(last, convention="center"))
    np.testing.assert_array_equal(earlier, aggregate_soft(first, convention="legacy"))


def test_misalignment_correction_changes_the_prepared_image(tiny_cfg, tiny_dataset):
    mc_cfg = dataclasses.replace(tiny_cfg, train=dataclasses.replace(tiny_cfg.train, use_mc=True))
    sample = tiny_dataset.samples[0]

    assert np.array_equal(prepare_image(sample, tiny_cfg), sample.frame(-1))
    assert not np.array_equal(prepare_image(sample, mc_cfg), sample.frame(-1))


def test_too_few_annotators_for_training_is_an_annotation_error(tiny_cfg, tiny_dataset):
    strict = dataclasses.replace(tiny_cfg, labels=LabelConfig(min_annotators=5))

    with pytest.raises(AnnotationError, match="at least 5"):
        label_target(tiny_dataset.samples[0], strict, "legacy", soft=False)


def test_fit_is_deterministic(tiny_cfg, tiny_dataset):
    items = labeled_items(tiny_dataset, tiny_cfg)

    first, first_losses = fit(items, tiny_cfg.network, tiny_cfg)
    second, second_losses = fit(items, tiny_cfg.network, tiny_cfg)

    assert first_losses == second_losses
    for name, value in first.state_dict().items():
        np.testing.assert_array_equal(value, second.state_dict()[name])


def test_non_finite_loss_raises_training_error(tiny_cfg, tiny_dataset, monkeypatch):
    monkeypatch.setattr(
        "contrail_seg.training.trainer.composite_loss",
        lambda *args, **kwargs: Tensor(np.array(np.nan)),
    )
    items = labeled_items(tiny_dataset, tiny_cfg)

    with pytest.raises(TrainingError) as excinfo:
        fit(items, tiny_cfg.network, tiny_cfg, fold=1)

    assert excinfo.value.epoch == 0
    assert excinfo.value.fold == 1
    assert "epoch=0 fold=1" in excinfo.value.one_line()


def test_train_fold_with_zero_epochs_returns_the_initial_model(tiny_cfg, tiny_dataset):
    cfg = dataclasses.replace(tiny_cfg, train=dataclasses.replace(tiny_cfg.train, epochs=0))
    train = tiny_dataset.subset(tiny_dataset.ids()[:4])
    val = tiny_dataset.subset(tiny_dataset.ids()[4:])

    result = train_fold(train, val, cfg.network, cfg)

    assert result.epoch_losses == []
    initial = SegmentationModel(cfg.network, seed=cfg.train.seed).state_dict()
    assert list(result.checkpoint.params) == list(initial)
    for name, value in initial.items():
        np.testing.assert_array_equal(result.checkpoint.params[name], value)


def test_train_fold_rejects_overlapping_sets(tiny_cfg, tiny_dataset):
    train = tiny_dataset.subset(tiny_dataset.ids()[:4])
    val = tiny_dataset.subset(tiny_dataset.ids()[3:])

    with pytest.raises(UsageError, match="s0003"):
        train_fold(train, val, tiny_cfg.network, tiny_cfg)


def test_evaluate_model_scores_every_sample(tiny_cfg, tiny_dataset):
    model, _ = fit(labeled_items(tiny_dataset, tiny_cfg), tiny_cfg.network, tiny_cfg)

    report = evaluate_model(model, tiny_dataset, tiny_cfg)

    assert [m.sample_id for m in report.per_sample] == tiny_dataset.ids()
    assert 0.0 <= report.pooled_dice <= 1.0
    assert 0.0 <= report.per_image_dice <= 1.0
    assert all(np.isfinite(m.loss) for m in report.per_sample)


def test_cross_validation_reports_one_error_per_fold(tiny_cfg, tiny_dataset):
    report = cross_validate(tiny_dataset, tiny_cfg.network, tiny_cfg)

    assert len(report.fold_errors) == 2
    assert report.e_cv == pytest.approx(np.mean(report.fold_errors))
    assert sorted(i for f in report.folds for i in f.val_ids) == tiny_dataset.ids()
    for fold in report.folds:
        assert fold.error == pytest.approx(1.0 - fold.val_dice)
        assert fold.checkpoint is not None


def test_thread_count_does_not_change_cross_validation(tiny_cfg, tiny_dataset, monkeypatch):
    serial = cross_validate(tiny_dataset, tiny_cfg.network, tiny_cfg)
    monkeypatch.setattr(Runtime, "_threads", 2)
    parallel = cross_validate(tiny_dataset, tiny_cfg.network, tiny_cfg)

    assert serial.fold_errors == parallel.fold_errors
    assert [f.epoch_losses for f in serial.folds] == [f.epoch_losses for f in parallel.folds]


def test_scoring_the_majority_labels_gives_perfect_dice(tiny_cfg, tiny_dataset):
    predictions = {s.sample_id: s.labels["majority"].astype(np.float32) for s in tiny_dataset}

    report = score_masks(predictions, tiny_dataset, tiny_cfg)

    assert report.pooled_dice == 1.0
    assert report.per_image_dice == 1.0


def test_scoring_needs_a_prediction_for_every_sample(tiny_cfg, tiny_dataset):
    with pytest.raises(UsageError, match="no prediction"):
        score_masks({}, tiny_dataset, tiny_cfg)


def test_scoring_rejects_wrongly_shaped_predictions(tiny_cfg, tiny_dataset):
    predictions = {s.sample_id: np.zeros((4, 4)) for s in tiny_dataset}

    with pytest.raises(DimensionError):
        score_masks(predictions, tiny_dataset, tiny_cfg)


def test_one_adam_step_lowers_the_batch_loss_for_most_seeds(tiny_cfg, tiny_dataset):
    items = labeled_items(tiny_dataset, tiny_cfg)[:4]
    images = np.stack([i.image for i in items])
    targets = np.stack([i.target for i in items])[:, None]

    improved = 0
    for seed in range(10):
        model = SegmentationModel(tiny_cfg.network, seed=seed)
        optimizer = Optimizer(model.parameters(), lr=1e-3, kind="adam")
        loss = composite_loss(model(images), targets, tiny_cfg.loss)
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        after = composite_loss(model(images), targets, tiny_cfg.loss).item()
        improved += after < loss.item()

    assert improved >= 9
