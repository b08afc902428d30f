import json

import numpy as np
import pytest

from contrail_seg.errors import AnnotationError, DimensionError, FormatError, UsageError
from contrail_seg.labels import (
    aggregate_majority,
    aggregate_soft,
    alignment_dice,
    alignment_gain,
    aspect_ratio,
    dump_annotation_set,
    flip_consistency,
    load_annotation_set,
    misalignment_correct,
    oriented_rectangle,
    parse_annotation_set,
    points_in_ring,
    rasterize,
    validity_filter,
    vote_counts,
)
from contrail_seg.models import AnnotationSet, PolygonAnnotation

SQUARE = [(0.6, 0.6), (3.6, 0.6), (3.6, 3.6), (0.6, 3.6)]


def random_annotation_set(rng, n_annotators, size=12):
    annotations = []
    for a in range(n_annotators):
        rings = []
        for _ in range(int(rng.integers(0, 3))):
            cx, cy = rng.uniform(2, size - 2, size=2)
            ring = oriented_rectangle(cx, cy, rng.uniform(0, np.pi), rng.uniform(3, 8), 2.0)
            clipped = np.clip(ring, 0, size)
            rings.append([(float(x), float(y)) for x, y in clipped])
        annotations.append(PolygonAnnotation(annotator_id=a, polygons=rings))
    return AnnotationSet("s", size, size, annotations)


def inside(x, y, ring):
    hit = False
    for (x1, y1), (x2, y2) in zip(ring, ring[1:] + ring[:1]):
        if (y1 > y) != (y2 > y) and x < x1 + (y - y1) * (x2 - x1) / (y2 - y1):
            hit = not hit
    return hit


def brute_force_votes(aset):
    counts = np.zeros((aset.height, aset.width), dtype=int)
    for annotation in aset.annotations:
        for i in range(aset.height):
            for j in range(aset.width):
                if any(inside(j + 0.5, i + 0.5, ring) for ring in annotation.polygons):
                    counts[i, j] += 1
    return counts


def test_center_convention_samples_pixel_centres():
    mask = rasterize([SQUARE], 5, 5, "center")

    rows, cols = np.nonzero(mask)
    assert set(rows) == {1, 2, 3}
    assert set(cols) == {1, 2, 3}


def test_legacy_convention_is_shifted_half_a_pixel():
    mask = rasterize([SQUARE], 5, 5, "legacy")

    rows, cols = np.nonzero(mask)
    assert set(rows) == {0, 1, 2}
    assert set(cols) == {0, 1, 2}


def test_translating_a_polygon_by_one_pixel_shifts_its_mask():
    rng = np.random.default_rng(4)
    for _ in range(100):
        cx, cy = rng.uniform(6, 10, size=2)
        ring = oriented_rectangle(cx, cy, rng.uniform(0, np.pi), rng.uniform(3, 7), 2.0)
        moved = [(x + 1.0, y + 1.0) for x, y in ring]

        for convention in ("center", "legacy"):
            mask = rasterize([ring], 18, 18, convention)
            shifted = rasterize([moved], 18, 18, convention)

            np.testing.assert_array_equal(shifted[1:, 1:], mask[:-1, :-1])
            assert shifted[0].sum() == 0 and shifted[:, 0].sum() == 0


def test_points_on_an_edge_count_as_inside():
    ring = [(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)]

    inside = points_in_ring(np.array([2.0, 1.0, 2.5]), np.array([1.0, 0.0, 1.0]), ring)

    assert inside.tolist() == [True, True, False]


def test_union_of_overlapping_rings_is_binary():
    ring = [(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]

    mask = rasterize([ring, ring], 4, 4)

    assert mask.dtype == np.uint8
    assert mask.max() == 1
    assert mask.sum() == 16


def test_degenerate_ring_is_an_annotation_error():
    with pytest.raises(AnnotationError):
        PolygonAnnotation(annotator_id=0, polygons=[[(0.0, 0.0), (1.0, 1.0)]])


def test_soft_labels_equal_vote_fraction():
    rng = np.random.default_rng(0)
    for _ in range(500):
        aset = random_annotation_set(rng, int(rng.integers(1, 6)))

        expected = brute_force_votes(aset) / aset.annotator_count

        np.testing.assert_array_equal(aggregate_soft(aset), expected.astype(np.float32))


def test_majority_requires_strictly_more_than_half():
    rng = np.random.default_rng(1)
    for _ in range(500):
        aset = random_annotation_set(rng, int(rng.integers(1, 6)))

        expected = (brute_force_votes(aset) * 2 > aset.annotator_count).astype(np.uint8)

        np.testing.assert_array_equal(aggregate_majority(aset), expected)


def test_aggregation_ignores_annotator_order():
    rng = np.random.default_rng(3)
    for _ in range(100):
        aset = random_annotation_set(rng, int(rng.integers(1, 6)))
        order = rng.permutation(aset.annotator_count)
        shuffled = AnnotationSet("s", aset.height, aset.width, [aset.annotations[i] for i in order])

        np.testing.assert_array_equal(aggregate_soft(shuffled), aggregate_soft(aset))
        np.testing.assert_array_equal(aggregate_majority(shuffled), aggregate_majority(aset))


def test_two_of_four_votes_is_a_tie_and_stays_background():
    full = [(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]
    annotations = [
        PolygonAnnotation(annotator_id=a, polygons=[full] if a < 2 else []) for a in range(4)
    ]
    aset = AnnotationSet("tie", 4, 4, annotations)

    assert vote_counts(aset).max() == 2
    np.testing.assert_array_equal(aggregate_soft(aset), 0.5)
    assert aggregate_majority(aset).sum() == 0


def test_aggregating_without_annotators_is_a_usage_error():
    with pytest.raises(UsageError):
        aggregate_soft(AnnotationSet("empty", 4, 4, []))


def test_duplicate_annotator_ids_are_rejected():
    with pytest.raises(AnnotationError, match="duplicate"):
        AnnotationSet("s", 4, 4, [PolygonAnnotation(1), PolygonAnnotation(1)])


def test_annotation_json_round_trip(tmp_path):
    aset = random_annotation_set(np.random.default_rng(2), 3)
    path = tmp_path / "annotations.json"

    dump_annotation_set(aset, path)

    assert load_annotation_set(path) == aset


def test_annotation_schema_errors_carry_a_json_pointer():
    doc = {
        "sample_id": "s",
        "height": 4,
        "width": 4,
        "annotators": [{"id": 0, "polygons": [[[0, 0], [1, "x"], [1, 1]]]}],
    }

    with pytest.raises(FormatError) as excinfo:
        parse_annotation_set(doc)

    assert excinfo.value.pointer == "/annotators/0/polygons/0/1/1"


def test_too_few_annotators_is_an_annotation_error():
    doc = {"sample_id": "s", "height": 4, "width": 4, "annotators": [{"id": 0, "polygons": []}]}

    with pytest.raises(AnnotationError, match="at least 4"):
        parse_annotation_set(json.loads(json.dumps(doc)), min_annotators=4)


def test_misalignment_correction_keeps_constant_images():
    image = np.full((2, 6, 6), 0.3, dtype=np.float32)

    corrected = misalignment_correct(image)

    assert corrected.shape == image.shape
    np.testing.assert_allclose(corrected, 0.3, atol=1e-6)


def test_misalignment_correction_shifts_along_the_chosen_axis():
    image = np.zeros((1, 4, 4), dtype=np.float32)
    image[0, :, 2] = 1.0

    shifted = misalignment_correct(image, shift=0.5, axes="x")

    # each output column samples halfway towards its right-hand neighbour
    np.testing.assert_allclose(shifted[0, 0], [0.0, 0.5, 0.5, 0.0], atol=1e-6)
    np.testing.assert_allclose(misalignment_correct(image, axes="y")[0], image[0], atol=1e-6)


def test_misalignment_correction_needs_channel_first_images():
    with pytest.raises(DimensionError):
        misalignment_correct(np.zeros((4, 4)))


def test_correction_improves_agreement_with_legacy_masks():
    plain, corrected = alignment_gain(n_polygons=50, size=32, seed=0)

    assert corrected > plain


def test_alignment_and_flip_diagnostics_return_before_and_after():
    ring = oriented_rectangle(8.0, 8.0, 0.3, 9.0, 3.0)
    image = rasterize([ring], 16, 16, "center").astype(np.float32)[None]
    legacy = rasterize([ring], 16, 16, "legacy")

    plain, corrected = alignment_dice(image, legacy)
    flip_plain, flip_corrected = flip_consistency(image, legacy)

    assert 0.0 <= plain <= 1.0 and 0.0 <= corrected <= 1.0
    assert 0.0 <= flip_plain <= 1.0 and 0.0 <= flip_corrected <= 1.0


def blob(shape, rows, cols):
    mask = np.zeros(shape, dtype=np.uint8)
    mask[rows, cols] = 1
    return mask


def test_small_blob_is_rejected_for_area():
    mask = blob((40, 40), slice(5, 8), slice(5, 8))

    kept, reports = validity_filter([mask, mask])

    assert kept[0].sum() == 0
    assert reports[0].area == 9
    assert not reports[0].passes_area


def test_long_thin_line_is_kept():
    mask = blob((40, 40), slice(5, 8), slice(4, 34))

    kept, reports = validity_filter([mask, mask])

    assert reports[0].aspect == pytest.approx(10.0)
    assert all(r.kept for r in reports)
    np.testing.assert_array_equal(kept[1], mask)


def test_square_is_rejected_for_aspect_ratio():
    mask = blob((40, 40), slice(10, 16), slice(10, 16))

    _, reports = validity_filter([mask, mask])

    assert reports[0].area == 36
    assert reports[0].passes_area
    assert not reports[0].passes_aspect


def test_single_frame_component_fails_the_persistence_rule():
    line = blob((40, 40), slice(5, 8), slice(4, 34))
    empty = np.zeros_like(line)

    kept, reports = validity_filter([line, empty], min_frames=2)

    assert len(reports) == 1
    assert reports[0].track_length == 1
    assert not reports[0].passes_temporal
    assert kept[0].sum() == 0


def test_persistence_rule_is_skipped_for_single_masks():
    line = blob((40, 40), slice(5, 8), slice(4, 34))

    _, reports = validity_filter([line], min_frames=2)

    assert reports[0].kept


def test_aspect_ratio_of_a_single_row():
    coords = np.array([[0, c] for c in range(12)])

    assert aspect_ratio(coords) == pytest.approx(12.0)


def test_validity_filter_rejects_mismatched_frames():
    with pytest.raises(DimensionError, match="frame axis"):
        validity_filter([np.zeros((4, 4)), np.zeros((4, 5))])


def drifting_masks(rng, n_frames=4, size=24):
    """Frames of random rectangles, some thin and some blobby, drifting one pixel per frame."""
    shapes = []
    for _ in range(int(rng.integers(1, 4))):
        cx, cy = rng.uniform(5, size - 8, size=2)
        shapes.append((cx, cy, rng.uniform(0, np.pi), rng.uniform(2, 12), rng.uniform(1, 4)))
    masks = []
    for f in range(n_frames):
        rings = [oriented_rectangle(cx + f, cy, *rest) for cx, cy, *rest in shapes]
        if rng.random() < 0.3:
            rings = rings[1:]
        masks.append(rasterize(rings, size, size) if rings else np.zeros((size, size), np.uint8))
    return masks


def test_validity_filter_is_idempotent():
    rng = np.random.default_rng(5)
    for _ in range(50):
        masks = drifting_masks(rng)

        once, _ = validity_filter(masks)
        twice, reports = validity_filter(once)

        for a, b in zip(once, twice):
            np.testing.assert_array_equal(a, b)
        assert all(r.kept for r in reports)


def test_misalignment_correction_never_leaves_the_input_range():
    rng = np.random.default_rng(6)
    for _ in range(50):
        image = rng.uniform(-3, 5, size=(2, 9, 7)).astype(np.float32)

        corrected = misalignment_correct(image, shift=float(rng.uniform(-1, 1)))

        assert corrected.min() >= image.min() - 1e-5
        assert corrected.max() <= image.max() + 1e-5
