import dataclasses

import numpy as np
import pytest

from contrail_seg.autograd import Tensor, ops
from contrail_seg.errors import ConfigError, DimensionError
from contrail_seg.models import MBConvSpec, NetworkSpec, ScalingConfig, StageSpec
from contrail_seg.network import (
    Checkpoint,
    MBConvParams,
    SEParams,
    SegmentationModel,
    compound_scale,
    load_checkpoint,
    mbconv_block,
    save_checkpoint,
    scale_network_spec,
    se_block,
)
from contrail_seg.network.scaling import adjust_channels, adjust_depth


def small_spec(**overrides):
    spec = NetworkSpec(
        input_channels=1,
        input_size=16,
        stem_channels=4,
        stages=[StageSpec(1, 4, stride=1, expansion=2), StageSpec(1, 8, stride=2, expansion=2)],
        decoder_channels=[4],
    )
    return dataclasses.replace(spec, **overrides)


def test_model_maps_images_to_single_channel_logits():
    model = SegmentationModel(small_spec(), seed=0)
    images = np.random.default_rng(0).standard_normal((3, 1, 16, 16)).astype(np.float32)

    logits = model(images)

    assert logits.shape == (3, 1, 16, 16)
    assert np.all(np.isfinite(logits.data))


def test_default_spec_downsamples_by_four():
    model = SegmentationModel(NetworkSpec(), seed=0)

    assert model.downsample_factor == 4
    assert model(np.zeros((1, 1, 64, 64))).shape == (1, 1, 64, 64)


def test_input_not_divisible_by_downsample_factor_is_rejected():
    model = SegmentationModel(small_spec(), seed=0)

    with pytest.raises(DimensionError, match="axis 2"):
        model(np.zeros((1, 1, 15, 16)))


def test_wrong_channel_count_is_rejected():
    model = SegmentationModel(small_spec(), seed=0)

    with pytest.raises(DimensionError, match="channels"):
        model(np.zeros((1, 3, 16, 16)))


def test_same_seed_builds_identical_parameters():
    a = SegmentationModel(small_spec(), seed=5).state_dict()
    b = SegmentationModel(small_spec(), seed=5).state_dict()

    assert list(a) == list(b)
    for name in a:
        np.testing.assert_array_equal(a[name], b[name])


def test_decoder_needs_one_entry_per_stride_two_stage():
    with pytest.raises(ConfigError) as excinfo:
        small_spec(decoder_channels=[4, 4])

    assert excinfo.value.field == "decoder_channels"


def test_zero_head_predicts_one_half_everywhere():
    model = SegmentationModel(small_spec(), seed=0)
    params = model.named_parameters()
    params["head.weight"].data[...] = 0.0
    params["head.bias"].data[...] = 0.0

    probs = model.predict(np.random.default_rng(1).standard_normal((2, 1, 16, 16)))

    np.testing.assert_allclose(probs, 0.5)


def test_checkpoint_round_trip_reproduces_predictions(tmp_path):
    model = SegmentationModel(small_spec(), seed=3)
    images = np.random.default_rng(2).standard_normal((2, 1, 16, 16)).astype(np.float32)
    path = tmp_path / "model.ten"

    save_checkpoint(Checkpoint.from_model(model, final_loss=0.25), path)
    restored = load_checkpoint(path)

    assert restored.spec == model.base_spec
    assert restored.meta == {"final_loss": 0.25}
    np.testing.assert_array_equal(restored.to_model().predict(images), model.predict(images))


def test_loading_mismatched_parameters_is_a_config_error():
    model = SegmentationModel(small_spec(), seed=0)
    state = model.state_dict()
    state.pop("head.bias")

    with pytest.raises(ConfigError, match="does not match"):
        model.load_state_dict(state)


def test_phi_zero_leaves_the_architecture_unchanged():
    spec = small_spec()

    assert compound_scale(spec.scaling) == (1.0, 1.0, 1.0)
    assert scale_network_spec(spec) == spec


def test_compound_scaling_grows_depth_width_and_resolution():
    spec = NetworkSpec(scaling=ScalingConfig(phi=1.0))

    scaled = scale_network_spec(spec)

    assert [s.repeats for s in scaled.stages] == [2, 3, 3]
    assert scaled.stem_channels == 8
    assert scaled.stages[2].channels == 28
    assert scaled.input_size == 74


def test_channel_rounding_snaps_to_multiples_of_four():
    assert adjust_channels(16, 1.1) == 16
    assert adjust_channels(24, 1.1) == 28
    assert adjust_channels(2, 1.0) == 4
    assert adjust_depth(2, 1.2) == 3


def test_se_block_rescales_channels_without_changing_shape():
    rng = np.random.default_rng(0)
    x = Tensor(rng.standard_normal((2, 8, 4, 4)))

    out = se_block(x, SEParams.init(rng, 8, 2))

    assert out.shape == x.shape
    # gates are sigmoids, so magnitudes can only shrink
    assert np.all(np.abs(out.data) <= np.abs(x.data) + 1e-6)


def test_mbconv_residual_and_strided_shapes():
    rng = np.random.default_rng(0)
    x = Tensor(rng.standard_normal((1, 4, 8, 8)))
    same = MBConvSpec(in_channels=4, out_channels=4, expansion=2)
    down = MBConvSpec(in_channels=4, out_channels=6, expansion=2, stride=2)

    assert same.has_residual
    assert mbconv_block(x, MBConvParams.init(rng, same), same).shape == (1, 4, 8, 8)
    assert mbconv_block(x, MBConvParams.init(rng, down), down).shape == (1, 6, 4, 4)


def test_model_gradients_reach_every_parameter():
    model = SegmentationModel(small_spec(), seed=0)
    images = np.random.default_rng(0).standard_normal((2, 1, 16, 16))

    ops.reduce_mean(model(images)).backward()

    missing = [name for name, p in model.named_parameters().items() if p.grad is None]
    assert missing == []


@pytest.mark.parametrize(
    "phi, expected",
    [(0.0, (1.0, 1.0, 1.0)), (1.0, (1.2, 1.1, 1.15)), (2.0, (1.44, 1.21, 1.3225))],
)
def test_compound_scale_multipliers(phi, expected):
    assert compound_scale(ScalingConfig(phi=phi)) == pytest.approx(expected)


def test_scaled_depth_width_and_resolution_never_shrink_as_phi_grows():
    sizes = []
    for phi in [0.0, 0.5, 1.0, 1.5, 2.0, 3.0]:
        base = NetworkSpec(scaling=ScalingConfig(phi=phi))
        scaled = scale_network_spec(base)
        sizes.append(
            (
                [s.repeats for s in scaled.stages],
                [scaled.stem_channels] + [s.channels for s in scaled.stages],
                base.scaled_input_size,
            )
        )

    for (depth_a, width_a, res_a), (depth_b, width_b, res_b) in zip(sizes, sizes[1:]):
        assert all(a <= b for a, b in zip(depth_a, depth_b))
        assert all(a <= b for a, b in zip(width_a, width_b))
        assert res_a <= res_b


def test_se_block_with_zero_weights_halves_the_input():
    rng = np.random.default_rng(0)
    x = Tensor(rng.standard_normal((2, 8, 4, 4)))
    params = SEParams.init(rng, 8, 2)
    for tensor in params.named().values():
        tensor.data[...] = 0.0

    out = se_block(x, params)

    np.testing.assert_allclose(out.data, x.data / 2, rtol=1e-6)


def test_mbconv_with_zero_weights_is_the_identity():
    rng = np.random.default_rng(0)
    x = Tensor(rng.standard_normal((1, 4, 8, 8)))
    spec = MBConvSpec(in_channels=4, out_channels=4, expansion=2)
    params = MBConvParams.init(rng, spec)
    for tensor in params.named().values():
        tensor.data[...] = 0.0

    out = mbconv_block(x, params, spec)

    np.testing.assert_array_equal(out.data, x.data)


@pytest.mark.parametrize("se_ratio, squeezed", [(4, 2), (2, 4), (16, 1)])
def test_mbconv_gate_width_follows_the_se_ratio(se_ratio, squeezed):
    spec = MBConvSpec(in_channels=4, out_channels=4, expansion=2, se_ratio=se_ratio)

    params = MBConvParams.init(np.random.default_rng(0), spec)

    assert spec.squeezed_channels == squeezed
    assert params.se.reduce_weights.shape == (squeezed, 8, 1, 1)
    assert params.se.expand_weights.shape == (8, squeezed, 1, 1)
