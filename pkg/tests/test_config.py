import json

import pytest

from contrail_seg.config import (
    RESOLVED_CONFIG_NAME,
    RunConfig,
    apply_overrides,
    build_dataclass,
    config_hash,
    default_entries,
    flag_overrides,
    load_run_config,
    write_resolved_config,
)
from contrail_seg.errors import ConfigError
from contrail_seg.models import SceneConfig

from conftest import TINY_CONFIG


def test_missing_config_path_gives_defaults():
    assert load_run_config(None) == RunConfig()


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("", encoding="utf-8")

    assert load_run_config(path) == RunConfig()


def test_yaml_file_sets_nested_values(tiny_config_file):
    cfg = load_run_config(tiny_config_file)

    assert cfg.scene.image_size == 16
    assert cfg.network.stages[1].channels == 8
    assert cfg.scene.contrail_width == (1.0, 1.5)
    assert cfg.train.folds == 2


def test_json_documents_are_accepted(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(TINY_CONFIG), encoding="utf-8")

    assert load_run_config(path).train.image_size == 16


def test_nonexistent_file_is_a_config_error(tmp_path):
    with pytest.raises(ConfigError, match="does not exist"):
        load_run_config(tmp_path / "nope.yaml")


def test_unparsable_yaml_is_a_config_error(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("train: [1, 2\n", encoding="utf-8")

    with pytest.raises(ConfigError, match="cannot parse"):
        load_run_config(path)


def test_unknown_key_reports_its_dotted_path():
    with pytest.raises(ConfigError) as excinfo:
        build_dataclass(RunConfig, {"train": {"epochz": 3}})

    assert excinfo.value.field == "train.epochz"
    assert excinfo.value.exit_code == 2
    assert excinfo.value.one_line().endswith("field=train.epochz")


def test_wrong_type_reports_its_dotted_path():
    with pytest.raises(ConfigError) as excinfo:
        build_dataclass(RunConfig, {"loss": {"bce_weight": "heavy"}})

    assert excinfo.value.field == "loss.bce_weight"


def test_invalid_value_is_prefixed_with_its_section():
    with pytest.raises(ConfigError) as excinfo:
        build_dataclass(RunConfig, {"train": {"folds": 1}})

    assert excinfo.value.field == "train.folds"


def test_booleans_are_not_integers():
    with pytest.raises(ConfigError) as excinfo:
        build_dataclass(SceneConfig, {"channels": True})

    assert excinfo.value.field == "channels"


def test_image_size_must_match_the_network_input():
    with pytest.raises(ConfigError) as excinfo:
        build_dataclass(RunConfig, {"train": {"image_size": 32}})

    assert excinfo.value.field == "network.input_size"


def test_image_size_must_be_divisible_by_the_downsample_factor():
    doc = {"train": {"image_size": 66}, "network": {"input_size": 66}}

    with pytest.raises(ConfigError) as excinfo:
        build_dataclass(RunConfig, doc)

    assert excinfo.value.field == "train.image_size"


def test_compound_scaling_moves_the_expected_image_size():
    scaled = {"phi": 1.0, "gamma": 1.25}
    network = {**TINY_CONFIG["network"], "scaling": scaled}

    with pytest.raises(ConfigError, match="scaled to 20") as excinfo:
        build_dataclass(RunConfig, {**TINY_CONFIG, "network": network})
    assert excinfo.value.field == "network.input_size"

    doc = {
        **TINY_CONFIG,
        "network": network,
        "scene": {**TINY_CONFIG["scene"], "image_size": 20},
        "train": {**TINY_CONFIG["train"], "image_size": 20},
    }
    cfg = build_dataclass(RunConfig, doc)
    assert cfg.network.input_size == 16
    assert cfg.network.scaled_input_size == 20


def test_scene_size_must_match_the_training_size():
    doc = {**TINY_CONFIG, "scene": {**TINY_CONFIG["scene"], "image_size": 32}}

    with pytest.raises(ConfigError) as excinfo:
        build_dataclass(RunConfig, doc)

    assert excinfo.value.field == "scene.image_size"


def test_image_size_flag_moves_every_related_key():
    cfg = apply_overrides(RunConfig(), flag_overrides(image_size=32))

    assert cfg.train.image_size == cfg.network.input_size == cfg.scene.image_size == 32


def test_unset_flags_leave_the_config_alone():
    assert flag_overrides(seed=None, use_mc=None) == {}
    assert apply_overrides(RunConfig(), {"train.seed": None}) == RunConfig()


def test_seed_flag_seeds_both_training_and_synthesis():
    cfg = apply_overrides(RunConfig(), flag_overrides(seed=9, use_mc=True))

    assert cfg.train.seed == cfg.scene.seed == 9
    assert cfg.train.use_mc


def test_override_of_unknown_key_is_a_config_error():
    with pytest.raises(ConfigError) as excinfo:
        apply_overrides(RunConfig(), {"train.nonsense": 1})

    assert excinfo.value.field == "train.nonsense"


def test_config_hash_tracks_every_value():
    base = RunConfig()

    assert config_hash(base) == config_hash(RunConfig())
    assert config_hash(base) != config_hash(apply_overrides(base, {"loss.dice_weight": 0.7}))


def test_resolved_config_round_trips(tmp_path):
    cfg = apply_overrides(RunConfig(), {"train.epochs": 3, "scene.channels": 1})

    path = write_resolved_config(cfg, tmp_path / "out")

    assert path.name == RESOLVED_CONFIG_NAME
    assert load_run_config(path) == cfg


def test_default_entries_cover_every_section():
    keys = dict(default_entries())

    assert keys["train.epochs"] == 20
    assert keys["scene.contrail_width"] == [1.0, 2.5]
    assert keys["train.augmentation.hflip_p"] == 0.5
    assert keys["labels.min_annotators"] == 4
    assert keys["output_dir"] == "runs/latest"
    assert isinstance(keys["network.stages"], list)
