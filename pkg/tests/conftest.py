import copy

import pytest
import yaml

from contrail_seg.config import RunConfig, build_dataclass
from contrail_seg.data.synth import synthesize
from contrail_seg.runtime import Runtime

# 16 x 16 scenes and a two-level network: small enough for unit tests to train in seconds
TINY_CONFIG = {
    "scene": {
        "image_size": 16,
        "contrails_per_scene": [1, 1],
        "contrail_width": [1.0, 1.5],
        "contrail_length": [6.0, 10.0],
        "margin": 1,
    },
    "network": {
        "input_size": 16,
        "stem_channels": 4,
        "stages": [
            {"repeats": 1, "channels": 4, "stride": 1, "expansion": 2},
            {"repeats": 1, "channels": 8, "stride": 2, "expansion": 2},
        ],
        "decoder_channels": [4],
    },
    "train": {"image_size": 16, "epochs": 1, "batch_size": 4, "folds": 2},
    "ablation": {"seeds": [0], "n_samples": 10},
}


def tiny_config(**sections):
    doc = copy.deepcopy(TINY_CONFIG)
    for name, values in sections.items():
        if isinstance(values, dict):
            doc.setdefault(name, {}).update(values)
        else:
            doc[name] = values
    return build_dataclass(RunConfig, doc)


@pytest.fixture(autouse=True)
def single_thread_runtime(monkeypatch):
    monkeypatch.setattr(Runtime, "_threads", 1)
    monkeypatch.setattr(Runtime, "_debug", False)
    monkeypatch.setattr("contrail_seg.autograd.tensor._debug_checks", False)
    monkeypatch.delenv("CONTRAILSEG_THREADS", raising=False)
    monkeypatch.delenv("CONTRAILSEG_DEBUG", raising=False)


@pytest.fixture
def tiny_cfg(tmp_path):
    return tiny_config(output_dir=str(tmp_path / "run"))


@pytest.fixture
def tiny_dataset(tiny_cfg):
    return synthesize(tiny_cfg.scene, 6)


@pytest.fixture
def tiny_config_file(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump(TINY_CONFIG), encoding="utf-8")
    return path
