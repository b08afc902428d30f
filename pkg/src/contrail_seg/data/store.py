"""On-disk dataset layout.

::

    <root>/manifest.json
    <root>/<sample_id>/frame_<i>.ten      tensor "image", C x H x W
    <root>/<sample_id>/annotations.json   {"frames": [annotation set, ...]}
    <root>/<sample_id>/truth.json         {"frames": [[ring, ...], ...]}
    <root>/<sample_id>/labels.ten         tensors "soft" and "majority", meta {"convention"}

Everything is written with sorted keys and no timestamps, so the same dataset
always produces the same bytes.
"""

import dataclasses
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np

from ..autograd.container import load_tensors, save_tensors
from ..config import build_dataclass
from ..errors import ConfigError, FormatError
from ..labels.annotation_io import annotation_set_to_dict, parse_annotation_set, parse_ring
from ..models.annotation import Ring
from ..models.scene import Dataset, Sample, SceneConfig

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
DATASET_FORMAT = "contrailseg-dataset"
DATASET_VERSION = 1

PathLike = Union[str, Path]


def _write_json(path: Path, doc: Any) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _read_json(path: Path) -> Any:
    if not path.exists():
        raise FormatError(f"{path} is missing")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc}") from None


def _scene_doc(scene: SceneConfig) -> Dict[str, Any]:
    return {
        k: list(v) if isinstance(v, tuple) else v for k, v in dataclasses.asdict(scene).items()
    }


def save_dataset(dataset: Dataset, path: PathLike) -> Path:
    """Write ``dataset`` under ``path`` (created if needed) and return the root."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    first = dataset.samples[0] if dataset.samples else None
    manifest = {
        "format": DATASET_FORMAT,
        "version": DATASET_VERSION,
        "height": first.height if first else 0,
        "width": first.width if first else 0,
        "channels": int(first.frames[0].shape[0]) if first else 0,
        "scene": _scene_doc(dataset.scene) if dataset.scene else None,
        "samples": [{"sample_id": s.sample_id, "frames": len(s.frames)} for s in dataset],
    }
    for sample in dataset:
        sample_dir = root / sample.sample_id
        sample_dir.mkdir(exist_ok=True)
        for i, frame in enumerate(sample.frames):
            save_tensors(sample_dir / f"frame_{i}.ten", {"image": frame})
        _write_json(
            sample_dir / "annotations.json",
            {"frames": [annotation_set_to_dict(a) for a in sample.annotations]},
        )
        _write_json(
            sample_dir / "truth.json",
            {"frames": [[[[x, y] for x, y in ring] for ring in rings] for rings in sample.truth]},
        )
        if sample.labels:
            meta = {"convention": sample.labels_convention}
            save_tensors(sample_dir / "labels.ten", sample.labels, meta=meta)
    _write_json(root / MANIFEST_NAME, manifest)
    logger.info("Wrote %d samples to %s", len(dataset), root)
    return root


def _require(doc: Dict[str, Any], key: str, kind, pointer: str):
    if key not in doc:
        raise FormatError(f"manifest field {key!r} is missing", pointer=f"{pointer}/{key}")
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, kind):
        raise FormatError(f"manifest field {key!r} has the wrong type", pointer=f"{pointer}/{key}")
    return value


def _parse_scene(doc: Any) -> SceneConfig:
    try:
        return build_dataclass(SceneConfig, doc)
    except ConfigError as error:
        pointer = "/scene/" + (error.field or "").replace(".", "/")
        raise FormatError(str(error), pointer=pointer.rstrip("/")) from None


def _parse_truth(doc: Any, frames: int, pointer: str) -> List[List[Ring]]:
    if not isinstance(doc, dict) or not isinstance(doc.get("frames"), list):
        raise FormatError("truth document needs a 'frames' list", pointer=f"{pointer}/frames")
    if len(doc["frames"]) != frames:
        raise FormatError(
            f"truth lists {len(doc['frames'])} frames, manifest says {frames}",
            pointer=f"{pointer}/frames",
        )
    truth = []
    for f, rings in enumerate(doc["frames"]):
        if not isinstance(rings, list):
            raise FormatError(
                "frame truth must be a list of rings", pointer=f"{pointer}/frames/{f}"
            )
        truth.append(
            [parse_ring(ring, f"{pointer}/frames/{f}/{r}") for r, ring in enumerate(rings)]
        )
    return truth


def _load_sample(root: Path, entry: Any, index: int, shape) -> Sample:
    pointer = f"/samples/{index}"
    if not isinstance(entry, dict):
        raise FormatError("sample entry must be an object", pointer=pointer)
    sample_id = _require(entry, "sample_id", str, pointer)
    n_frames = _require(entry, "frames", int, pointer)
    sample_dir = root / sample_id

    frames = []
    for i in range(n_frames):
        tensors, _ = load_tensors(sample_dir / f"frame_{i}.ten")
        if "image" not in tensors:
            raise FormatError(f"{sample_id}/frame_{i}.ten has no 'image' tensor")
        image = tensors["image"]
        if image.shape != shape:
            raise FormatError(
                f"{sample_id}/frame_{i}.ten has shape {list(image.shape)}, "
                f"manifest says {list(shape)}",
                pointer=f"{pointer}/frames",
            )
        frames.append(image)

    ann_doc = _read_json(sample_dir / "annotations.json")
    if not isinstance(ann_doc, dict) or not isinstance(ann_doc.get("frames"), list):
        raise FormatError(f"{sample_id}/annotations.json needs a 'frames' list", pointer="/frames")
    annotations = [
        parse_annotation_set(doc, pointer=f"/frames/{f}") for f, doc in enumerate(ann_doc["frames"])
    ]
    truth = _parse_truth(_read_json(sample_dir / "truth.json"), n_frames, "")

    labels: Dict[str, np.ndarray] = {}
    convention = None
    labels_path = sample_dir / "labels.ten"
    if labels_path.exists():
        tensors, meta = load_tensors(labels_path)
        for name, value in tensors.items():
            if value.shape != shape[1:]:
                raise FormatError(
                    f"{sample_id}/labels.ten tensor {name!r} has shape {list(value.shape)}, "
                    f"manifest says {list(shape[1:])}",
                    pointer=f"{pointer}/labels/{name}",
                )
            labels[name] = value.astype(np.uint8) if name == "majority" else value
        convention = meta.get("convention")
    return Sample(sample_id, frames, annotations, truth, labels, convention)


def load_dataset(path: PathLike) -> Dataset:
    """Read a dataset written by :func:`save_dataset`.

    Raises:
        FormatError: Manifest or sample documents violate the schema
        IntegrityError: A tensor payload is truncated
    """
    root = Path(path)
    manifest_path = root / MANIFEST_NAME
    if not manifest_path.exists():
        raise FormatError(f"no {MANIFEST_NAME} in {root}")
    manifest = _read_json(manifest_path)
    if not isinstance(manifest, dict):
        raise FormatError("manifest must be a JSON object", pointer="/")
    if manifest.get("format") != DATASET_FORMAT:
        raise FormatError(f"not a {DATASET_FORMAT} manifest", pointer="/format")
    if manifest.get("version") != DATASET_VERSION:
        raise FormatError(
            f"unsupported dataset version {manifest.get('version')!r}", pointer="/version"
        )
    height = _require(manifest, "height", int, "")
    width = _require(manifest, "width", int, "")
    channels = _require(manifest, "channels", int, "")
    entries = _require(manifest, "samples", list, "")
    scene = _parse_scene(manifest["scene"]) if manifest.get("scene") is not None else None

    shape = (channels, height, width)
    samples = [_load_sample(root, entry, i, shape) for i, entry in enumerate(entries)]
    logger.debug("Loaded %d samples from %s", len(samples), root)
    return Dataset(scene=scene, samples=samples)
