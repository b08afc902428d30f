"""Raw tensor container: one JSON header line followed by float32 payloads.

Layout::

    {"format": "contrailseg-tensors", "version": 1, "meta": {...},
     "tensors": [{"name": ..., "shape": [...], "dtype": "f32", "offset": 0, "nbytes": ...}]}\\n
    <little-endian float32 payloads, in header order>

Offsets are relative to the first payload byte.
"""

import json
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import numpy as np

from ..errors import FormatError, IntegrityError
from .tensor import Tensor

CONTAINER_FORMAT = "contrailseg-tensors"
CONTAINER_VERSION = 1
_LE_F32 = np.dtype("<f4")

PathLike = Union[str, Path]


def encode_tensors(
    tensors: Mapping[str, Union[np.ndarray, Tensor]], meta: Optional[Dict[str, Any]] = None
) -> bytes:
    entries = []
    payloads = []
    offset = 0
    for name, value in tensors.items():
        array = value.data if isinstance(value, Tensor) else np.asarray(value)
        raw = np.ascontiguousarray(array, dtype=_LE_F32).tobytes()
        entries.append(
            {
                "name": name,
                "shape": [int(d) for d in array.shape],
                "dtype": "f32",
                "offset": offset,
                "nbytes": len(raw),
            }
        )
        payloads.append(raw)
        offset += len(raw)
    header = {
        "format": CONTAINER_FORMAT,
        "version": CONTAINER_VERSION,
        "meta": meta or {},
        "tensors": entries,
    }
    line = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return line + b"\n" + b"".join(payloads)


def _require(obj: Dict[str, Any], key: str, kind: type, pointer: str):
    if key not in obj:
        raise FormatError(f"missing field {key!r}", pointer=f"{pointer}/{key}")
    value = obj[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise FormatError(f"field {key!r} has the wrong type", pointer=f"{pointer}/{key}")
    return value


def decode_tensors(blob: bytes) -> Tuple[Dict[str, np.ndarray], Dict[str, Any]]:
    newline = blob.find(b"\n")
    if newline < 0:
        raise FormatError("container header is not terminated by a newline")
    try:
        header = json.loads(blob[:newline].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"container header is not valid JSON: {exc}") from None
    if not isinstance(header, dict):
        raise FormatError("container header must be a JSON object")
    if header.get("format") != CONTAINER_FORMAT:
        raise FormatError(f"not a {CONTAINER_FORMAT} container", pointer="/format")
    if header.get("version") != CONTAINER_VERSION:
        raise FormatError(
            f"unsupported container version {header.get('version')!r}", pointer="/version"
        )
    meta = header.get("meta", {})
    if not isinstance(meta, dict):
        raise FormatError("field 'meta' must be an object", pointer="/meta")
    entries = _require(header, "tensors", list, "")

    payload = memoryview(blob)[newline + 1 :]
    tensors: Dict[str, np.ndarray] = {}
    for i, entry in enumerate(entries):
        pointer = f"/tensors/{i}"
        if not isinstance(entry, dict):
            raise FormatError("tensor entry must be an object", pointer=pointer)
        name = _require(entry, "name", str, pointer)
        shape = _require(entry, "shape", list, pointer)
        if not all(isinstance(d, int) and not isinstance(d, bool) and d >= 0 for d in shape):
            raise FormatError("shape must list non-negative integers", pointer=f"{pointer}/shape")
        if entry.get("dtype") != "f32":
            raise FormatError(
                f"unsupported dtype {entry.get('dtype')!r}", pointer=f"{pointer}/dtype"
            )
        offset = _require(entry, "offset", int, pointer)
        nbytes = _require(entry, "nbytes", int, pointer)
        expected = int(np.prod(shape, dtype=np.int64)) * 4
        if nbytes != expected:
            raise IntegrityError(
                f"tensor {name!r} declares {nbytes} bytes but shape {shape} needs {expected}"
            )
        if offset < 0 or offset + nbytes > len(payload):
            raise IntegrityError(
                f"tensor {name!r} payload truncated: needs bytes {offset}..{offset + nbytes}, "
                f"container holds {len(payload)}"
            )
        array = np.frombuffer(payload[offset : offset + nbytes], dtype=_LE_F32)
        tensors[name] = array.astype(np.float32).reshape(shape)
    return tensors, meta


def save_tensors(
    path: PathLike,
    tensors: Mapping[str, Union[np.ndarray, Tensor]],
    meta: Optional[Dict[str, Any]] = None,
) -> None:
    Path(path).write_bytes(encode_tensors(tensors, meta))


def load_tensors(path: PathLike) -> Tuple[Dict[str, np.ndarray], Dict[str, Any]]:
    """Read a container written by :func:`save_tensors`.

    Raises:
        FormatError: Malformed header
        IntegrityError: Payload shorter than the header claims
    """
    return decode_tensors(Path(path).read_bytes())
