import json

import numpy as np
import pytest

from contrail_seg.autograd.container import (
    decode_tensors,
    encode_tensors,
    load_tensors,
    save_tensors,
)
from contrail_seg.errors import FormatError, IntegrityError


def test_container_round_trip_keeps_values_shapes_and_meta(tmp_path):
    weights = np.arange(24, dtype=np.float32).reshape(2, 3, 4) / 7.0
    path = tmp_path / "weights.ten"

    save_tensors(path, {"w": weights, "b": np.zeros(3)}, meta={"epoch": 3})
    tensors, meta = load_tensors(path)

    assert list(tensors) == ["w", "b"]
    np.testing.assert_array_equal(tensors["w"], weights)
    assert tensors["b"].dtype == np.float32
    assert meta == {"epoch": 3}


def test_header_is_one_json_line_with_offsets():
    blob = encode_tensors({"a": np.ones(2), "b": np.ones((1, 3))})
    header = json.loads(blob.split(b"\n", 1)[0])

    assert header["format"] == "contrailseg-tensors"
    assert [(t["name"], t["offset"], t["nbytes"]) for t in header["tensors"]] == [
        ("a", 0, 8),
        ("b", 8, 12),
    ]
    assert len(blob.split(b"\n", 1)[1]) == 20


def test_encoding_is_byte_identical_for_identical_input():
    tensors = {"x": np.linspace(0, 1, 10, dtype=np.float32)}

    assert encode_tensors(tensors, {"k": 1}) == encode_tensors(tensors, {"k": 1})


def test_truncated_payload_raises_integrity_error():
    blob = encode_tensors({"x": np.ones(16)})

    with pytest.raises(IntegrityError, match="truncated"):
        decode_tensors(blob[:-4])


def test_foreign_header_raises_format_error_with_pointer():
    blob = json.dumps({"format": "npz", "version": 1, "tensors": []}).encode() + b"\n"

    with pytest.raises(FormatError) as excinfo:
        decode_tensors(blob)

    assert excinfo.value.pointer == "/format"
    assert "pointer=/format" in excinfo.value.one_line()


def test_missing_tensor_field_points_at_the_entry():
    header = {"format": "contrailseg-tensors", "version": 1, "tensors": [{"name": "x"}]}
    blob = json.dumps(header).encode() + b"\n"

    with pytest.raises(FormatError) as excinfo:
        decode_tensors(blob)

    assert excinfo.value.pointer == "/tensors/0/shape"
