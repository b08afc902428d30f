"""JSON (de)serialisation of annotation sets.

Schema::

    {"sample_id": str, "height": int, "width": int,
     "annotators": [{"id": int, "polygons": [[[x, y], ...], ...]}, ...]}
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Union

from ..errors import AnnotationError, FormatError
from ..models.annotation import AnnotationSet, PolygonAnnotation, Ring


def _field(doc: Dict[str, Any], key: str, kinds, pointer: str):
    if key not in doc:
        raise FormatError(f"missing field {key!r}", pointer=f"{pointer}/{key}")
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, kinds):
        raise FormatError(f"field {key!r} has the wrong type", pointer=f"{pointer}/{key}")
    return value


def _number(value: Any, pointer: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError("coordinate must be a number", pointer=pointer)
    return float(value)


def parse_ring(ring: Any, pointer: str) -> Ring:
    """Validate a list of [x, y] vertices; errors point at the offending vertex."""
    if not isinstance(ring, list):
        raise FormatError("polygon must be a list of [x, y] vertices", pointer=pointer)
    points = []
    for v, vertex in enumerate(ring):
        v_ptr = f"{pointer}/{v}"
        if not isinstance(vertex, (list, tuple)) or len(vertex) != 2:
            raise FormatError("vertex must be [x, y]", pointer=v_ptr)
        points.append((_number(vertex[0], f"{v_ptr}/0"), _number(vertex[1], f"{v_ptr}/1")))
    return points


def parse_annotation_set(
    doc: Any, pointer: str = "", min_annotators: int = 1
) -> AnnotationSet:
    """Validate one annotation document and build the model.

    Raises:
        FormatError: Schema violation, with a JSON pointer to the field
        AnnotationError: Fewer than ``min_annotators`` annotators, duplicate ids or bad rings
    """
    if not isinstance(doc, dict):
        raise FormatError("annotation set must be an object", pointer=pointer or "/")
    sample_id = _field(doc, "sample_id", str, pointer)
    height = _field(doc, "height", int, pointer)
    width = _field(doc, "width", int, pointer)
    if height < 1 or width < 1:
        raise FormatError("height and width must be positive", pointer=f"{pointer}/height")
    annotators = _field(doc, "annotators", list, pointer)

    annotations: List[PolygonAnnotation] = []
    for a, entry in enumerate(annotators):
        a_ptr = f"{pointer}/annotators/{a}"
        if not isinstance(entry, dict):
            raise FormatError("annotator entry must be an object", pointer=a_ptr)
        annotator_id = _field(entry, "id", int, a_ptr)
        rings = []
        for r, ring in enumerate(_field(entry, "polygons", list, a_ptr)):
            r_ptr = f"{a_ptr}/polygons/{r}"
            rings.append(parse_ring(ring, r_ptr))
        annotations.append(PolygonAnnotation(annotator_id=annotator_id, polygons=rings))

    if len(annotations) < min_annotators:
        raise AnnotationError(
            f"sample {sample_id} has {len(annotations)} annotators, at least {min_annotators} "
            "are required"
        )
    return AnnotationSet(sample_id=sample_id, height=height, width=width, annotations=annotations)


def annotation_set_to_dict(aset: AnnotationSet) -> Dict[str, Any]:
    return {
        "sample_id": aset.sample_id,
        "height": aset.height,
        "width": aset.width,
        "annotators": [
            {
                "id": a.annotator_id,
                "polygons": [[[x, y] for x, y in ring] for ring in a.polygons],
            }
            for a in aset.annotations
        ],
    }


def load_annotation_set(path: Union[str, Path], min_annotators: int = 1) -> AnnotationSet:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc}") from None
    return parse_annotation_set(doc, min_annotators=min_annotators)


def dump_annotation_set(aset: AnnotationSet, path: Union[str, Path]) -> None:
    Path(path).write_text(
        json.dumps(annotation_set_to_dict(aset), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
