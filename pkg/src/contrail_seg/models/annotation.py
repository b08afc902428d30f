"""Polygon annotation models."""

from dataclasses import dataclass, field
from typing import List, Tuple

from ..errors import AnnotationError

Point = Tuple[float, float]
Ring = List[Point]


@dataclass
class PolygonAnnotation:
    """Everything one annotator drew on one frame."""

    annotator_id: int
    polygons: List[Ring] = field(default_factory=list)

    def __post_init__(self):
        for index, ring in enumerate(self.polygons):
            if len(ring) < 3:
                raise AnnotationError(
                    f"annotator {self.annotator_id} ring {index} has {len(ring)} vertices, "
                    "at least 3 are required"
                )


@dataclass
class AnnotationSet:
    """All annotators' polygons for one sample frame."""

    sample_id: str
    height: int
    width: int
    annotations: List[PolygonAnnotation] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for annotation in self.annotations:
            if annotation.annotator_id in seen:
                raise AnnotationError(
                    f"sample {self.sample_id}: duplicate annotator id {annotation.annotator_id}"
                )
            seen.add(annotation.annotator_id)
            for ring in annotation.polygons:
                for x, y in ring:
                    if not (-1 <= x <= self.width + 1 and -1 <= y <= self.height + 1):
                        raise AnnotationError(
                            f"sample {self.sample_id}: vertex ({x}, {y}) of annotator "
                            f"{annotation.annotator_id} lies outside the "
                            f"{self.width}x{self.height} frame"
                        )

    @property
    def annotator_count(self) -> int:
        return len(self.annotations)
