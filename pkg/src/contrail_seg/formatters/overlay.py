"""PNG overlays: the image in grayscale with prediction and label boundaries on top."""

from pathlib import Path
from typing import Optional, Union

import numpy as np
from PIL import Image
from skimage.segmentation import find_boundaries

from ..errors import DimensionError

PREDICTION_COLOR = (255, 0, 0)
LABEL_COLOR = (0, 255, 0)


def _grayscale(image: np.ndarray) -> np.ndarray:
    plane = np.asarray(image, dtype=np.float64)
    if plane.ndim == 3:
        plane = plane[0]
    low, high = float(plane.min()), float(plane.max())
    if high > low:
        plane = (plane - low) / (high - low)
    else:
        plane = np.zeros_like(plane)
    return np.round(plane * 255.0).astype(np.uint8)


def render_overlay(
    image: np.ndarray,
    prediction: np.ndarray,
    label: Optional[np.ndarray] = None,
    scale: int = 4,
) -> Image.Image:
    """Build the overlay as an RGB image, upscaled by ``scale`` with nearest neighbour.

    The label boundary is drawn first, so the prediction wins where both coincide.
    """
    gray = _grayscale(image)
    if prediction.shape != gray.shape or (label is not None and label.shape != gray.shape):
        raise DimensionError(
            f"overlay: image {gray.shape}, prediction {prediction.shape} and label "
            f"{None if label is None else label.shape} must share H x W"
        )
    rgb = np.repeat(gray[:, :, None], 3, axis=2)
    if label is not None:
        rgb[find_boundaries(label.astype(bool), mode="inner")] = LABEL_COLOR
    rgb[find_boundaries(prediction.astype(bool), mode="inner")] = PREDICTION_COLOR
    if scale > 1:
        rgb = np.repeat(np.repeat(rgb, scale, axis=0), scale, axis=1)
    return Image.fromarray(rgb)


def save_overlay(
    path: Union[str, Path],
    image: np.ndarray,
    prediction: np.ndarray,
    label: Optional[np.ndarray] = None,
    scale: int = 4,
) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    render_overlay(image, prediction, label, scale).save(target, format="PNG", optimize=False)
    return target
