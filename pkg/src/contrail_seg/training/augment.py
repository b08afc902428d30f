"""Paired geometric augmentation of an image and its (soft) mask."""

import math
from typing import Tuple

import numpy as np
from skimage import transform

from ..errors import DimensionError
from ..models.training import AugmentConfig


def centred_affine(
    h: int, w: int, angle: float, scale: float = 1.0, shift: Tuple[float, float] = (0.0, 0.0)
) -> transform.AffineTransform:
    """Rotate (radians) and scale about the centre pixel of an h x w grid, then shift (x, y)."""
    # warp puts pixel centres on integer coordinates 0 .. n - 1
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    to_origin = transform.AffineTransform(translation=(-cx, -cy))
    rotate_scale = transform.AffineTransform(scale=(scale, scale), rotation=angle)
    back = transform.AffineTransform(translation=(cx + shift[0], cy + shift[1]))
    return transform.AffineTransform(matrix=back.params @ rotate_scale.params @ to_origin.params)


def _affine(rng: np.random.Generator, cfg: AugmentConfig, h: int, w: int):
    shift_x = rng.uniform(-cfg.shift_limit, cfg.shift_limit) * w
    shift_y = rng.uniform(-cfg.shift_limit, cfg.shift_limit) * h
    scale = rng.uniform(1.0 - cfg.scale_limit, 1.0 + cfg.scale_limit)
    angle = math.radians(rng.uniform(-cfg.rotate_limit_deg, cfg.rotate_limit_deg))
    return centred_affine(h, w, angle, scale, (shift_x, shift_y))


def warp_plane(plane: np.ndarray, tform: transform.AffineTransform) -> np.ndarray:
    return transform.warp(
        plane, tform.inverse, order=1, mode="constant", cval=0.0, preserve_range=True
    )


def augment(
    image: np.ndarray,
    mask: np.ndarray,
    cfg: AugmentConfig,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray]:
    """Apply one random shift/scale/rotate, rot90 and hflip to both arrays.

    Args:
        image: C x H x W image
        mask: H x W mask, soft values allowed
        cfg: Probabilities and limits
        rng: Source of every random draw; the same state gives the same output

    Returns:
        (image, mask) as float32, transformed with identical parameters
    """
    image = np.asarray(image, dtype=np.float32)
    mask = np.asarray(mask, dtype=np.float32)
    if image.ndim != 3 or mask.ndim != 2 or image.shape[1:] != mask.shape:
        raise DimensionError(
            f"augment expects C x H x W image and H x W mask, got {image.shape} and {mask.shape}"
        )
    h, w = mask.shape

    if rng.random() < cfg.shift_scale_rotate_p:
        tform = _affine(rng, cfg, h, w)
        image = np.stack([warp_plane(c, tform) for c in image])
        mask = warp_plane(mask, tform)
    if rng.random() < cfg.rot90_p:
        turns = int(rng.integers(1, 4))
        image = np.rot90(image, turns, axes=(1, 2))
        mask = np.rot90(mask, turns)
    if rng.random() < cfg.hflip_p:
        image = image[:, :, ::-1]
        mask = mask[:, ::-1]

    image = np.ascontiguousarray(image, dtype=np.float32)
    mask = np.ascontiguousarray(mask, dtype=np.float32)
    return image, mask
