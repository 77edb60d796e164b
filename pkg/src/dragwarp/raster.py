"""Raster primitives shared across the deformation pipeline.

Images are H x W x 3 uint8 arrays and masks are H x W bool arrays, both
indexed ``[y, x]``. The origin is the top-left corner, x grows right,
y grows down, and pixel centers sit on integer coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

MAX_SIDE = 16384


def as_image(arr) -> np.ndarray:
    """Validate and return an H x W x 3 uint8 image array."""
    a = np.asarray(arr)
    if a.ndim != 3 or a.shape[2] != 3:
        raise InvalidInputError(f"image must be H x W x 3, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise InvalidInputError("image must be at least 1 x 1")
    if a.shape[0] > MAX_SIDE or a.shape[1] > MAX_SIDE:
        raise InvalidInputError(f"image sides must not exceed {MAX_SIDE} pixels")
    if a.dtype != np.uint8:
        raise InvalidInputError(f"image dtype must be uint8, got {a.dtype}")
    return a


def as_mask(arr) -> np.ndarray:
    """Validate and return an H x W bool mask array."""
    a = np.asarray(arr)
    if a.ndim != 2:
        raise InvalidInputError(f"mask must be 2-D, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise InvalidInputError("mask must be at least 1 x 1")
    if a.dtype != np.bool_:
        if a.dtype.kind not in "biu":
            raise InvalidInputError(f"mask dtype must be boolean or integer, got {a.dtype}")
        a = a.astype(bool)
    return a


def check_same_shape(image: np.ndarray, mask: np.ndarray) -> None:
    if image.shape[:2] != mask.shape:
        raise InvalidInputError(
            f"mask shape {mask.shape} does not match image shape {image.shape[:2]}"
        )


def new_mask(width: int, height: int) -> np.ndarray:
    return np.zeros((height, width), dtype=bool)


def round_half_up(a):
    """Round to nearest integer with ties going toward +infinity.

    Used everywhere sub-pixel coordinates or interpolated intensities are
    quantized, so the whole pipeline shares one deterministic rounding rule.
    """
    return np.floor(np.asarray(a, dtype=np.float64) + 0.5)


@dataclass
class Contour:
    """Closed polyline tracing one connected mask region.

    ``vertices`` is an (N, 2) int array of (x, y) pixel coordinates in trace
    order; the polyline is implicitly closed (last vertex connects back to
    the first). ``id`` is the stable extraction index.
    """

    vertices: np.ndarray
    id: int = 0

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 1:
            raise InvalidInputError(f"contour vertices must be (N>=1, 2), got {v.shape}")
        self.vertices = v

    def __len__(self) -> int:
        return len(self.vertices)


def signed_area(vertices: np.ndarray) -> float:
    """Shoelace area of a closed polyline in raw (x, y-down) coordinates.

    With the top-left origin, a loop that runs counter-clockwise on screen
    has non-positive signed area under this formula.
    """
    v = np.asarray(vertices, dtype=np.float64)
    if len(v) < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def bilinear_sample_many(image: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Bilinearly sample ``image`` at an (N, 2) array of (x, y) positions.

    Coordinates are clamped to the valid sampling rectangle
    [0, W-1] x [0, H-1]; integer positions return the pixel exactly.
    Returns (N, 3) uint8 with round-half-up quantization.
    """
    image = as_image(image)
    h, w = image.shape[:2]
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    x = np.clip(pts[:, 0], 0.0, float(w - 1))
    y = np.clip(pts[:, 1], 0.0, float(h - 1))
    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    x0 = np.minimum(x0, w - 2) if w > 1 else np.zeros_like(x0)
    y0 = np.minimum(y0, h - 2) if h > 1 else np.zeros_like(y0)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    # float32 accumulation: products of 8-bit values and unit weights stay
    # well inside the 24-bit mantissa; integer coordinates remain exact.
    fx = (x - x0)[:, None].astype(np.float32)
    fy = (y - y0)[:, None].astype(np.float32)
    w00 = (1.0 - fx) * (1.0 - fy)
    w10 = fx * (1.0 - fy)
    w01 = (1.0 - fx) * fy
    w11 = fx * fy
    v = image[y0, x0] * w00
    v += image[y0, x1] * w10
    v += image[y1, x0] * w01
    v += image[y1, x1] * w11
    v += 0.5
    np.floor(v, out=v)
    np.clip(v, 0, 255, out=v)
    return v.astype(np.uint8)


def bilinear_sample(image: np.ndarray, p) -> tuple[int, int, int]:
    """Sample one RGB value at sub-pixel position ``p`` = (x, y)."""
    rgb = bilinear_sample_many(image, np.asarray(p, dtype=np.float64).reshape(1, 2))[0]
    return int(rgb[0]), int(rgb[1]), int(rgb[2])
