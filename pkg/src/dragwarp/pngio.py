"""PNG and base64 codecs bridging numpy rasters and the wire formats.

Masks travel as single-channel PNGs where values above 127 mean "inside";
images travel as RGB PNGs. Encoding goes through one code path so the CLI
and the service emit byte-identical artifacts for identical pixels.
"""
from __future__ import annotations

import base64
import io

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import InvalidInputError
from .raster import MAX_SIDE, as_image, as_mask

Image.MAX_IMAGE_PIXELS = MAX_SIDE * MAX_SIDE


def decode_image_png(data: bytes) -> np.ndarray:
    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            rgb = im.convert("RGB")
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise InvalidInputError(f"could not decode image: {exc}") from exc
    arr = np.asarray(rgb, dtype=np.uint8)
    return as_image(arr)


def encode_image_png(image: np.ndarray) -> bytes:
    image = as_image(image)
    buf = io.BytesIO()
    Image.fromarray(image, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def decode_mask_png(data: bytes) -> np.ndarray:
    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            gray = im.convert("L")
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise InvalidInputError(f"could not decode mask: {exc}") from exc
    arr = np.asarray(gray, dtype=np.uint8)
    return as_mask(arr > 127)


def encode_mask_png(mask: np.ndarray) -> bytes:
    mask = as_mask(mask)
    buf = io.BytesIO()
    Image.fromarray(mask.astype(np.uint8) * 255, mode="L").save(buf, format="PNG")
    return buf.getvalue()


def to_b64(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


def from_b64(text: str) -> bytes:
    try:
        return base64.b64decode(text, validate=True)
    except (ValueError, TypeError) as exc:
        raise InvalidInputError(f"invalid base64 payload: {exc}") from exc


def resize_long_edge(image: np.ndarray, target: int) -> np.ndarray:
    """Scale so the longer side equals ``target``, keeping aspect ratio.

    ``target`` of 0 disables resizing; images already at or below the target
    are scaled too (the service treats the target as the working size).
    """
    image = as_image(image)
    if target < 0:
        raise InvalidInputError("resize target must be >= 0")
    if target == 0:
        return image
    h, w = image.shape[:2]
    long_edge = max(w, h)
    if long_edge == target:
        return image
    scale = target / long_edge
    nw = max(1, round(w * scale))
    nh = max(1, round(h * scale))
    pil = Image.fromarray(image, mode="RGB").resize((nw, nh), Image.LANCZOS)
    return np.asarray(pil, dtype=np.uint8)
