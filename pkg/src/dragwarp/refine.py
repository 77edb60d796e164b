"""Optional mask boundary refinement via an external point-prompted segmenter.

The user's rough mask is summarized as a sparse grid of prompt points, an
external segmentation service predicts a crisp object mask from them, and
the prediction is then sandwiched between an eroded and a dilated copy of
the user mask so it can sharpen boundaries but never escape the user's
intent band. Segmenter failures always degrade to returning the user mask
unchanged; refinement must never block the editing loop.
"""
from __future__ import annotations

import base64
import logging
from dataclasses import dataclass
from typing import Protocol

import httpx
import numpy as np

from .errors import InvalidInputError, SegmenterError
from .morphology import dilate, erode
from .raster import as_image, as_mask, check_same_shape

log = logging.getLogger(__name__)

POINT_CAP = 128


@dataclass(frozen=True)
class RefineConfig:
    r1: float = 10.0
    point_cap: int = POINT_CAP

    def __post_init__(self):
        if self.r1 < 0:
            raise InvalidInputError("r1 must be >= 0")
        if self.point_cap < 1:
            raise InvalidInputError("point_cap must be >= 1")


class Segmenter(Protocol):
    """Anything that maps (image, positive prompt points) to a mask."""

    def predict(self, image: np.ndarray, points: list[tuple[float, float]]) -> np.ndarray: ...


def sample_grid_points(mask: np.ndarray, cap: int = POINT_CAP) -> list[tuple[int, int]]:
    """Uniform grid of prompt points over the mask's bounding box.

    The pitch is the smallest integer >= 1 that keeps at most ``cap`` points
    landing on true pixels. A non-empty mask always yields at least one
    point: if the grid misses entirely, the first true pixel in scan order
    is used.
    """
    if cap < 1:
        raise InvalidInputError("cap must be >= 1")
    mask = as_mask(mask)
    ys, xs = np.nonzero(mask)
    if len(xs) == 0:
        return []
    x0, x1 = int(xs.min()), int(xs.max())
    y0, y1 = int(ys.min()), int(ys.max())
    pitch = 1
    while True:
        gx = np.arange(x0, x1 + 1, pitch)
        gy = np.arange(y0, y1 + 1, pitch)
        yy, xx = np.meshgrid(gy, gx, indexing="ij")
        inside = mask[yy, xx]
        if int(inside.sum()) <= cap:
            pts = [(int(x), int(y)) for x, y in zip(xx[inside], yy[inside])]
            if not pts:
                pts = [(int(xs[0]), int(ys[0]))]
            return pts
        pitch += 1


def refine_mask(user_mask: np.ndarray, predicted_mask: np.ndarray, r1: float = 10.0) -> np.ndarray:
    """Constrain a predicted mask to the band around the user mask.

    The result is (predicted AND dilate(user, r1)) OR erode(user, r1): the
    prediction may adjust boundaries within radius r1 but the eroded core is
    always kept and nothing survives beyond the dilated envelope.
    """
    user_mask = as_mask(user_mask)
    predicted_mask = as_mask(predicted_mask)
    if user_mask.shape != predicted_mask.shape:
        raise InvalidInputError("user and predicted masks must share dimensions")
    return (predicted_mask & dilate(user_mask, r1)) | erode(user_mask, r1)


def refine(
    image: np.ndarray,
    user_mask: np.ndarray,
    segmenter: Segmenter | None,
    config: RefineConfig = RefineConfig(),
) -> tuple[np.ndarray, list[str]]:
    """End-to-end refinement; returns (mask, warnings).

    Any segmenter problem (unconfigured, transport failure, wrong output
    shape) returns the user mask untouched with a warning describing why.
    """
    image = as_image(image)
    user_mask = as_mask(user_mask)
    check_same_shape(image, user_mask)
    warnings: list[str] = []
    if segmenter is None:
        return user_mask.copy(), ["no segmenter configured; mask passed through"]
    points = sample_grid_points(user_mask, config.point_cap)
    if not points:
        return user_mask.copy(), ["mask is empty; nothing to refine"]
    try:
        predicted = segmenter.predict(image, points)
        predicted = as_mask(predicted)
        if predicted.shape != user_mask.shape:
            raise SegmenterError(
                f"segmenter returned shape {predicted.shape}, expected {user_mask.shape}"
            )
    except Exception as exc:  # refinement is optional; never hard-fail
        msg = f"segmenter failed ({exc}); mask passed through"
        log.warning(msg)
        return user_mask.copy(), [msg]
    return refine_mask(user_mask, predicted, config.r1), warnings


class RemoteSegmenter:
    """HTTP client for the point-prompt segmentation protocol.

    Request: {"image": <PNG b64>, "points": [[x, y], ...]}.
    Response: {"mask": <PNG b64>} single channel, >127 means foreground.
    """

    def __init__(self, url: str, deadline: float = 5.0, transport: httpx.BaseTransport | None = None):
        self.url = url
        self.deadline = deadline
        self._client = httpx.Client(timeout=deadline, transport=transport)

    def predict(self, image: np.ndarray, points: list[tuple[float, float]]) -> np.ndarray:
        from .pngio import decode_mask_png, encode_image_png

        payload = {
            "image": base64.b64encode(encode_image_png(image)).decode("ascii"),
            "points": [[float(x), float(y)] for x, y in points],
        }
        try:
            resp = self._client.post(self.url, json=payload)
            resp.raise_for_status()
            body = resp.json()
            return decode_mask_png(base64.b64decode(body["mask"]))
        except (httpx.HTTPError, KeyError, ValueError) as exc:
            raise SegmenterError(f"segmenter request to {self.url} failed: {exc}") from exc


class EchoSegmenter:
    """Test double that predicts a fixed mask (typically the user's own)."""

    def __init__(self, mask: np.ndarray):
        self._mask = as_mask(mask)

    def predict(self, image, points):
        return self._mask.copy()


class DilateSegmenter:
    """Test double that predicts a dilated version of a fixed mask."""

    def __init__(self, mask: np.ndarray, grow_by: float):
        self._mask = as_mask(mask)
        self._grow_by = grow_by

    def predict(self, image, points):
        return dilate(self._mask, self._grow_by)
