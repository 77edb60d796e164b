"""Shared bits for the demo scripts: a synthetic scene and output paths."""
from pathlib import Path

import numpy as np


def out_dir(name):
    path = Path(__file__).parent / "out" / name
    path.mkdir(parents=True, exist_ok=True)
    return path


def checker_scene(width=160, height=120):
    """A checkerboard backdrop with a colored blob to drag around."""
    yy, xx = np.mgrid[0:height, 0:width]
    img = np.where(((xx // 10 + yy // 10) % 2)[..., None], 190, 230).astype(np.uint8)
    img = np.repeat(img, 3, axis=2) if img.shape[2] == 1 else img
    blob = (xx - 55.0) ** 2 / 400 + (yy - 60.0) ** 2 / 250 <= 1.0
    img[blob] = [200, 80, 60]
    inner = (xx - 55.0) ** 2 / 120 + (yy - 60.0) ** 2 / 80 <= 1.0
    img[inner] = [240, 180, 60]
    return img, blob


def overlay_mask(image, mask, color=(255, 0, 0), alpha=0.45):
    """Tint masked pixels for visualization."""
    out = image.astype(np.float64).copy()
    out[mask] = (1 - alpha) * out[mask] + alpha * np.array(color, dtype=np.float64)
    return np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)
