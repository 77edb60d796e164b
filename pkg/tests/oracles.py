"""Brute-force reference implementations used only as test oracles.

Everything here favors obviousness over speed: explicit loops, exact
rational arithmetic where geometry is involved, no shared code with the
library's fast paths.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy import ndimage


def disc(radius):
    r = int(math.floor(radius))
    return [
        (i, j)
        for i in range(-r, r + 1)
        for j in range(-r, r + 1)
        if i * i + j * j <= radius * radius
    ]


def brute_dilate(mask, radius):
    h, w = mask.shape
    offs = disc(radius)
    out = np.zeros_like(mask, dtype=bool)
    for y in range(h):
        for x in range(w):
            hit = False
            for dy, dx in offs:
                yy, xx = y + dy, x + dx
                if 0 <= yy < h and 0 <= xx < w and mask[yy, xx]:
                    hit = True
                    break
            out[y, x] = hit
    return out


def brute_erode(mask, radius):
    h, w = mask.shape
    offs = disc(radius)
    out = np.zeros_like(mask, dtype=bool)
    for y in range(h):
        for x in range(w):
            keep = True
            for dy, dx in offs:
                yy, xx = y + dy, x + dx
                if not (0 <= yy < h and 0 <= xx < w) or not mask[yy, xx]:
                    keep = False
                    break
            out[y, x] = keep
    return out


def brute_boundary(mask):
    h, w = mask.shape
    out = np.zeros_like(mask, dtype=bool)
    for y in range(h):
        for x in range(w):
            if not mask[y, x]:
                continue
            exposed = False
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    if dy == 0 and dx == 0:
                        continue
                    yy, xx = y + dy, x + dx
                    if not (0 <= yy < h and 0 <= xx < w) or not mask[yy, xx]:
                        exposed = True
            out[y, x] = exposed
    return out


def on_segment(x1, y1, x2, y2, px, py):
    """Exact test for integer point (px, py) on integer segment."""
    cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
    if cross != 0:
        return False
    dot = (x2 - x1) * (px - x1) + (y2 - y1) * (py - y1)
    length2 = (x2 - x1) ** 2 + (y2 - y1) ** 2
    if length2 == 0:
        return px == x1 and py == y1
    return 0 <= dot <= length2


def ray_cast_inside(vertices, px, py):
    """Even-odd membership of integer pixel (px, py), outline included.

    Crossings at row py use exact rational x positions; a pixel counts as
    inside when the number of crossings strictly to its right is odd.
    """
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        if on_segment(x1, y1, x2, y2, px, py):
            return True
    if n < 3:
        return False
    count = 0
    for i in range(n):
        x1, y1 = int(vertices[i][0]), int(vertices[i][1])
        x2, y2 = int(vertices[(i + 1) % n][0]), int(vertices[(i + 1) % n][1])
        if y1 == y2:
            continue
        if min(y1, y2) <= py < max(y1, y2):
            xc = Fraction(x1) + Fraction(py - y1, y2 - y1) * (x2 - x1)
            if xc > px:
                count += 1
    return count % 2 == 1


def brute_fill(vertices, width, height):
    out = np.zeros((height, width), dtype=bool)
    for y in range(height):
        for x in range(width):
            out[y, x] = ray_cast_inside(vertices, x, y)
    return out


def hole_filled(mask):
    """Mask with enclosed background absorbed (4-connected background)."""
    return ndimage.binary_fill_holes(mask)


def float_bilinear(image, x, y):
    """Independent double-precision bilinear interpolation, unquantized."""
    h, w = image.shape[:2]
    x = min(max(x, 0.0), w - 1.0)
    y = min(max(y, 0.0), h - 1.0)
    x0 = min(int(math.floor(x)), w - 2) if w > 1 else 0
    y0 = min(int(math.floor(y)), h - 2) if h > 1 else 0
    x1 = min(x0 + 1, w - 1)
    y1 = min(y0 + 1, h - 1)
    fx = x - x0
    fy = y - y0
    out = []
    for c in range(image.shape[2]):
        v = (
            float(image[y0, x0, c]) * (1 - fx) * (1 - fy)
            + float(image[y0, x1, c]) * fx * (1 - fy)
            + float(image[y1, x0, c]) * (1 - fx) * fy
            + float(image[y1, x1, c]) * fx * fy
        )
        out.append(v)
    return out


def brute_inpaint_mask(original, warped, r2):
    """Vacated-region/boundary-band mask computed pixel by pixel."""
    temp = original & ~warped
    return brute_dilate(temp | brute_boundary(warped), r2)


def make_blob_mask(rng, width, height, max_blobs=3):
    """Union of a few random filled ellipses; always non-empty."""
    mask = np.zeros((height, width), dtype=bool)
    yy, xx = np.mgrid[0:height, 0:width]
    for _ in range(int(rng.integers(1, max_blobs + 1))):
        cx = rng.uniform(0, width - 1)
        cy = rng.uniform(0, height - 1)
        rx = rng.uniform(2, max(3.0, width / 4))
        ry = rng.uniform(2, max(3.0, height / 4))
        mask |= ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 <= 1.0
    if not mask.any():
        mask[int(rng.integers(0, height)), int(rng.integers(0, width))] = True
    return mask


def make_random_image(rng, width, height):
    return rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8)
