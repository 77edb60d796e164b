"""Contour extraction, polygon rasterization and point containment.

Regions are 8-connected groups of true pixels. ``find_contours`` traces the
outer boundary of each region (interior holes are absorbed once the contour
is filled); ``fill_contour`` rasterizes a closed integer polyline with the
even-odd rule, counting pixels on the outline itself as inside. Crossing
tests use exact integer arithmetic so extraction followed by filling
reproduces regions without float drift.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from .raster import Contour, as_mask, new_mask

# 8-neighborhood in screen-clockwise order starting East (x right, y down).
_DIRS = (
    (1, 0), (1, 1), (0, 1), (-1, 1),
    (-1, 0), (-1, -1), (0, -1), (1, -1),
)
_DIR_INDEX = {d: i for i, d in enumerate(_DIRS)}
_EIGHT = np.ones((3, 3), dtype=bool)


def _trace_boundary(labels: np.ndarray, lab: int, x0: int, y0: int) -> list[tuple[int, int]]:
    """Moore boundary trace of one labeled component, starting at its
    top-left-most pixel and walking counter-clockwise on screen."""
    h, w = labels.shape

    def fg(x, y):
        return 0 <= x < w and 0 <= y < h and labels[y, x] == lab

    # The start pixel is first in raster order, so its W/NW/N/NE neighbors
    # are background; the radial sweep begins from West.
    backtrack = 4
    verts = [(x0, y0)]
    first_move = None
    cx, cy = x0, y0
    limit = 8 * int(np.count_nonzero(labels == lab)) + 8
    for _ in range(limit):
        found = None
        for step in range(1, 9):
            j = (backtrack - step) % 8
            dx, dy = _DIRS[j]
            if fg(cx + dx, cy + dy):
                found = j
                break
        if found is None:
            return verts  # isolated pixel
        if (cx, cy) == (x0, y0):
            if first_move is None:
                first_move = found
            elif found == first_move:
                return verts  # leaving the start the same way again: closed
        # Background checked just before the hit; it becomes the new backtrack.
        gdx, gdy = _DIRS[(found + 1) % 8]
        gx, gy = cx + gdx, cy + gdy
        cx, cy = cx + _DIRS[found][0], cy + _DIRS[found][1]
        verts.append((cx, cy))
        backtrack = _DIR_INDEX[(gx - cx, gy - cy)]
    raise RuntimeError("boundary trace failed to terminate")


def find_contours(mask: np.ndarray) -> list[Contour]:
    """Outer contour of every 8-connected region, in top-left scan order."""
    mask = as_mask(mask)
    if not mask.any():
        return []
    labels, count = ndimage.label(mask, structure=_EIGHT)
    flat = labels.ravel()
    nz = np.flatnonzero(flat)
    uniq, first_pos = np.unique(flat[nz], return_index=True)
    first_flat = nz[first_pos]
    scan_order = np.argsort(first_flat, kind="stable")
    w = mask.shape[1]
    contours = []
    for cid, k in enumerate(scan_order):
        lab = int(uniq[k])
        y0, x0 = divmod(int(first_flat[k]), w)
        verts = _trace_boundary(labels, lab, x0, y0)
        if len(verts) > 1 and verts[-1] == verts[0]:
            verts = verts[:-1]
        contours.append(Contour(vertices=np.array(verts, dtype=np.int64), id=cid))
    return contours


def _edges(vertices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    v1 = vertices
    v2 = np.roll(vertices, -1, axis=0)
    keep = np.any(v1 != v2, axis=1)
    return v1[keep], v2[keep]


def _edge_lattice_points(v1: np.ndarray, v2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Interior lattice points of edges longer than one pixel step."""
    xs: list[np.ndarray] = []
    ys: list[np.ndarray] = []
    delta = v2 - v1
    for k in range(len(v1)):
        dx = int(delta[k, 0])
        dy = int(delta[k, 1])
        if max(abs(dx), abs(dy)) <= 1:
            continue  # endpoints are vertices, already stamped
        g = math.gcd(abs(dx), abs(dy))
        t = np.arange(1, g)
        if len(t):
            xs.append(v1[k, 0] + t * (dx // g))
            ys.append(v1[k, 1] + t * (dy // g))
    if not xs:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    return np.concatenate(xs), np.concatenate(ys)


def fill_contour(contour: Contour, width: int, height: int) -> np.ndarray:
    """Rasterize the closed polyline: even-odd interior plus outline pixels.

    Vertices may lie outside the image; output is clipped to bounds. Pixels
    exactly on an edge are classified by the outline stamp, never by float
    comparisons.
    """
    out = new_mask(width, height)
    verts = contour.vertices.astype(np.int64)

    def stamp(x, y):
        keep = (x >= 0) & (x < width) & (y >= 0) & (y < height)
        out[y[keep], x[keep]] = True

    stamp(verts[:, 0], verts[:, 1])
    if len(verts) == 1:
        return out
    v1, v2 = _edges(verts)
    if len(v1) == 0:
        return out
    bx, by = _edge_lattice_points(v1, v2)
    stamp(bx, by)

    # Even-odd interior. Each edge spans rows half-open in y (double counts
    # at shared vertices cancel); its crossing with row y sits at the exact
    # fraction x = (x1 * dy + (y - y1) * dx) / dy with dy normalized > 0.
    swap = v1[:, 1] > v2[:, 1]
    a = np.where(swap[:, None], v2, v1)
    b = np.where(swap[:, None], v1, v2)
    dy = b[:, 1] - a[:, 1]
    rising = dy > 0
    a, b, dy = a[rising], b[rising], dy[rising]
    if len(a) == 0:
        return out
    dx = b[:, 0] - a[:, 0]
    row_lo = np.maximum(a[:, 1], 0)
    row_hi = np.minimum(b[:, 1] - 1, height - 1)
    counts = np.maximum(row_hi - row_lo + 1, 0)
    total = int(counts.sum())
    if total == 0:
        return out
    edge_idx = np.repeat(np.arange(len(a)), counts)
    offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    rows = row_lo[edge_idx] + offsets
    num = a[edge_idx, 0] * dy[edge_idx] + (rows - a[edge_idx, 1]) * dx[edge_idx]
    den = dy[edge_idx]
    cross = num / den  # float, only orders crossings within a row
    first_px = -(-num // den)  # exact ceil(num / den)

    order = np.lexsort((cross, rows))
    rows = rows[order]
    first_px = first_px[order]
    row_starts = np.flatnonzero(np.r_[True, rows[1:] != rows[:-1]])
    row_ends = np.r_[row_starts[1:], len(rows)]
    for s, e in zip(row_starts, row_ends):
        y = int(rows[s])
        c = first_px[s:e]
        # Sorted crossings pair up; pixels x with c_even <= x < c_odd are in.
        for i in range(0, len(c) - 1, 2):
            lo = max(int(c[i]), 0)
            hi = min(int(c[i + 1]) - 1, width - 1)
            if lo <= hi:
                out[y, lo : hi + 1] = True
    return out


def point_in_contour(contour: Contour, p) -> bool:
    """True iff p lies inside the filled region or on its outline."""
    px, py = float(p[0]), float(p[1])
    verts = contour.vertices.astype(np.float64)
    if np.any(np.max(np.abs(verts - [px, py]), axis=1) < 1e-9):
        return True
    if len(verts) == 1:
        return False
    v1 = verts
    v2 = np.roll(verts, -1, axis=0)
    ex = v2[:, 0] - v1[:, 0]
    ey = v2[:, 1] - v1[:, 1]
    rx = px - v1[:, 0]
    ry = py - v1[:, 1]
    ln2 = ex * ex + ey * ey
    nz = ln2 > 0
    cross = ex * ry - ey * rx
    dot = ex * rx + ey * ry
    on_edge = nz & (np.abs(cross) <= 1e-9 * np.maximum(1.0, np.sqrt(ln2))) & (dot >= 0) & (dot <= ln2)
    if bool(on_edge.any()):
        return True
    spans = (v1[:, 1] > py) != (v2[:, 1] > py)
    if not spans.any():
        return False
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = v1[spans, 0] + (py - v1[spans, 1]) * ex[spans] / ey[spans]
    return bool(np.count_nonzero(xc > px) % 2 == 1)
