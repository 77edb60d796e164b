"""Bidirectional region warping driven by handle/target control points.

The deformation model treats each masked region as an elastic sheet: every
pixel moves by an inverse-distance-weighted blend of the control point
displacements. Forward warping alone leaves holes wherever the stretched
pixel grid becomes discontinuous, so a second backward pass interpolates a
source position for every uncovered pixel inside the transformed contour,
yielding a dense, gap-free correspondence map.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .contours import fill_contour, find_contours, point_in_contour
from .errors import InvalidInputError
from .morphology import boundary, dilate
from .raster import (
    Contour,
    as_image,
    as_mask,
    bilinear_sample_many,
    check_same_shape,
    new_mask,
    round_half_up,
)

FORWARD = 0
BACKWARD = 1

_ORIGIN_NAMES = {FORWARD: "forward", BACKWARD: "backward"}


@dataclass(frozen=True)
class WarpConfig:
    """Tunables for the warp pass.

    epsilon stabilizes the inverse-distance weights, n_neighbors is the
    number of matched anchors consulted per backward-filled pixel, and r2 is
    the dilation radius of the inpainting buffer zone.
    """

    epsilon: float = 1e-6
    n_neighbors: int = 4
    r2: int = 5

    def __post_init__(self):
        if self.epsilon <= 0:
            raise InvalidInputError("epsilon must be > 0")
        if self.n_neighbors < 1:
            raise InvalidInputError("n_neighbors must be >= 1")
        if self.r2 < 0:
            raise InvalidInputError("r2 must be >= 0")


@dataclass(frozen=True)
class ControlPair:
    """One drag gesture: a handle point and where it should end up."""

    handle: tuple[float, float]
    target: tuple[float, float]

    def __post_init__(self):
        for name, pt in (("handle", self.handle), ("target", self.target)):
            if len(pt) != 2 or not all(np.isfinite(c) for c in pt):
                raise InvalidInputError(f"{name} must be a finite (x, y) point")
        object.__setattr__(self, "handle", (float(self.handle[0]), float(self.handle[1])))
        object.__setattr__(self, "target", (float(self.target[0]), float(self.target[1])))


@dataclass
class RegionBinding:
    """A contour, the control pairs whose handles fall inside it, and the
    rasterized interior those pairs will move."""

    contour: Contour
    pairs: list[ControlPair]
    region_pixels: np.ndarray


@dataclass
class PixelMap:
    """Validated source->target correspondences.

    ``sources`` is (N, 2) float64 sub-pixel (x, y); ``targets`` is (N, 2)
    int64 pixel (x, y) with every target unique; ``origins`` tags each entry
    FORWARD or BACKWARD.
    """

    sources: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), np.float64))
    targets: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), np.int64))
    origins: np.ndarray = field(default_factory=lambda: np.zeros(0, np.uint8))

    def __len__(self) -> int:
        return len(self.targets)

    def to_entries(self) -> list[dict]:
        return [
            {
                "source": [float(sx), float(sy)],
                "target": [int(tx), int(ty)],
                "origin": _ORIGIN_NAMES[int(o)],
            }
            for (sx, sy), (tx, ty), o in zip(self.sources, self.targets, self.origins)
        ]

    @staticmethod
    def concatenate(maps: list["PixelMap"]) -> "PixelMap":
        if not maps:
            return PixelMap()
        return PixelMap(
            sources=np.concatenate([m.sources for m in maps]),
            targets=np.concatenate([m.targets for m in maps]),
            origins=np.concatenate([m.origins for m in maps]),
        )


@dataclass
class WarpOutput:
    """Everything the preview and the inpainting stage need."""

    warped: np.ndarray
    warped_mask: np.ndarray
    inpaint_mask: np.ndarray
    map: PixelMap
    rejected_pairs: list[ControlPair] = field(default_factory=list)


def idw_weights(p, anchors, epsilon: float = 1e-6) -> np.ndarray:
    """Normalized inverse-distance weights of ``p`` against ``anchors``.

    w_i = (1 / (|p - a_i| + eps)) / sum_j (1 / (|p - a_j| + eps)); the
    weights are positive and sum to 1.
    """
    a = np.asarray(anchors, dtype=np.float64).reshape(-1, 2)
    if len(a) == 0:
        raise InvalidInputError("anchors must be non-empty")
    if epsilon <= 0:
        raise InvalidInputError("epsilon must be > 0")
    px, py = float(p[0]), float(p[1])
    d = np.hypot(a[:, 0] - px, a[:, 1] - py)
    inv = 1.0 / (d + epsilon)
    return inv / inv.sum()


def associate_control_points(
    contours: list[Contour],
    pairs: list[ControlPair],
    width: int,
    height: int,
) -> tuple[list[RegionBinding], list[ControlPair]]:
    """Bind each pair to the first contour containing its handle.

    Every contour yields a binding (possibly with no pairs); pairs whose
    handle lies in no contour are returned as rejected rather than raising,
    since a stray arrow is user input to warn about, not a failure.
    """
    bindings = [
        RegionBinding(
            contour=c,
            pairs=[],
            region_pixels=fill_contour(c, width, height),
        )
        for c in contours
    ]
    rejected: list[ControlPair] = []
    for pair in pairs:
        for b in bindings:
            if point_in_contour(b.contour, pair.handle):
                b.pairs.append(pair)
                break
        else:
            rejected.append(pair)
    return bindings, rejected


def _displacements(points: np.ndarray, pairs: list[ControlPair], epsilon: float) -> np.ndarray:
    """IDW-blended displacement for each (x, y) row of ``points``."""
    hs = np.array([p.handle for p in pairs], dtype=np.float64)
    ts = np.array([p.target for p in pairs], dtype=np.float64)
    # In-place pipeline: dx becomes distance, then unnormalized weight.
    dx = points[:, None, 0] - hs[None, :, 0]
    dy = points[:, None, 1] - hs[None, :, 1]
    np.multiply(dx, dx, out=dx)
    np.multiply(dy, dy, out=dy)
    dx += dy
    np.sqrt(dx, out=dx)
    dx += epsilon
    np.divide(1.0, dx, out=dx)
    norm = dx.sum(axis=1, keepdims=True)
    disp = dx @ (ts - hs)
    disp /= norm
    return disp


def _collapse_consecutive(verts: np.ndarray) -> np.ndarray:
    if len(verts) <= 1:
        return verts
    keep = np.r_[True, np.any(verts[1:] != verts[:-1], axis=1)]
    verts = verts[keep]
    while len(verts) > 1 and np.array_equal(verts[-1], verts[0]):
        verts = verts[:-1]
    return verts


def forward_warp(binding: RegionBinding, epsilon: float = 1e-6) -> tuple[Contour, PixelMap]:
    """Move every region pixel by its blended displacement.

    Returns the transformed contour and the partial map of surviving
    correspondences. Two sources can round onto one target; the one with the
    smaller displacement wins (ties: earlier in row-major order), and
    targets outside the image are dropped.
    """
    if not binding.pairs:
        raise InvalidInputError("forward_warp requires a binding with control pairs")
    region = as_mask(binding.region_pixels)
    h, w = region.shape
    ys, xs = np.nonzero(region)  # row-major
    pts = np.empty((len(xs), 2), dtype=np.float64)
    pts[:, 0] = xs
    pts[:, 1] = ys
    disp = _displacements(pts, binding.pairs, epsilon)
    mag2 = np.einsum("ij,ij->i", disp, disp)
    tgt_f = pts + disp
    tgt_f += 0.5
    np.floor(tgt_f, out=tgt_f)  # round half up, both axes
    tgt = tgt_f.astype(np.int64)

    ok = (tgt[:, 0] >= 0) & (tgt[:, 0] < w) & (tgt[:, 1] >= 0) & (tgt[:, 1] < h)
    if not ok.all():
        pts, tgt, mag2 = pts[ok], tgt[ok], mag2[ok]

    key = tgt[:, 1] * w + tgt[:, 0]
    # Sort by target key alone first (radix, stable: preserves row-major
    # source order), then resolve the rare collided runs by displacement.
    order = np.argsort(key, kind="stable")
    key_sorted = key[order]
    starts = np.r_[True, key_sorted[1:] != key_sorted[:-1]]
    if len(order) and int(starts.sum()) != len(order):
        run_id = np.cumsum(starts) - 1
        collided = np.flatnonzero(np.bincount(run_id) > 1)
        in_run = np.isin(run_id, collided)
        sub = order[in_run]
        # lexsort is stable, so equal (key, mag2) keep row-major order.
        sub_sorted = sub[np.lexsort((mag2[sub], key[sub]))]
        order[in_run] = sub_sorted
    chosen = order[starts]  # sorted by target key, i.e. row-major targets
    pmap = PixelMap(
        sources=pts[chosen],
        targets=tgt[chosen],
        origins=np.full(len(chosen), FORWARD, np.uint8),
    )

    verts = binding.contour.vertices.astype(np.float64)
    vdisp = _displacements(verts, binding.pairs, epsilon)
    wverts = _collapse_consecutive(round_half_up(verts + vdisp).astype(np.int64))
    return Contour(vertices=wverts, id=binding.contour.id), pmap


def _knn_via_tree(anchors: np.ndarray, queries: np.ndarray, k: int) -> np.ndarray:
    """KD-tree k-NN with exact integer re-ranking, ties by anchor index."""
    n = len(anchors)
    tree = cKDTree(anchors)
    kq = min(n, max(2 * k, k + 8))
    _, idx = tree.query(queries, k=kq)
    idx = np.asarray(idx, dtype=np.int64).reshape(len(queries), -1)

    def rank(cand_idx, q):
        diff = anchors[cand_idx] - q
        d2 = (diff[..., 0] ** 2 + diff[..., 1] ** 2).astype(np.int64)
        comp = d2 * np.int64(n) + cand_idx
        return np.sort(comp, axis=-1)

    comp = rank(idx, queries[:, None, :])
    sel = comp[:, :k]
    if kq > k and kq < n:
        # A row is safe when its last candidate is strictly farther than its
        # k-th pick; equality means the tie class may extend past the window.
        d2_last = comp[:, -1] // n
        d2_kth = sel[:, k - 1] // n
        unsafe = np.flatnonzero(d2_last <= d2_kth)
        for row in unsafe:
            kk = kq
            while True:
                kk = min(n, kk * 2)
                _, cand = tree.query(queries[row], k=kk)
                cand = np.asarray(cand, dtype=np.int64).reshape(-1)
                comp_row = rank(cand, queries[row])
                if kk == n or comp_row[-1] // n > comp_row[k - 1] // n:
                    sel[row] = comp_row[:k]
                    break
    return (sel % n).astype(np.int64)


def _knn_rowmajor(
    anchors: np.ndarray, queries: np.ndarray, k: int, width: int, height: int
) -> np.ndarray:
    """Indices of the k nearest anchors per query, ties broken by anchor
    index (anchors are pre-sorted row-major, so index order is row-major).

    Anchors are integer pixels, and after a forward pass they densely cover
    the transformed region, so nearly every query finds its k neighbors
    within a small window of a uniform grid. Squared distances are exact
    integers, making the (distance, index) ranking deterministic. A query is
    resolved once its k-th candidate lies within the scanned window radius
    (any anchor outside is strictly farther); stragglers escalate to a wider
    window, then to a KD-tree.
    """
    n = len(anchors)
    g = len(queries)
    k = min(k, n)
    max_radius = 8
    pad = max_radius
    stride = width + 2 * pad
    # Composite keys d2 * n + index fit int32 for realistic region sizes;
    # fall back to int64 when they might not.
    max_d2 = max_radius * max_radius * 2
    dtype = np.int32 if n * (max_d2 + 1) < 2**31 else np.int64
    grid = np.full((height + 2 * pad) * stride, -1, dtype=dtype)
    ai = anchors.astype(np.int64)
    grid[(ai[:, 1] + pad) * stride + ai[:, 0] + pad] = np.arange(n, dtype=dtype)
    qi = queries.astype(np.int64)
    qflat = (qi[:, 1] + pad) * stride + qi[:, 0] + pad

    out = np.empty((g, k), dtype=np.int64)
    pending = np.arange(g)
    huge = np.iinfo(dtype).max
    for radius in (3, max_radius):
        if len(pending) == 0:
            break
        dxy = np.mgrid[-radius : radius + 1, -radius : radius + 1]
        d2n = ((dxy[0] ** 2 + dxy[1] ** 2).ravel() * n).astype(dtype)
        shift = (dxy[0] * stride + dxy[1]).ravel()
        cand = grid[qflat[pending, None] + shift[None, :]]
        comp = np.where(cand >= 0, d2n[None, :] + cand, dtype(huge))
        if k < comp.shape[1]:
            comp.partition(k - 1, axis=1)
        sel = comp[:, : min(k, comp.shape[1])].astype(np.int64)
        sel.sort(axis=1)
        if sel.shape[1] < k:
            pad_cols = np.full((len(pending), k - sel.shape[1]), huge, dtype=np.int64)
            sel = np.concatenate([sel, pad_cols], axis=1)
        kth = sel[:, k - 1]
        # Valid when the k-th candidate exists and sits within the window's
        # inscribed circle, so no unscanned anchor can beat or tie it.
        ok = (kth < huge) & (kth // n <= radius * radius)
        rows = pending[ok]
        out[rows] = sel[ok] % n
        pending = pending[~ok]
    if len(pending):
        out[pending] = _knn_via_tree(anchors, queries[pending], k)
    return out


def backward_map(
    warped_contour: Contour,
    partial_map: PixelMap,
    n_neighbors: int = 4,
    epsilon: float = 1e-6,
    width: int | None = None,
    height: int | None = None,
) -> PixelMap:
    """Fill every uncovered pixel of the transformed region.

    For each integer pixel inside the filled warped contour with no forward
    entry, a source position is interpolated from the n nearest matched
    targets. Sources that leave the image are clamped to its edge so the
    transformed region is always completely covered; the sampling rectangle
    is the defined part of the image, so clamping never reads undefined
    data.
    """
    if width is None or height is None:
        raise InvalidInputError("backward_map needs the image width and height")
    if n_neighbors < 1:
        raise InvalidInputError("n_neighbors must be >= 1")
    if len(partial_map) == 0:
        return partial_map
    filled = fill_contour(warped_contour, width, height)
    covered = new_mask(width, height)
    covered[partial_map.targets[:, 1], partial_map.targets[:, 0]] = True
    gaps = filled & ~covered
    gy, gx = np.nonzero(gaps)
    if len(gx) == 0:
        return partial_map

    keys = partial_map.targets[:, 1] * width + partial_map.targets[:, 0]
    if np.all(keys[1:] > keys[:-1]):  # forward maps arrive row-major sorted
        anchors = partial_map.targets.astype(np.float64)
        srcs = partial_map.sources
    else:
        order = np.argsort(keys, kind="stable")
        anchors = partial_map.targets[order].astype(np.float64)
        srcs = partial_map.sources[order]

    k = min(n_neighbors, len(anchors))
    queries = np.stack([gx, gy], axis=1).astype(np.float64)
    nn = _knn_rowmajor(anchors, queries, k, width, height)

    a = anchors[nn]  # (G, k, 2)
    s = srcs[nn]
    ax = a[..., 0] - queries[:, None, 0]
    ay = a[..., 1] - queries[:, None, 1]
    d = np.sqrt(ax * ax + ay * ay)
    wgt = 1.0 / (d + epsilon)
    wgt /= wgt.sum(axis=1, keepdims=True)
    new_sources = queries + np.einsum("gk,gkc->gc", wgt, s - a)
    np.clip(new_sources[:, 0], 0.0, float(width - 1), out=new_sources[:, 0])
    np.clip(new_sources[:, 1], 0.0, float(height - 1), out=new_sources[:, 1])

    extra = PixelMap(
        sources=new_sources,
        targets=np.stack([gx, gy], axis=1).astype(np.int64),
        origins=np.full(len(gx), BACKWARD, np.uint8),
    )
    return PixelMap.concatenate([partial_map, extra])


def compute_inpaint_mask(original_mask: np.ndarray, warped_mask: np.ndarray, r2: int = 5) -> np.ndarray:
    """Pixels the generator must synthesize: the region vacated by the
    deformation plus a buffer band around the warped content's border."""
    original_mask = as_mask(original_mask)
    warped_mask = as_mask(warped_mask)
    if original_mask.shape != warped_mask.shape:
        raise InvalidInputError("masks must share dimensions")
    if r2 < 0:
        raise InvalidInputError("r2 must be >= 0")
    vacated = original_mask & ~warped_mask
    return dilate(vacated | boundary(warped_mask), r2)


def render_warp(image: np.ndarray, mask: np.ndarray, pairs: list[ControlPair], config: WarpConfig = WarpConfig()) -> WarpOutput:
    """Run the full deformation: contours, association, forward + backward
    mapping, pixel transfer, and the inpainting mask.

    Regions without control pairs stay static and are excluded from the
    inpainting computation. Bindings are processed in contour extraction
    order; where transformed regions overlap, later regions win.
    """
    image = as_image(image)
    mask = as_mask(mask)
    check_same_shape(image, mask)
    h, w = mask.shape

    contours = find_contours(mask)
    bindings, rejected = associate_control_points(contours, pairs, w, h)

    warped = image.copy()
    warped_mask = new_mask(w, h)
    active = new_mask(w, h)
    chunks: list[PixelMap] = []
    binding_of_chunk: list[int] = []
    for bi, b in enumerate(bindings):
        if not b.pairs:
            continue
        wc, pmap = forward_warp(b, config.epsilon)
        full = backward_map(wc, pmap, config.n_neighbors, config.epsilon, w, h)
        if len(full):
            colors = bilinear_sample_many(image, full.sources)
            warped[full.targets[:, 1], full.targets[:, 0]] = colors
            warped_mask[full.targets[:, 1], full.targets[:, 0]] = True
        active |= b.region_pixels
        chunks.append(full)
        binding_of_chunk.append(bi)

    merged = _merge_maps(chunks, w)
    inpaint = compute_inpaint_mask(active, warped_mask, config.r2)
    return WarpOutput(
        warped=warped,
        warped_mask=warped_mask,
        inpaint_mask=inpaint,
        map=merged,
        rejected_pairs=rejected,
    )


def _merge_maps(chunks: list[PixelMap], width: int) -> PixelMap:
    """Concatenate per-region maps; on target collisions the later region's
    entry survives, mirroring the pixel write order."""
    if not chunks:
        return PixelMap()
    if len(chunks) == 1:
        return chunks[0]
    cat = PixelMap.concatenate(chunks)
    chunk_rank = np.concatenate(
        [np.full(len(c), i, np.int64) for i, c in enumerate(chunks)]
    )
    key = cat.targets[:, 1] * width + cat.targets[:, 0]
    order = np.lexsort((chunk_rank, key))
    key_sorted = key[order]
    last = np.r_[key_sorted[1:] != key_sorted[:-1], True]
    chosen = order[last]
    return PixelMap(
        sources=cat.sources[chosen],
        targets=cat.targets[chosen],
        origins=cat.origins[chosen],
    )
