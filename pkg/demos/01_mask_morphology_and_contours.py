"""Raster basics: disc morphology, boundary extraction, contour tracing.

Builds a two-blob mask, grows and shrinks it with a Euclidean disc, traces
the outer contour of each connected region, and shows that filling the
contours reproduces the (hole-filled) mask. Outputs land in out/01/.
"""
import numpy as np

from dragwarp import boundary, dilate, erode, fill_contour, find_contours
from dragwarp.pngio import encode_mask_png

from _common import out_dir

out = out_dir("01")

mask = np.zeros((96, 128), dtype=bool)
yy, xx = np.mgrid[0:96, 0:128]
mask |= (xx - 40.0) ** 2 / 500 + (yy - 45.0) ** 2 / 300 <= 1.0
mask |= (xx - 95.0) ** 2 / 200 + (yy - 55.0) ** 2 / 350 <= 1.0
mask[40:48, 34:46] = False  # carve a hole into the first blob

(out / "mask.png").write_bytes(encode_mask_png(mask))
(out / "dilated_r6.png").write_bytes(encode_mask_png(dilate(mask, 6)))
(out / "eroded_r4.png").write_bytes(encode_mask_png(erode(mask, 4)))
(out / "boundary.png").write_bytes(encode_mask_png(boundary(mask)))

contours = find_contours(mask)
print(f"traced {len(contours)} region contour(s)")
for c in contours:
    x0, y0 = (int(v) for v in c.vertices[0])
    print(f"  contour {c.id}: {len(c)} vertices, starts at ({x0}, {y0})")

union = np.zeros_like(mask)
for c in contours:
    union |= fill_contour(c, 128, 96)
(out / "refilled.png").write_bytes(encode_mask_png(union))

hole_pixels = int((union & ~mask).sum())
print(f"refilling the contours absorbed {hole_pixels} hole pixel(s)")
print(f"outputs written to {out}")
