"""Boundary refinement keeps an external segmenter honest.

A sloppy user mask roughly covers an object; a (mocked) segmenter predicts
a crisp object mask but also hallucinates a far-away region. The sandwich
rule lets the prediction fix boundaries inside a band around the user mask
while the hallucination is filtered out and the eroded core is always kept.
"""
import numpy as np

from dragwarp import dilate, refine_mask, sample_grid_points
from dragwarp.pngio import encode_mask_png

from _common import out_dir

out = out_dir("03")

h, w = 96, 128
yy, xx = np.mgrid[0:h, 0:w]
true_object = (xx - 50.0) ** 2 / 420 + (yy - 50.0) ** 2 / 260 <= 1.0

rng = np.random.default_rng(7)
sloppy = (xx - 52.0) ** 2 / 360 + (yy - 48.0) ** 2 / 300 <= 1.0
wobble = (rng.random((h, w)) < 0.01) & (dilate(sloppy, 6) & ~sloppy)
sloppy = dilate(sloppy | wobble, 2)

predicted = true_object.copy()
predicted[70:90, 100:124] = True  # hallucinated far region

points = sample_grid_points(sloppy, cap=128)
print(f"{len(points)} prompt points sampled from the user mask")

refined = refine_mask(sloppy, predicted, r1=10)
(out / "user_mask.png").write_bytes(encode_mask_png(sloppy))
(out / "predicted_mask.png").write_bytes(encode_mask_png(predicted))
(out / "refined_mask.png").write_bytes(encode_mask_png(refined))

kept_far = int(refined[70:90, 100:124].sum())
agreement = (refined == true_object).mean()
print(f"hallucinated far-region pixels kept: {kept_far}")
print(f"agreement with the true object mask: {agreement:.1%}")
print(f"outputs written to {out}")
