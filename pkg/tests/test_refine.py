import base64

import httpx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dragwarp import (
    DilateSegmenter,
    EchoSegmenter,
    RefineConfig,
    RemoteSegmenter,
    dilate,
    erode,
    refine,
    refine_mask,
    sample_grid_points,
)
from dragwarp.errors import InvalidInputError, SegmenterError
from dragwarp.pngio import encode_mask_png, to_b64

from oracles import brute_dilate, brute_erode, make_blob_mask, make_random_image

masks_16 = arrays(bool, (16, 16), elements=st.booleans())


# --- sample_grid_points -----------------------------------------------------

def test_empty_mask_yields_no_points():
    assert sample_grid_points(np.zeros((8, 8), dtype=bool)) == []


def test_full_16x16_cap_128_uses_pitch_2():
    mask = np.ones((16, 16), dtype=bool)
    pts = sample_grid_points(mask, cap=128)
    assert len(pts) == 64
    assert all(x % 2 == 0 and y % 2 == 0 for x, y in pts)
    assert all(mask[y, x] for x, y in pts)


def test_single_pixel_mask_returns_it():
    mask = np.zeros((30, 30), dtype=bool)
    mask[17, 4] = True
    assert sample_grid_points(mask, cap=128) == [(4, 17)]


def test_points_subset_of_mask_and_capped():
    rng = np.random.default_rng(71)
    for _ in range(10):
        mask = make_blob_mask(rng, 40, 40)
        cap = int(rng.integers(1, 60))
        pts = sample_grid_points(mask, cap=cap)
        assert 1 <= len(pts) <= cap
        assert all(mask[y, x] for x, y in pts)


def test_grid_fallback_when_grid_misses():
    # Bounding box corner is false and pitch exceeds the blob size.
    mask = np.zeros((40, 40), dtype=bool)
    mask[0, 39] = True
    mask[39, 0] = True
    pts = sample_grid_points(mask, cap=1)
    assert pts == [(39, 0)]


# --- refine_mask -------------------------------------------------------------

def test_refine_prediction_equals_user_mask_collapses():
    rng = np.random.default_rng(73)
    mask = make_blob_mask(rng, 24, 24)
    assert np.array_equal(refine_mask(mask, mask, 10), mask)


def test_refine_empty_prediction_erodes():
    rng = np.random.default_rng(74)
    mask = make_blob_mask(rng, 24, 24)
    got = refine_mask(mask, np.zeros_like(mask), 3)
    assert np.array_equal(got, erode(mask, 3))


def test_refine_far_prediction_filtered_out():
    user = np.zeros((40, 40), dtype=bool)
    user[5:12, 5:12] = True
    pred = np.zeros_like(user)
    pred[30:38, 30:38] = True  # far blob, outside the dilated envelope
    got = refine_mask(user, pred, 10)
    per_pixel = (pred & brute_dilate(user, 10)) | brute_erode(user, 10)
    assert np.array_equal(got, per_pixel)
    assert not got[30:38, 30:38].any()


def test_refine_mask_rejects_mismatched_shapes():
    with pytest.raises(InvalidInputError):
        refine_mask(np.zeros((4, 4), bool), np.zeros((5, 5), bool), 1)


@settings(max_examples=50, deadline=None)
@given(masks_16, masks_16, st.sampled_from([0, 3, 10]))
def test_sandwich_bound(user, pred, r1):
    got = refine_mask(user, pred, r1)
    er = erode(user, r1)
    di = dilate(user, r1)
    assert not (er & ~got).any()
    assert not (got & ~di).any()
    if r1 == 0:
        assert np.array_equal(got, user)


# --- refine orchestration -----------------------------------------------------

def test_refine_with_echo_segmenter_is_identity():
    rng = np.random.default_rng(79)
    img = make_random_image(rng, 24, 24)
    mask = make_blob_mask(rng, 24, 24)
    out, warnings = refine(img, mask, EchoSegmenter(mask))
    assert np.array_equal(out, mask)
    assert warnings == []


def test_refine_without_segmenter_passes_through():
    rng = np.random.default_rng(80)
    img = make_random_image(rng, 16, 16)
    mask = make_blob_mask(rng, 16, 16)
    out, warnings = refine(img, mask, None)
    assert np.array_equal(out, mask)
    assert len(warnings) == 1


def test_refine_with_failing_segmenter_passes_through():
    class Exploding:
        def predict(self, image, points):
            raise SegmenterError("boom")

    rng = np.random.default_rng(81)
    img = make_random_image(rng, 16, 16)
    mask = make_blob_mask(rng, 16, 16)
    out, warnings = refine(img, mask, Exploding())
    assert np.array_equal(out, mask)
    assert any("boom" in w for w in warnings)


def test_refine_with_wrong_shape_prediction_passes_through():
    class WrongShape:
        def predict(self, image, points):
            return np.ones((3, 3), dtype=bool)

    rng = np.random.default_rng(82)
    img = make_random_image(rng, 16, 16)
    mask = make_blob_mask(rng, 16, 16)
    out, warnings = refine(img, mask, WrongShape())
    assert np.array_equal(out, mask)
    assert warnings


def test_refine_with_dilating_segmenter_clips_to_envelope():
    rng = np.random.default_rng(83)
    img = make_random_image(rng, 32, 32)
    mask = make_blob_mask(rng, 32, 32)
    out, _ = refine(img, mask, DilateSegmenter(mask, 20), RefineConfig(r1=10))
    assert np.array_equal(out, dilate(mask, 10))


# --- RemoteSegmenter ------------------------------------------------------------

def _mask_response_transport(mask):
    def handler(request):
        return httpx.Response(200, json={"mask": to_b64(encode_mask_png(mask))})

    return httpx.MockTransport(handler)


def test_remote_segmenter_round_trip():
    rng = np.random.default_rng(89)
    img = make_random_image(rng, 20, 20)
    mask = make_blob_mask(rng, 20, 20)
    seg = RemoteSegmenter(
        "http://segmenter.test/predict", transport=_mask_response_transport(mask)
    )
    got = seg.predict(img, [(1.0, 1.0)])
    assert np.array_equal(got, mask)


def test_remote_segmenter_failure_raises_segmenter_error():
    def handler(request):
        return httpx.Response(503, text="down")

    seg = RemoteSegmenter(
        "http://segmenter.test/predict", transport=httpx.MockTransport(handler)
    )
    rng = np.random.default_rng(90)
    with pytest.raises(SegmenterError):
        seg.predict(make_random_image(rng, 8, 8), [(0.0, 0.0)])


def test_remote_segmenter_sends_protocol_fields():
    seen = {}

    def handler(request):
        import json

        seen.update(json.loads(request.content))
        return httpx.Response(
            200, json={"mask": to_b64(encode_mask_png(np.ones((8, 8), bool)))}
        )

    seg = RemoteSegmenter("http://s.test/p", transport=httpx.MockTransport(handler))
    rng = np.random.default_rng(91)
    seg.predict(make_random_image(rng, 8, 8), [(2, 3), (4, 5)])
    assert seen["points"] == [[2.0, 3.0], [4.0, 5.0]]
    base64.b64decode(seen["image"])  # valid b64 payload
