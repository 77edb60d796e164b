import base64
import json

import httpx
import numpy as np
import pytest

from dragwarp import (
    BackendDescriptor,
    BackendRegistry,
    InpaintRequest,
    harmonic_inpaint,
    remote_inpaint,
    run_backend,
)
from dragwarp.errors import (
    BackendNotFoundError,
    BackendUnavailableError,
    ProtocolError,
)
from dragwarp.pngio import decode_image_png, encode_image_png, to_b64

from oracles import make_blob_mask, make_random_image


def hole_mask(w, h, x0, y0, side):
    m = np.zeros((h, w), dtype=bool)
    m[y0 : y0 + side, x0 : x0 + side] = True
    return m


# --- harmonic_inpaint ---------------------------------------------------------

def test_empty_mask_returns_input_bit_exact():
    rng = np.random.default_rng(101)
    img = make_random_image(rng, 12, 12)
    out = harmonic_inpaint(InpaintRequest(img, np.zeros((12, 12), bool)))
    assert np.array_equal(out, img)


def test_constant_image_hole_filled_to_constant():
    img = np.full((16, 16, 3), 77, dtype=np.uint8)
    mask = hole_mask(16, 16, 5, 5, 6)
    out = harmonic_inpaint(InpaintRequest(img, mask))
    assert np.abs(out.astype(int) - 77).max() <= 1


def test_linear_gradient_hole_recovered():
    # Linear functions are harmonic, so the interior should reproduce the ramp.
    x = np.arange(32, dtype=np.float64)
    ramp = np.clip(np.floor(x * 8 + 0.5), 0, 255).astype(np.uint8)
    img = np.repeat(ramp[None, :, None], 32, axis=0)
    img = np.repeat(img, 3, axis=2)
    mask = hole_mask(32, 32, 12, 12, 8)
    out = harmonic_inpaint(InpaintRequest(img, mask))
    assert np.abs(out[mask].astype(int) - img[mask].astype(int)).max() <= 2


def test_outside_mask_bit_exact_preservation():
    rng = np.random.default_rng(103)
    img = make_random_image(rng, 24, 24)
    mask = make_blob_mask(rng, 24, 24)
    out = harmonic_inpaint(InpaintRequest(img, mask))
    assert np.array_equal(out[~mask], img[~mask])


def test_maximum_principle():
    rng = np.random.default_rng(107)
    img = make_random_image(rng, 20, 20)
    mask = hole_mask(20, 20, 6, 6, 7)
    from scipy import ndimage

    ring = ~mask & ndimage.binary_dilation(mask, structure=np.ones((3, 3), bool))
    out = harmonic_inpaint(InpaintRequest(img, mask))
    for c in range(3):
        lo, hi = int(img[ring][:, c].min()), int(img[ring][:, c].max())
        assert out[mask][:, c].min() >= lo
        assert out[mask][:, c].max() <= hi


def test_jacobi_metric_non_increasing():
    rng = np.random.default_rng(109)
    img = make_random_image(rng, 24, 24)
    mask = make_blob_mask(rng, 24, 24)
    metrics: list[float] = []
    harmonic_inpaint(InpaintRequest(img, mask), max_iters=300, metrics_out=metrics)
    assert len(metrics) >= 1
    assert all(b <= a + 1e-12 for a, b in zip(metrics, metrics[1:]))


def test_all_true_mask_yields_mid_gray(caplog):
    img = np.zeros((6, 6, 3), dtype=np.uint8)
    mask = np.ones((6, 6), dtype=bool)
    with caplog.at_level("WARNING"):
        out = harmonic_inpaint(InpaintRequest(img, mask))
    assert np.all(out == 128)
    assert any("mid-gray" in r.message for r in caplog.records)


def test_deterministic():
    rng = np.random.default_rng(113)
    img = make_random_image(rng, 20, 20)
    mask = make_blob_mask(rng, 20, 20)
    a = harmonic_inpaint(InpaintRequest(img, mask))
    b = harmonic_inpaint(InpaintRequest(img, mask))
    assert np.array_equal(a, b)


# --- registry -------------------------------------------------------------------

def test_registry_always_has_harmonic():
    reg = BackendRegistry()
    desc = reg.select("harmonic")
    assert desc.kind == "builtin"


def test_registry_unknown_name_lists_available():
    reg = BackendRegistry.from_endpoints({"sd15": "http://sd.test/inpaint"})
    with pytest.raises(BackendNotFoundError) as exc:
        reg.select("foo")
    assert "harmonic" in str(exc.value)
    assert "sd15" in str(exc.value)


def test_registry_remote_from_config():
    reg = BackendRegistry.from_endpoints({"sd15": "http://sd.test/inpaint"})
    desc = reg.select("sd15")
    assert desc.kind == "remote"
    assert desc.endpoint == "http://sd.test/inpaint"


# --- remote_inpaint ---------------------------------------------------------------

def _request():
    rng = np.random.default_rng(127)
    img = make_random_image(rng, 16, 16)
    mask = hole_mask(16, 16, 4, 4, 5)
    return InpaintRequest(img, mask)


def _remote(handler):
    return (
        BackendDescriptor(name="mock", kind="remote", endpoint="http://b.test/inpaint"),
        httpx.MockTransport(handler),
    )


def test_remote_echo_round_trip():
    req = _request()

    def handler(request):
        body = json.loads(request.content)
        return httpx.Response(200, json={"image": body["image"]})

    desc, transport = _remote(handler)
    out = remote_inpaint(req, desc, transport=transport)
    assert np.array_equal(out, req.warped)


def test_remote_wrong_dimensions_is_protocol_error():
    req = _request()
    rng = np.random.default_rng(131)
    wrong = make_random_image(rng, 8, 8)

    def handler(request):
        return httpx.Response(200, json={"image": to_b64(encode_image_png(wrong))})

    desc, transport = _remote(handler)
    with pytest.raises(ProtocolError):
        remote_inpaint(req, desc, transport=transport)


def test_remote_transport_failure_is_backend_unavailable():
    req = _request()

    def handler(request):
        raise httpx.ConnectError("no route")

    desc, transport = _remote(handler)
    with pytest.raises(BackendUnavailableError):
        remote_inpaint(req, desc, transport=transport)


def test_remote_harmonic_behind_wire_matches_builtin():
    req = _request()

    def handler(request):
        body = json.loads(request.content)
        img = decode_image_png(base64.b64decode(body["image"]))
        from dragwarp.pngio import decode_mask_png

        mask = decode_mask_png(base64.b64decode(body["mask"]))
        filled = harmonic_inpaint(InpaintRequest(img, mask))
        return httpx.Response(200, json={"image": to_b64(encode_image_png(filled))})

    desc, transport = _remote(handler)
    out = remote_inpaint(req, desc, transport=transport)
    assert np.array_equal(out, harmonic_inpaint(req))


def test_remote_drift_outside_mask_warns(caplog):
    req = _request()
    drifted = req.warped.copy().astype(np.int16)
    drifted = np.clip(drifted + 9, 0, 255).astype(np.uint8)

    def handler(request):
        return httpx.Response(200, json={"image": to_b64(encode_image_png(drifted))})

    desc, transport = _remote(handler)
    with caplog.at_level("WARNING"):
        out = remote_inpaint(req, desc, transport=transport)
    assert np.array_equal(out, drifted)
    assert any("drifted" in r.message for r in caplog.records)


# --- run_backend ---------------------------------------------------------------------

def test_run_backend_builtin():
    req = _request()
    img, used, fallback = run_backend(req, BackendRegistry(), "harmonic")
    assert used == "harmonic"
    assert not fallback
    assert np.array_equal(img, harmonic_inpaint(req))


def test_run_backend_falls_back_on_remote_failure():
    req = _request()
    reg = BackendRegistry.from_endpoints({"flaky": "http://flaky.test/inpaint"})

    def handler(request):
        raise httpx.ConnectError("down")

    img, used, fallback = run_backend(
        req, reg, "flaky", transport=httpx.MockTransport(handler)
    )
    assert used == "harmonic"
    assert fallback
    assert np.array_equal(img, harmonic_inpaint(req))


def test_run_backend_unknown_name_raises():
    with pytest.raises(BackendNotFoundError):
        run_backend(_request(), BackendRegistry(), "xyz")
