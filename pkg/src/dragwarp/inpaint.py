"""Pluggable inpainting: a common request shape, a deterministic built-in
harmonic filler, and a client for remote generative backends.

The built-in backend solves the discrete Laplace equation inside the mask
with the surrounding known pixels as boundary conditions. It is nobody's
idea of a photorealistic generator, but it is deterministic, dependency
free, and structurally interchangeable with any remote model, which keeps
the whole pipeline testable offline.
"""
from __future__ import annotations

import base64
import logging
from dataclasses import dataclass, field

import httpx
import numpy as np
from scipy import ndimage

from .errors import (
    BackendNotFoundError,
    BackendUnavailableError,
    InvalidInputError,
    ProtocolError,
)
from .raster import as_image, as_mask, check_same_shape, round_half_up

log = logging.getLogger(__name__)

HARMONIC = "harmonic"


@dataclass
class InpaintRequest:
    warped: np.ndarray
    mask: np.ndarray
    prompt: str | None = None

    def __post_init__(self):
        self.warped = as_image(self.warped)
        self.mask = as_mask(self.mask)
        check_same_shape(self.warped, self.mask)


@dataclass(frozen=True)
class BackendDescriptor:
    name: str
    kind: str  # "builtin" | "remote"
    latency_class: str = ""
    endpoint: str | None = None


def harmonic_inpaint(
    request: InpaintRequest,
    max_iters: int = 2000,
    tol: float = 1e-3,
    metrics_out: list[float] | None = None,
) -> np.ndarray:
    """Fill the masked region with the harmonic interpolant of its border.

    Jacobi iteration on the 4-neighbor Laplacian; known pixels are fixed,
    unknowns start at the mean of the known pixels ringing the hole (128 if
    the hole touches nothing known). Stops once the per-channel mean
    absolute update drops below ``tol`` or after ``max_iters`` sweeps.
    Pixels outside the mask are returned bit-identical.
    """
    if max_iters < 1:
        raise InvalidInputError("max_iters must be >= 1")
    if tol <= 0:
        raise InvalidInputError("tol must be > 0")
    warped, mask = request.warped, request.mask
    if not mask.any():
        return warped.copy()

    known = ~mask
    ring = known & ndimage.binary_dilation(mask, structure=np.ones((3, 3), bool))
    field_ = warped.astype(np.float64)
    if ring.any():
        seed = field_[ring].mean(axis=0)
    else:
        log.warning("inpaint mask covers the whole image; filling with mid-gray")
        seed = np.array([128.0, 128.0, 128.0])
    field_[mask] = seed

    h, w = mask.shape
    my, mx = np.nonzero(mask)
    neighbor_sum = np.zeros((len(my), 3), np.float64)
    for _ in range(max_iters):
        neighbor_sum[:] = 0.0
        count = np.zeros(len(my), np.float64)
        for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            ny, nx = my + dy, mx + dx
            ok = (ny >= 0) & (ny < h) & (nx >= 0) & (nx < w)
            neighbor_sum[ok] += field_[ny[ok], nx[ok]]
            count += ok
        has_nbr = count > 0
        new_vals = np.where(
            has_nbr[:, None],
            neighbor_sum / np.maximum(count, 1.0)[:, None],
            field_[my, mx],
        )
        update = np.abs(new_vals - field_[my, mx]).mean(axis=0)
        field_[my, mx] = new_vals
        metric = float(update.max())
        if metrics_out is not None:
            metrics_out.append(metric)
        if metric < tol:
            break

    out = warped.copy()
    out[mask] = np.clip(round_half_up(field_[mask]), 0, 255).astype(np.uint8)
    return out


def remote_inpaint(
    request: InpaintRequest,
    descriptor: BackendDescriptor,
    deadline: float = 30.0,
    transport: httpx.BaseTransport | None = None,
    drift_warn_threshold: float = 2.0,
) -> np.ndarray:
    """Send the request over the wire and validate the reply.

    Request: {"image": <PNG b64>, "mask": <PNG b64>, "prompt": optional}.
    Response: {"image": <PNG b64>} with identical dimensions. A response
    whose pixels outside the mask drift beyond ``drift_warn_threshold`` mean
    absolute levels logs a warning but is still returned: generative
    backends legitimately re-encode the whole frame.
    """
    from .pngio import decode_image_png, encode_image_png, encode_mask_png

    if descriptor.kind != "remote" or not descriptor.endpoint:
        raise InvalidInputError(f"backend {descriptor.name!r} is not a configured remote")
    payload = {
        "image": base64.b64encode(encode_image_png(request.warped)).decode("ascii"),
        "mask": base64.b64encode(encode_mask_png(request.mask)).decode("ascii"),
    }
    if request.prompt:
        payload["prompt"] = request.prompt
    try:
        with httpx.Client(timeout=deadline, transport=transport) as client:
            resp = client.post(descriptor.endpoint, json=payload)
            resp.raise_for_status()
    except httpx.HTTPError as exc:
        raise BackendUnavailableError(f"backend {descriptor.name!r} unreachable: {exc}") from exc
    try:
        body = resp.json()
        result = decode_image_png(base64.b64decode(body["image"]))
    except (KeyError, ValueError) as exc:
        raise ProtocolError(f"backend {descriptor.name!r} sent a malformed response: {exc}") from exc
    if result.shape != request.warped.shape:
        raise ProtocolError(
            f"backend {descriptor.name!r} returned shape {result.shape}, "
            f"expected {request.warped.shape}"
        )
    outside = ~request.mask
    if outside.any():
        drift = float(
            np.abs(result[outside].astype(np.float64) - request.warped[outside]).mean()
        )
        if drift > drift_warn_threshold:
            log.warning(
                "backend %r drifted %.2f levels outside the mask (threshold %.2f)",
                descriptor.name, drift, drift_warn_threshold,
            )
    return result


@dataclass
class BackendRegistry:
    """Named inpainting backends; the builtin harmonic filler is always
    present and serves as the fallback when remotes fail."""

    backends: dict[str, BackendDescriptor] = field(default_factory=dict)

    def __post_init__(self):
        self.backends.setdefault(
            HARMONIC, BackendDescriptor(name=HARMONIC, kind="builtin", latency_class="fast")
        )

    @staticmethod
    def from_endpoints(endpoints: dict[str, str]) -> "BackendRegistry":
        reg = BackendRegistry()
        for name, url in endpoints.items():
            reg.register(BackendDescriptor(name=name, kind="remote", endpoint=url))
        return reg

    def register(self, descriptor: BackendDescriptor) -> None:
        self.backends[descriptor.name] = descriptor

    def select(self, name: str) -> BackendDescriptor:
        if name not in self.backends:
            raise BackendNotFoundError(name, self.backends.keys())
        return self.backends[name]

    def names(self) -> list[str]:
        return sorted(self.backends.keys())


def run_backend(
    request: InpaintRequest,
    registry: BackendRegistry,
    name: str = HARMONIC,
    deadline: float = 30.0,
    transport: httpx.BaseTransport | None = None,
) -> tuple[np.ndarray, str, bool]:
    """Run the named backend, falling back to the builtin on remote failure.

    Returns (image, backend_actually_used, fell_back). Unknown names raise;
    falling back silently to a different generator than requested would be
    worse than an error, but a transient remote failure should not stall an
    editing session.
    """
    descriptor = registry.select(name)
    if descriptor.kind == "builtin":
        return harmonic_inpaint(request), descriptor.name, False
    try:
        return remote_inpaint(request, descriptor, deadline, transport), descriptor.name, False
    except (BackendUnavailableError, ProtocolError) as exc:
        log.warning("backend %r failed (%s); using builtin fallback", name, exc)
        return harmonic_inpaint(request), HARMONIC, True
