"""dragwarp: drag-based image deformation with pluggable inpainting.

The core entry point is :func:`render_warp`, which turns an image, a region
mask and handle/target control pairs into a gap-free warped image plus the
mask an inpainting backend must fill. Everything else (mask refinement,
inpainting backends, the HTTP session service, the CLI) is built around it.
"""
from .errors import (
    BackendNotFoundError,
    BackendUnavailableError,
    DragwarpError,
    InvalidInputError,
    ProtocolError,
    SegmenterError,
)
from .raster import Contour, bilinear_sample, bilinear_sample_many, signed_area
from .morphology import boundary, dilate, disc_offsets, erode
from .contours import fill_contour, find_contours, point_in_contour
from .warp import (
    ControlPair,
    PixelMap,
    RegionBinding,
    WarpConfig,
    WarpOutput,
    associate_control_points,
    backward_map,
    compute_inpaint_mask,
    forward_warp,
    idw_weights,
    render_warp,
)
from .refine import (
    DilateSegmenter,
    EchoSegmenter,
    RefineConfig,
    RemoteSegmenter,
    Segmenter,
    refine,
    refine_mask,
    sample_grid_points,
)
from .inpaint import (
    BackendDescriptor,
    BackendRegistry,
    InpaintRequest,
    harmonic_inpaint,
    remote_inpaint,
    run_backend,
)

__version__ = "0.1.0"

__all__ = [
    "BackendDescriptor",
    "BackendNotFoundError",
    "BackendRegistry",
    "BackendUnavailableError",
    "Contour",
    "ControlPair",
    "DilateSegmenter",
    "DragwarpError",
    "EchoSegmenter",
    "InpaintRequest",
    "InvalidInputError",
    "PixelMap",
    "ProtocolError",
    "RefineConfig",
    "RegionBinding",
    "RemoteSegmenter",
    "Segmenter",
    "SegmenterError",
    "WarpConfig",
    "WarpOutput",
    "associate_control_points",
    "backward_map",
    "bilinear_sample",
    "bilinear_sample_many",
    "boundary",
    "compute_inpaint_mask",
    "dilate",
    "disc_offsets",
    "erode",
    "fill_contour",
    "find_contours",
    "forward_warp",
    "harmonic_inpaint",
    "idw_weights",
    "point_in_contour",
    "refine",
    "refine_mask",
    "remote_inpaint",
    "render_warp",
    "run_backend",
    "sample_grid_points",
    "signed_area",
]
