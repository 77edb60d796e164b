"""Batch front door: run the warp or the full edit pipeline on case files,
benchmark performance, or launch the HTTP service.

Exit codes: 0 success, 1 invalid input, 2 internal failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import statistics
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from .cases import CaseSpec, ServiceConfig, discover_cases
from .contours import fill_contour, find_contours
from .errors import DragwarpError, InvalidInputError
from .inpaint import BackendRegistry, InpaintRequest, run_backend
from .pngio import encode_image_png, encode_mask_png
from .warp import WarpConfig, associate_control_points, backward_map, forward_warp, render_warp

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INTERNAL = 2


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _warp_config(args) -> WarpConfig:
    return WarpConfig(epsilon=args.epsilon, n_neighbors=args.neighbors, r2=args.r2)


def _case_from_args(args) -> CaseSpec:
    missing = [
        flag
        for flag, value in (("--image", args.image), ("--mask", args.mask), ("--points", args.points))
        if value is None
    ]
    if missing:
        raise InvalidInputError(f"missing required flags: {', '.join(missing)}")
    return CaseSpec(
        image_path=Path(args.image),
        mask_path=Path(args.mask),
        points_path=Path(args.points),
        resize=args.resize,
    )


def _write_warp_artifacts(out_dir: Path, out) -> None:
    _atomic_write(out_dir / "warped.png", encode_image_png(out.warped))
    _atomic_write(out_dir / "warped_mask.png", encode_mask_png(out.warped_mask))
    _atomic_write(out_dir / "inpaint_mask.png", encode_mask_png(out.inpaint_mask))
    map_doc = json.dumps({"entries": out.map.to_entries()}, indent=2)
    _atomic_write(out_dir / "map.json", map_doc.encode())


def cmd_warp(args) -> int:
    case = _case_from_args(args)
    image, mask, pairs = case.load(resize_default=args.resize)
    out = render_warp(image, mask, pairs, _warp_config(args))
    out_dir = Path(args.out_dir)
    _write_warp_artifacts(out_dir, out)
    print(f"wrote warp artifacts to {out_dir}")
    return EXIT_OK


def cmd_edit(args) -> int:
    case = _case_from_args(args)
    image, mask, pairs = case.load(resize_default=args.resize)
    out = render_warp(image, mask, pairs, _warp_config(args))
    config = ServiceConfig.load(args.config) if args.config else ServiceConfig.load(None)
    registry = BackendRegistry.from_endpoints(config.backend_endpoints)
    edited, used, fallback = run_backend(
        InpaintRequest(out.warped, out.inpaint_mask), registry, args.backend
    )
    if fallback:
        print(f"warning: backend {args.backend!r} unavailable, used {used!r}", file=sys.stderr)
    out_dir = Path(args.out_dir)
    _write_warp_artifacts(out_dir, out)
    _atomic_write(out_dir / "edited.png", encode_image_png(edited))
    print(f"wrote edit artifacts to {out_dir} (backend: {used})")
    return EXIT_OK


def _coverage(mask, pairs, config) -> float:
    """Mapped share of the transformed regions, as a fraction of the pixels
    inside the filled warped contours that lie within the image."""
    h, w = mask.shape
    bindings, _ = associate_control_points(find_contours(mask), pairs, w, h)
    total = 0
    mapped = 0
    for b in bindings:
        if not b.pairs:
            continue
        wc, pmap = forward_warp(b, config.epsilon)
        full = backward_map(wc, pmap, config.n_neighbors, config.epsilon, w, h)
        filled = fill_contour(wc, w, h)
        covered = np.zeros_like(filled)
        covered[full.targets[:, 1], full.targets[:, 0]] = True
        total += int(filled.sum())
        mapped += int((filled & covered).sum())
    return 1.0 if total == 0 else mapped / total


def _outside_psnr(original, edited, mask, inpaint_mask) -> float:
    outside = ~(mask | inpaint_mask)
    if not outside.any():
        return math.inf
    a = original[outside].astype(np.float64)
    b = edited[outside].astype(np.float64)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0**2 / mse)


def cmd_bench(args) -> int:
    specs = discover_cases(Path(args.cases_dir))
    reps = args.reps
    if reps < 1:
        raise InvalidInputError("--reps must be >= 1")
    registry = BackendRegistry()
    rows = []
    for spec in specs:
        image, mask, pairs = spec.load(resize_default=args.resize)
        config = WarpConfig(
            epsilon=spec.epsilon if spec.epsilon is not None else args.epsilon,
            n_neighbors=spec.neighbors if spec.neighbors is not None else args.neighbors,
            r2=spec.r2 if spec.r2 is not None else args.r2,
        )
        warp_times = []
        inpaint_times = []
        out = None
        edited = None
        for _ in range(reps):
            t0 = time.perf_counter()
            out = render_warp(image, mask, pairs, config)
            warp_times.append((time.perf_counter() - t0) * 1000.0)
            t0 = time.perf_counter()
            edited, _, _ = run_backend(
                InpaintRequest(out.warped, out.inpaint_mask),
                registry,
                spec.backend or args.backend,
            )
            inpaint_times.append((time.perf_counter() - t0) * 1000.0)
        coverage = _coverage(mask, pairs, config)
        psnr = _outside_psnr(image, edited, mask, out.inpaint_mask)
        rows.append(
            {
                "case": spec.name,
                "warp_ms": statistics.median(warp_times),
                "inpaint_ms": statistics.median(inpaint_times),
                "coverage": coverage,
                "outside_psnr_db": psnr,
                "repetitions": reps,
            }
        )

    header = f"{'case':<24} {'warp ms':>10} {'inpaint ms':>12} {'coverage %':>11} {'PSNR dB':>9}"
    print(header)
    print("-" * len(header))
    for r in rows:
        psnr_txt = "inf" if math.isinf(r["outside_psnr_db"]) else f"{r['outside_psnr_db']:.1f}"
        print(
            f"{r['case']:<24} {r['warp_ms']:>10.2f} {r['inpaint_ms']:>12.2f} "
            f"{r['coverage'] * 100:>11.2f} {psnr_txt:>9}"
        )
    report = {
        "repetitions": reps,
        "cases": [
            {**r, "outside_psnr_db": None if math.isinf(r["outside_psnr_db"]) else r["outside_psnr_db"]}
            for r in rows
        ],
    }
    report_path = Path(args.out_dir) / "bench_report.json"
    _atomic_write(report_path, json.dumps(report, indent=2).encode())
    print(f"\nmachine-readable report: {report_path}")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .service import serve

    config = ServiceConfig.load(args.config)
    serve(config, static_dir=args.static_dir)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dragwarp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_case=True):
        if with_case:
            p.add_argument("--image", help="input image PNG")
            p.add_argument("--mask", help="region mask PNG (single channel, >127 = inside)")
            p.add_argument("--points", help="points JSON file")
        p.add_argument("--out-dir", default=".", help="output directory")
        p.add_argument("--backend", default="harmonic", help="inpainting backend name")
        p.add_argument("--r1", type=float, default=10.0, help="mask refinement radius")
        p.add_argument("--r2", type=int, default=5, help="inpaint mask dilation radius")
        p.add_argument("--epsilon", type=float, default=1e-6, help="IDW stabilizer")
        p.add_argument("--neighbors", type=int, default=4, help="backward-mapping neighbors")
        p.add_argument("--resize", type=int, default=0, help="resize long edge (0 = native)")
        p.add_argument("--config", default=None, help="service/backend config file")

    p_warp = sub.add_parser("warp", help="run the warp and write its artifacts")
    add_common(p_warp)
    p_warp.set_defaults(func=cmd_warp)

    p_edit = sub.add_parser("edit", help="warp then inpaint")
    add_common(p_edit)
    p_edit.set_defaults(func=cmd_edit)

    p_bench = sub.add_parser("bench", help="benchmark a directory of cases")
    p_bench.add_argument("cases_dir", help="directory of case descriptor *.json files")
    p_bench.add_argument("--reps", type=int, default=20, help="repetitions per case")
    add_common(p_bench, with_case=False)
    p_bench.set_defaults(func=cmd_bench)

    p_serve = sub.add_parser("serve", help="run the HTTP session service")
    p_serve.add_argument("--config", default=None, help="service config file")
    p_serve.add_argument("--static-dir", default=None, help="serve a built UI from this directory")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except DragwarpError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
