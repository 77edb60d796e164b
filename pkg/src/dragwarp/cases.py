"""On-disk case format and the service/CLI configuration file.

A case is an image, a mask, and a points file; the points JSON is
{"pairs": [{"handle": [x, y], "target": [x, y]}, ...]} with coordinates in
the top-left-origin pixel frame. Batch directories hold one JSON descriptor
per case referencing the three files by relative path.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .pngio import decode_image_png, decode_mask_png, resize_long_edge
from .warp import ControlPair

CONFIG_ENV_VAR = "DRAGWARP_CONFIG"


def load_points_json(text: str) -> list[ControlPair]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"points file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "pairs" not in doc or not isinstance(doc["pairs"], list):
        raise InvalidInputError('points JSON must be an object with a "pairs" list')
    pairs = []
    for i, entry in enumerate(doc["pairs"]):
        try:
            handle = entry["handle"]
            target = entry["target"]
            pairs.append(ControlPair(handle=(handle[0], handle[1]), target=(target[0], target[1])))
        except (TypeError, KeyError, IndexError, InvalidInputError) as exc:
            raise InvalidInputError(f"pair {i} is malformed: {exc}") from exc
    return pairs


def dump_points_json(pairs: list[ControlPair]) -> str:
    return json.dumps(
        {
            "pairs": [
                {"handle": list(p.handle), "target": list(p.target)} for p in pairs
            ]
        },
        indent=2,
    )


def validate_pairs_in_bounds(pairs: list[ControlPair], width: int, height: int) -> list[str]:
    """Per-pair diagnostics for out-of-bounds coordinates; empty when valid."""
    problems = []
    for i, p in enumerate(pairs):
        for label, (x, y) in (("handle", p.handle), ("target", p.target)):
            if not (0 <= x < width and 0 <= y < height):
                problems.append(
                    f"pair {i}: {label} ({x}, {y}) outside image bounds {width}x{height}"
                )
    return problems


@dataclass
class CaseSpec:
    """One runnable editing case plus per-case option overrides."""

    image_path: Path
    mask_path: Path
    points_path: Path
    backend: str | None = None
    r1: float | None = None
    r2: int | None = None
    epsilon: float | None = None
    neighbors: int | None = None
    resize: int | None = None
    name: str = ""

    def load(self, resize_default: int = 0):
        """Decode and validate the case; returns (image, mask, pairs)."""
        for label, path in (
            ("image", self.image_path),
            ("mask", self.mask_path),
            ("points", self.points_path),
        ):
            if not Path(path).is_file():
                raise InvalidInputError(f"{label} file does not exist: {path}")
        image = decode_image_png(Path(self.image_path).read_bytes())
        resize = self.resize if self.resize is not None else resize_default
        image = resize_long_edge(image, resize)
        mask = decode_mask_png(Path(self.mask_path).read_bytes())
        if resize and mask.shape != image.shape[:2]:
            # Masks are resized with the image so a case keeps one geometry.
            from PIL import Image as PILImage

            pil = PILImage.fromarray(mask.astype(np.uint8) * 255, mode="L")
            pil = pil.resize((image.shape[1], image.shape[0]), PILImage.NEAREST)
            mask = np.asarray(pil) > 127
        if mask.shape != image.shape[:2]:
            raise InvalidInputError(
                f"mask {mask.shape} does not match image {image.shape[:2]} ({self.mask_path})"
            )
        pairs = load_points_json(Path(self.points_path).read_text())
        problems = validate_pairs_in_bounds(pairs, image.shape[1], image.shape[0])
        if problems:
            raise InvalidInputError("; ".join(problems))
        return image, mask, pairs

    @staticmethod
    def from_json_file(path: Path) -> "CaseSpec":
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidInputError(f"case file {path} unreadable: {exc}") from exc
        base = path.parent

        def resolve(key):
            if key not in doc:
                raise InvalidInputError(f"case file {path} is missing {key!r}")
            return base / doc[key]

        name = path.name
        for suffix in (".case.json", ".json"):
            if name.endswith(suffix):
                name = name[: -len(suffix)]
                break
        return CaseSpec(
            image_path=resolve("image"),
            mask_path=resolve("mask"),
            points_path=resolve("points"),
            backend=doc.get("backend"),
            r1=doc.get("r1"),
            r2=doc.get("r2"),
            epsilon=doc.get("epsilon"),
            neighbors=doc.get("neighbors"),
            resize=doc.get("resize"),
            name=doc.get("name", name),
        )


def discover_cases(cases_dir: Path) -> list[CaseSpec]:
    cases_dir = Path(cases_dir)
    if not cases_dir.is_dir():
        raise InvalidInputError(f"case directory does not exist: {cases_dir}")
    specs = [CaseSpec.from_json_file(p) for p in sorted(cases_dir.glob("*.case.json"))]
    if not specs:
        raise InvalidInputError(f"no case files (*.case.json) found in {cases_dir}")
    return specs


@dataclass
class ServiceConfig:
    """Parsed service configuration.

    The file is plain ``key = value`` lines with ``#`` comments. Remote
    inpainting backends are declared as ``backend.<name> = <url>``.
    """

    listen: str = "127.0.0.1:8601"
    segmenter_url: str | None = None
    resize_long_edge: int = 512
    session_ttl_seconds: float = 1800.0
    history_bound: int = 8
    backend_endpoints: dict[str, str] = field(default_factory=dict)

    @staticmethod
    def load(path: str | os.PathLike | None) -> "ServiceConfig":
        cfg = ServiceConfig()
        if path is None:
            path = os.environ.get(CONFIG_ENV_VAR)
        if path is None:
            return cfg
        path = Path(path)
        if not path.is_file():
            raise InvalidInputError(f"config file does not exist: {path}")
        for lineno, raw in enumerate(path.read_text().splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidInputError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            try:
                if key == "listen":
                    cfg.listen = value
                elif key == "segmenter_url":
                    cfg.segmenter_url = value or None
                elif key == "resize_long_edge":
                    cfg.resize_long_edge = int(value)
                elif key == "session_ttl_seconds":
                    cfg.session_ttl_seconds = float(value)
                elif key == "history_bound":
                    cfg.history_bound = int(value)
                elif key.startswith("backend."):
                    cfg.backend_endpoints[key.split(".", 1)[1]] = value
                else:
                    raise InvalidInputError(f"{path}:{lineno}: unknown key {key!r}")
            except ValueError as exc:
                raise InvalidInputError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
        return cfg

    def host_port(self) -> tuple[str, int]:
        host, _, port = self.listen.rpartition(":")
        if not host or not port.isdigit():
            raise InvalidInputError(f"listen address must be host:port, got {self.listen!r}")
        return host, int(port)
