"""Frame persistence and sequence handling.

Frames are 8-bit grayscale grids stored as binary PGM (P5, maxval 255).
A sequence is described by a JSON manifest:

    {"fps": int, "width": int, "height": int, "frames": [relative paths]}

Loading, rate standardization, and one-in-three frame skipping are pure
functions over frame lists.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import LoadError


@dataclass(eq=False)
class Frame:
    """One grayscale frame; pixels is a (height, width) uint8 array."""

    width: int
    height: int
    pixels: np.ndarray
    index: int = 0

    def __post_init__(self) -> None:
        self.pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.pixels.shape != (self.height, self.width):
            raise ValueError(
                f"pixel array shape {self.pixels.shape} does not match "
                f"declared {self.height}x{self.width}"
            )


@dataclass
class SequenceManifest:
    fps: int
    width: int
    height: int
    frame_paths: list[str] = field(default_factory=list)


def write_pgm(pixels: np.ndarray, path: str | os.PathLike) -> None:
    """Write a (height, width) uint8 array as binary PGM, maxval 255."""
    arr = np.asarray(pixels, dtype=np.uint8)
    if arr.ndim != 2:
        raise ValueError("PGM frames must be 2-dimensional")
    h, w = arr.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(arr.tobytes())


def read_pgm(path: str | os.PathLike) -> np.ndarray:
    """Read a binary PGM (P5, maxval 255) into a uint8 array."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise LoadError(f"cannot read frame file {path}: {exc}") from exc

    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4 and pos < len(data):
        # Skip whitespace and comment lines in the header.
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    if len(tokens) < 4 or tokens[0] != b"P5":
        raise LoadError(f"{path} is not a binary PGM (P5) file")
    try:
        w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError as exc:
        raise LoadError(f"malformed PGM header in {path}") from exc
    if maxval != 255:
        raise LoadError(f"{path}: unsupported PGM maxval {maxval} (expected 255)")
    pos += 1  # single whitespace byte after maxval
    raster = data[pos : pos + w * h]
    if len(raster) != w * h:
        raise LoadError(f"{path}: truncated raster ({len(raster)} of {w * h} bytes)")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w).copy()


def save_sequence(
    frames: list[Frame], directory: str | os.PathLike, fps: int
) -> str:
    """Write frames as PGM files plus a manifest; returns the manifest path."""
    directory = os.fspath(directory)
    os.makedirs(directory, exist_ok=True)
    paths = []
    for i, frame in enumerate(frames):
        name = f"frame_{i:05d}.pgm"
        write_pgm(frame.pixels, os.path.join(directory, name))
        paths.append(name)
    if frames:
        width, height = frames[0].width, frames[0].height
    else:
        width = height = 0
    manifest_path = os.path.join(directory, "manifest.json")
    manifest = {"fps": fps, "width": width, "height": height, "frames": paths}
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path


def load_manifest(manifest_path: str | os.PathLike) -> SequenceManifest:
    try:
        with open(manifest_path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise LoadError(f"cannot read manifest {manifest_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise LoadError(f"manifest {manifest_path} is not valid JSON: {exc}") from exc
    for key in ("fps", "width", "height", "frames"):
        if key not in raw:
            raise LoadError(f"manifest {manifest_path} is missing key '{key}'")
    return SequenceManifest(
        fps=int(raw["fps"]),
        width=int(raw["width"]),
        height=int(raw["height"]),
        frame_paths=list(raw["frames"]),
    )


def load_sequence(manifest_path: str | os.PathLike) -> list[Frame]:
    """Load all frames referenced by a manifest, in order, indices 0..n-1.

    Raises LoadError naming the offending file on a missing frame or a
    dimension mismatch against the manifest's declared width/height.
    """
    manifest = load_manifest(manifest_path)
    base = os.path.dirname(os.fspath(manifest_path))
    frames = []
    for i, rel in enumerate(manifest.frame_paths):
        path = os.path.join(base, rel)
        pixels = read_pgm(path)
        h, w = pixels.shape
        if (w, h) != (manifest.width, manifest.height):
            raise LoadError(
                f"frame {rel} is {w}x{h} but the sequence is declared "
                f"{manifest.width}x{manifest.height}"
            )
        frames.append(Frame(width=w, height=h, pixels=pixels, index=i))
    return frames


def skip_frames(frames: list[Frame]) -> list[Frame]:
    """Drop every third frame (input positions 2, 5, 8, ...), re-indexed densely."""
    kept = [f for pos, f in enumerate(frames) if pos % 3 != 2]
    return [
        Frame(width=f.width, height=f.height, pixels=f.pixels, index=i)
        for i, f in enumerate(kept)
    ]


def standardize_rate(
    frames: list[Frame], source_fps: int, target_fps: int
) -> list[Frame]:
    """Decimate to a lower frame rate by keeping every (source/target)-th frame.

    No interpolation: target_fps must divide source_fps.
    """
    if target_fps <= 0 or source_fps <= 0:
        raise ValueError("frame rates must be positive")
    if target_fps > source_fps:
        raise ValueError(
            f"target rate {target_fps} exceeds source rate {source_fps}"
        )
    if source_fps % target_fps != 0:
        raise ValueError(
            f"source rate {source_fps} is not divisible by target rate "
            f"{target_fps}; interpolation is not supported"
        )
    stride = source_fps // target_fps
    kept = frames[::stride]
    return [
        Frame(width=f.width, height=f.height, pixels=f.pixels, index=i)
        for i, f in enumerate(kept)
    ]
