"""Extrusion: turn flat intensity frames into height fields over the grid.

The floor of the arena is a per-pixel background model; anything standing
on it becomes a mound whose height is the clamped difference between the
frame and the background.  Grid resolution equals pixel resolution.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import LoadError
from .frames import Frame, read_pgm, write_pgm

DEFAULT_MOTION_EPSILON = 2.0


@dataclass(eq=False)
class ExtrudedFrame:
    """Height field for one frame; heights is a (height, width) float array, >= 0."""

    width: int
    height: int
    heights: np.ndarray
    index: int = 0

    def __post_init__(self) -> None:
        self.heights = np.asarray(self.heights, dtype=np.float64)
        if self.heights.shape != (self.height, self.width):
            raise ValueError(
                f"height array shape {self.heights.shape} does not match "
                f"declared {self.height}x{self.width}"
            )


def estimate_background(frames: list[Frame]) -> np.ndarray:
    """Per-pixel median intensity across the sequence.

    Uses the lower median for even-length sequences so the background is
    always an actual observed pixel value; backgrounds therefore stay
    integer-valued and downstream height fields stay exact.
    """
    if not frames:
        raise ValueError("cannot estimate a background from an empty sequence")
    stack = np.stack([f.pixels for f in frames])
    kth = (len(frames) - 1) // 2
    return np.partition(stack, kth, axis=0)[kth]


def extrude(frame: Frame, background: np.ndarray) -> ExtrudedFrame:
    """Height field: height(cell) = max(0, intensity - background(cell))."""
    background = np.asarray(background)
    if background.shape != frame.pixels.shape:
        raise ValueError(
            f"background shape {background.shape} does not match frame "
            f"shape {frame.pixels.shape}"
        )
    heights = np.maximum(
        frame.pixels.astype(np.float64) - background.astype(np.float64), 0.0
    )
    return ExtrudedFrame(
        width=frame.width, height=frame.height, heights=heights, index=frame.index
    )


def extrude_sequence(frames: list[Frame], background: np.ndarray) -> list[ExtrudedFrame]:
    return [extrude(f, background) for f in frames]


def motion_mask(extruded_window: list[ExtrudedFrame], epsilon: float) -> np.ndarray:
    """Per-cell moving/static flags over a window of consecutive height fields.

    A cell is moving iff the maximum absolute height difference across any
    consecutive pair in the window exceeds epsilon.  Returns a boolean
    (height, width) array, True = moving.
    """
    if len(extruded_window) < 2:
        raise ValueError("motion mask needs a window of at least 2 frames")
    stack = np.stack([e.heights for e in extruded_window])
    diffs = np.abs(np.diff(stack, axis=0))
    return diffs.max(axis=0) > epsilon


def save_extruded(extruded: ExtrudedFrame, path: str | os.PathLike) -> None:
    """Persist a height field as PGM of clamped heights plus a JSON sidecar.

    Heights produced by extrude() from 8-bit frames over an integer
    background are integers in [0, 255], so the PGM raster reconstructs
    them exactly; the sidecar records the pre-clamp maximum.
    """
    quantized = np.clip(np.rint(extruded.heights), 0, 255).astype(np.uint8)
    write_pgm(quantized, path)
    sidecar = {"max_height": float(extruded.heights.max(initial=0.0))}
    with open(f"{os.fspath(path)}.json", "w") as fh:
        json.dump(sidecar, fh, sort_keys=True)
        fh.write("\n")


def load_extruded(path: str | os.PathLike, index: int = 0) -> ExtrudedFrame:
    pixels = read_pgm(path)
    sidecar_path = f"{os.fspath(path)}.json"
    try:
        with open(sidecar_path) as fh:
            json.load(fh)
    except OSError as exc:
        raise LoadError(f"missing extrusion sidecar {sidecar_path}") from exc
    h, w = pixels.shape
    return ExtrudedFrame(width=w, height=h, heights=pixels.astype(np.float64), index=index)
