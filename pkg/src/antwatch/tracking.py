"""Per-ant trails from frame-by-frame blob centroids.

Association is greedy nearest neighbor: in each frame the tracks, visited
in ascending id, claim the closest unclaimed blob within a Chebyshev step
bound.  A track with nothing admissible repeats its last cell and flags
the point interpolated, so short occlusions do not end a trail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .extrusion import ExtrudedFrame
from .grid import chebyshev, euclidean, round_half_up

DEFAULT_MAX_STEP = 3

_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class TrackPoint:
    frame: int
    x: int
    y: int
    interpolated: bool = False

    @property
    def cell(self) -> tuple[int, int]:
        return (self.x, self.y)


@dataclass
class Track:
    track_id: int
    points: list[TrackPoint]

    def cells(self) -> list[tuple[int, int]]:
        return [p.cell for p in self.points]

    def check(self, max_step: int) -> None:
        for prev, cur in zip(self.points, self.points[1:]):
            if cur.frame <= prev.frame:
                raise ValueError(f"track {self.track_id}: frames not strictly increasing")
            if chebyshev(prev.cell, cur.cell) > max_step:
                raise ValueError(
                    f"track {self.track_id}: step {prev.cell}->{cur.cell} exceeds {max_step}"
                )


@dataclass(frozen=True)
class StationarySegment:
    track_id: int
    start_frame: int
    end_frame: int
    anchor_cell: tuple[int, int]


def frame_blobs(
    frame: ExtrudedFrame,
    threshold: float,
    min_cells: int = 1,
    exclude: set[tuple[int, int]] | None = None,
) -> list[tuple[int, int]]:
    """Centroids of 8-connected components with height above threshold.

    Cells in `exclude` (typically known stationary zones) are masked out
    before labelling, so parked entities do not produce moving-blob
    candidates.  Centroids come back in row-major order of each
    component's first cell.
    """
    mask = frame.heights >= threshold
    if exclude:
        for x, y in exclude:
            if 0 <= y < mask.shape[0] and 0 <= x < mask.shape[1]:
                mask[y, x] = False
    labels, count = ndimage.label(mask, structure=_EIGHT_CONNECTED)
    out: list[tuple[int, int]] = []
    for component in range(1, count + 1):
        ys, xs = np.nonzero(labels == component)
        if len(xs) < min_cells:
            continue
        out.append((round_half_up(xs.mean()), round_half_up(ys.mean())))
    return out


def track_entities(
    blob_frames: list[list[tuple[int, int]]],
    n_tracks: int,
    max_step: int = DEFAULT_MAX_STEP,
) -> list[Track]:
    """Follow n_tracks blobs through a sequence of per-frame centroid lists.

    Tracks seed from the first n_tracks blobs of frame 0 in list order.
    In every later frame tracks claim blobs greedily in ascending
    track_id: the admissible blobs lie within Chebyshev max_step of the
    track's current cell, and the claim goes to the Euclidean-nearest
    (ties to the lower blob index).  With no admissible blob the track
    coasts on its current cell with interpolated=True.
    """
    if n_tracks < 1:
        raise ValueError("n_tracks must be >= 1")
    if not blob_frames:
        raise ValueError("no frames to track over")
    if len(blob_frames[0]) < n_tracks:
        raise ValueError(
            f"frame 0 has {len(blob_frames[0])} blobs, need at least {n_tracks}"
        )
    tracks = [
        Track(i, [TrackPoint(0, blob_frames[0][i][0], blob_frames[0][i][1])])
        for i in range(n_tracks)
    ]
    for frame_index, blobs in enumerate(blob_frames[1:], start=1):
        claimed: set[int] = set()
        for track in tracks:
            here = track.points[-1].cell
            best = None
            best_key = None
            for j, blob in enumerate(blobs):
                if j in claimed or chebyshev(here, blob) > max_step:
                    continue
                key = (euclidean(here, blob), j)
                if best_key is None or key < best_key:
                    best, best_key = j, key
            if best is None:
                track.points.append(TrackPoint(frame_index, here[0], here[1], True))
            else:
                claimed.add(best)
                bx, by = blobs[best]
                track.points.append(TrackPoint(frame_index, bx, by))
    return tracks


def stationary_segments(
    track: Track,
    eps: int,
    min_len: int,
) -> list[StationarySegment]:
    """Greedy maximal runs whose cells all stay within Chebyshev eps of the
    run's first cell, kept when the frame span reaches min_len."""
    points = track.points
    segments: list[StationarySegment] = []
    i = 0
    while i < len(points):
        anchor = points[i].cell
        j = i
        while j + 1 < len(points) and chebyshev(anchor, points[j + 1].cell) <= eps:
            j += 1
        if points[j].frame - points[i].frame >= min_len:
            segments.append(
                StationarySegment(track.track_id, points[i].frame, points[j].frame, anchor)
            )
            i = j + 1
        else:
            i += 1
    return segments


def tracks_to_records(tracks: list[Track]) -> list[dict]:
    records = []
    for track in tracks:
        for p in track.points:
            records.append(
                {
                    "track": track.track_id,
                    "frame": p.frame,
                    "x": p.x,
                    "y": p.y,
                    "interpolated": p.interpolated,
                }
            )
    return records


def tracks_from_records(records: list[dict]) -> list[Track]:
    by_id: dict[int, list[TrackPoint]] = {}
    for rec in records:
        by_id.setdefault(int(rec["track"]), []).append(
            TrackPoint(int(rec["frame"]), int(rec["x"]), int(rec["y"]), bool(rec["interpolated"]))
        )
    tracks = []
    for track_id in sorted(by_id):
        points = sorted(by_id[track_id], key=lambda p: p.frame)
        tracks.append(Track(track_id, points))
    return tracks
