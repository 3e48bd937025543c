"""Stationary entity detection over windows of extruded frames.

A cell belongs to a candidate region when it is motion-free for the whole
window and its height stays at or above a threshold in every frame.
8-connected components of such cells, large enough, become zones.  Zones
found through two independent routes (raw frames and extruded heights) are
combined summatively: overlapping zones merge into their union rather than
cancelling out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .extrusion import DEFAULT_MOTION_EPSILON, ExtrudedFrame, motion_mask
from .grid import euclidean, round_half_up

DEFAULT_MIN_HEIGHT = 50.0
DEFAULT_MIN_CELLS = 4

# Merge and vote ties both resolve through the same ordering.
_LABEL_PRIORITY = {"larva": 0, "ant": 1, "unknown": 2}

_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


@dataclass
class Zone:
    zone_id: int
    cells: list[tuple[int, int]]
    centroid: tuple[int, int]
    label: str = "unknown"
    source: str = "extruded"

    def __post_init__(self) -> None:
        if self.label not in _LABEL_PRIORITY:
            raise ValueError(f"unknown zone label {self.label!r}")
        self.cells = sorted(self.cells)

    @property
    def cell_set(self) -> set[tuple[int, int]]:
        return set(self.cells)


def zone_centroid(cells: list[tuple[int, int]]) -> tuple[int, int]:
    """Mean cell position, each coordinate rounded half up."""
    if not cells:
        raise ValueError("a zone needs at least one cell")
    xs = [c[0] for c in cells]
    ys = [c[1] for c in cells]
    return (round_half_up(sum(xs) / len(xs)), round_half_up(sum(ys) / len(ys)))


def detect_zones(
    window: list[ExtrudedFrame],
    epsilon: float = DEFAULT_MOTION_EPSILON,
    min_height: float = DEFAULT_MIN_HEIGHT,
    min_cells: int = DEFAULT_MIN_CELLS,
    source: str = "extruded",
) -> list[Zone]:
    """Find stationary zones across a window of at least two extruded frames.

    Zones come back ordered by first cell in row-major scan order, with ids
    assigned in that order starting at 0.
    """
    if len(window) < 2:
        raise ValueError("stationary detection needs a window of at least 2 frames")
    if min_cells < 1:
        raise ValueError("min_cells must be >= 1")
    moving = motion_mask(window, epsilon)
    stack = np.stack([f.heights for f in window])
    tall = (stack >= min_height).all(axis=0)
    candidate = tall & ~moving
    labels, count = ndimage.label(candidate, structure=_EIGHT_CONNECTED)
    zones: list[Zone] = []
    for component in range(1, count + 1):
        ys, xs = np.nonzero(labels == component)
        cells = [(int(x), int(y)) for x, y in zip(xs, ys)]
        if len(cells) < min_cells:
            continue
        zones.append(
            Zone(
                zone_id=len(zones),
                cells=cells,
                centroid=zone_centroid(cells),
                source=source,
            )
        )
    return zones


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def merge_zone_pair(a: Zone, b: Zone, zone_id: int) -> Zone:
    """Union of two zones; informative labels win over 'unknown'."""
    cells = sorted(a.cell_set | b.cell_set)
    label = min((a.label, b.label), key=_LABEL_PRIORITY.__getitem__)
    return Zone(
        zone_id=zone_id,
        cells=cells,
        centroid=zone_centroid(cells),
        label=label,
        source="merged",
    )


def merge_zones(primary: list[Zone], secondary: list[Zone]) -> list[Zone]:
    """Summative merge of two detections of the same window.

    Any zones sharing at least one cell (within or across the lists)
    collapse into a single zone covering their union, labelled by the
    highest-priority label among the members and marked source "merged".
    Non-overlapping zones pass through unchanged apart from renumbering.
    Output is sorted by first cell in row-major order and re-numbered
    from 0.
    """
    pool = list(primary) + list(secondary)
    if not pool:
        return []
    cell_owner: dict[tuple[int, int], int] = {}
    uf = _UnionFind(len(pool))
    for i, zone in enumerate(pool):
        for cell in zone.cells:
            if cell in cell_owner:
                uf.union(cell_owner[cell], i)
            else:
                cell_owner[cell] = i
    groups: dict[int, list[Zone]] = {}
    for i, zone in enumerate(pool):
        groups.setdefault(uf.find(i), []).append(zone)

    merged: list[Zone] = []
    for members in groups.values():
        if len(members) == 1:
            z = members[0]
            merged.append(Zone(0, list(z.cells), z.centroid, z.label, z.source))
        else:
            cells = sorted(set().union(*(m.cell_set for m in members)))
            label = min((m.label for m in members), key=_LABEL_PRIORITY.__getitem__)
            merged.append(Zone(0, cells, zone_centroid(cells), label, "merged"))
    merged.sort(key=lambda z: (z.cells[0][1], z.cells[0][0]))
    for i, zone in enumerate(merged):
        zone.zone_id = i
    return merged


@dataclass(frozen=True)
class LabeledPoint:
    """Reference example for nearest-neighbor zone labelling."""

    point_id: int
    position: tuple[int, int]
    label: str


def knn_label(
    query: tuple[int, int],
    references: list[LabeledPoint],
    k: int = 3,
) -> str:
    """Majority label among the k nearest references by Euclidean distance.

    Equidistant references rank by lower id; a tied vote resolves by label
    priority (larva, then ant, then unknown).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not references:
        return "unknown"
    ranked = sorted(references, key=lambda r: (euclidean(query, r.position), r.point_id))
    votes: dict[str, int] = {}
    for ref in ranked[:k]:
        votes[ref.label] = votes.get(ref.label, 0) + 1
    best = max(votes.items(), key=lambda kv: (kv[1], -_LABEL_PRIORITY[kv[0]]))
    return best[0]


def label_zones(zones: list[Zone], references: list[LabeledPoint], k: int = 3) -> list[Zone]:
    """Assign each zone the KNN label of its centroid (new Zone objects)."""
    out = []
    for zone in zones:
        label = knn_label(zone.centroid, references, k)
        out.append(Zone(zone.zone_id, list(zone.cells), zone.centroid, label, zone.source))
    return out


def zones_to_json(zones: list[Zone]) -> list[dict]:
    return [
        {
            "zone_id": z.zone_id,
            "cells": [[x, y] for x, y in z.cells],
            "centroid": [z.centroid[0], z.centroid[1]],
            "label": z.label,
            "source": z.source,
        }
        for z in zones
    ]


def zones_from_json(records: list[dict]) -> list[Zone]:
    zones = []
    for rec in records:
        zones.append(
            Zone(
                zone_id=int(rec["zone_id"]),
                cells=[(int(x), int(y)) for x, y in rec["cells"]],
                centroid=(int(rec["centroid"][0]), int(rec["centroid"][1])),
                label=rec["label"],
                source=rec.get("source", "extruded"),
            )
        )
    return zones
