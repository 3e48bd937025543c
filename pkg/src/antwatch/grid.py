"""Grid geometry: the 9-move set, direction octants, and distance helpers.

Cells are (x, y) pairs with x the column and y the row; y grows downward
(image convention), so the compass direction N points toward smaller y.
"""

from __future__ import annotations

import math

# Canonical move order. Used everywhere a deterministic iteration order or
# tie-break over moves is needed.
MOVES: tuple[str, ...] = ("stay", "N", "NE", "E", "SE", "S", "SW", "W", "NW")

MOVE_DELTAS: dict[str, tuple[int, int]] = {
    "stay": (0, 0),
    "N": (0, -1),
    "NE": (1, -1),
    "E": (1, 0),
    "SE": (1, 1),
    "S": (0, 1),
    "SW": (-1, 1),
    "W": (-1, 0),
    "NW": (-1, -1),
}

_DELTA_TO_MOVE = {delta: move for move, delta in MOVE_DELTAS.items()}

# Octant order by increasing atan2(dy, dx) angle; with y growing downward
# the sweep starts at East and passes through South first.
_OCTANTS = ("E", "SE", "S", "SW", "W", "NW", "N", "NE")


def displacement_move(dx: int, dy: int) -> str:
    """Map an arbitrary displacement to one of the 9 moves.

    Unit displacements (and zero) map to their move directly.  Larger jumps
    take the floor octant of their angle: sector k covers [45k, 45k+45)
    degrees of atan2(dy, dx) and carries the compass name of its lower
    edge, so for example (2, 1) at about 27 degrees falls in [0, 45) and
    maps to E.
    """
    if dx == 0 and dy == 0:
        return "stay"
    if abs(dx) <= 1 and abs(dy) <= 1:
        return _DELTA_TO_MOVE[(dx, dy)]
    sx = (dx > 0) - (dx < 0)
    sy = (dy > 0) - (dy < 0)
    if dx == 0 or dy == 0 or abs(dx) == abs(dy):
        # Exact axis or diagonal: avoid float round-off entirely.
        return _DELTA_TO_MOVE[(sx, sy)]
    theta = math.degrees(math.atan2(dy, dx)) % 360.0
    return _OCTANTS[int(theta // 45.0)]


def chebyshev(a: tuple[int, int], b: tuple[int, int]) -> int:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def euclidean(a: tuple[int, int], b: tuple[int, int]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def in_bounds(x: int, y: int, width: int, height: int) -> bool:
    return 0 <= x < width and 0 <= y < height


def clamp_cell(x: int, y: int, width: int, height: int) -> tuple[int, int]:
    return (min(max(x, 0), width - 1), min(max(y, 0), height - 1))


def round_half_up(value: float) -> int:
    """Round with .5 going up (Python's round() rounds halves to even)."""
    return math.floor(value + 0.5)
