"""Movement states, influence categories, and the Markov transition model.

A state is a cell plus the move taken out of it.  Observed states carry an
influence category (ant, entity, other) assigned by proximity; category
probabilities for an arbitrary query state are estimated from similar
observed states with Laplace smoothing, and consecutive states feed a
smoothed transition model over the nine geometrically admissible
successors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .detection import Zone
from .grid import MOVE_DELTAS, MOVES, clamp_cell, displacement_move, euclidean
from .tracking import Track

CATEGORIES = ("ant", "entity", "other")

DEFAULT_SIMILARITY_RADIUS = 5.0
DEFAULT_INFLUENCE_RADIUS = 5.0


class MovementState(NamedTuple):
    x: int
    y: int
    move: str

    @property
    def cell(self) -> tuple[int, int]:
        return (self.x, self.y)


class StateTriple(NamedTuple):
    p_ant: float
    p_entity: float
    p_other: float

    def check(self) -> None:
        if min(self) < 0:
            raise ValueError("probabilities must be non-negative")
        if abs(sum(self) - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {sum(self)}, not 1")


UNIFORM_TRIPLE = StateTriple(1 / 3, 1 / 3, 1 / 3)


class Observation(NamedTuple):
    state: MovementState
    category: str


def discretize(track: Track) -> list[MovementState]:
    """Turn a track into states: (cell_i, octant of the step to cell_{i+1}).

    The final point, having no successor, gets move "stay".
    """
    if not track.points:
        raise ValueError("cannot discretize an empty track")
    states = []
    cells = track.cells()
    for i, cell in enumerate(cells):
        if i + 1 < len(cells):
            move = displacement_move(cells[i + 1][0] - cell[0], cells[i + 1][1] - cell[1])
        else:
            move = "stay"
        states.append(MovementState(cell[0], cell[1], move))
    return states


def influence_category(
    cell: tuple[int, int],
    zones: Iterable[Zone],
    ant_cells: Iterable[tuple[int, int]],
    radius: float = DEFAULT_INFLUENCE_RADIUS,
) -> str:
    """Category of the influence acting at a cell; entity beats ant beats other.

    Entity influence requires a larva-labelled zone centroid within the
    radius; ant influence requires another ant's position within it.
    """
    if radius <= 0:
        raise ValueError("influence radius must be positive")
    for zone in zones:
        if zone.label == "larva" and euclidean(cell, zone.centroid) <= radius:
            return "entity"
    for other in ant_cells:
        if euclidean(cell, other) <= radius:
            return "ant"
    return "other"


def sample_random_states(
    width: int,
    height: int,
    n: int,
    rng_seed: int,
) -> list[MovementState]:
    """n seeded states with cells uniform over the arena, moves uniform over 9."""
    if n < 0:
        raise ValueError("n must be >= 0")
    rng = np.random.default_rng(rng_seed)
    states = []
    for _ in range(n):
        x = int(rng.integers(width))
        y = int(rng.integers(height))
        move = MOVES[int(rng.integers(len(MOVES)))]
        states.append(MovementState(x, y, move))
    return states


def estimate_probabilities(
    query: MovementState,
    observations: Iterable[Observation],
    similarity_radius: float = DEFAULT_SIMILARITY_RADIUS,
) -> StateTriple:
    """Laplace-smoothed category frequencies over similar observations.

    Similar means the same move with the cell within similarity_radius
    (Euclidean).  Add-1 smoothing over the three categories keeps every
    component strictly positive; with no similar observations the result
    is the uniform triple.
    """
    counts = {c: 0 for c in CATEGORIES}
    n = 0
    for obs in observations:
        if obs.state.move != query.move:
            continue
        if euclidean(obs.state.cell, query.cell) > similarity_radius:
            continue
        counts[obs.category] += 1
        n += 1
    denom = n + 3
    return StateTriple(
        (counts["ant"] + 1) / denom,
        (counts["entity"] + 1) / denom,
        (counts["other"] + 1) / denom,
    )


@dataclass
class TransitionModel:
    """Transition counts between movement states with additive smoothing.

    A state's move fixes the cell it lands on (clamped at the walls), so
    each state has exactly nine admissible successors: that landing cell
    combined with each possible next move.  Row distributions smooth the
    counts over those successors only, minus any edges blocked by a prune
    correction.
    """

    width: int
    height: int
    smoothing_alpha: float = 0.0
    counts: dict[MovementState, dict[MovementState, float]] = field(default_factory=dict)
    blocked: set[tuple[MovementState, MovementState]] = field(default_factory=set)

    def __post_init__(self) -> None:
        if self.smoothing_alpha < 0:
            raise ValueError("smoothing_alpha must be >= 0")

    def landing_cell(self, state: MovementState) -> tuple[int, int]:
        dx, dy = MOVE_DELTAS[state.move]
        return clamp_cell(state.x + dx, state.y + dy, self.width, self.height)

    def admissible_successors(self, state: MovementState) -> list[MovementState]:
        """The nine successor states, in canonical move order, minus blocked."""
        nx, ny = self.landing_cell(state)
        out = []
        for move in MOVES:
            succ = MovementState(nx, ny, move)
            if (state, succ) not in self.blocked:
                out.append(succ)
        return out

    def observe_sequence(self, states: list[MovementState]) -> None:
        for a, b in zip(states, states[1:]):
            row = self.counts.setdefault(a, {})
            row[b] = row.get(b, 0.0) + 1.0

    def row(self, state: MovementState) -> dict[MovementState, float]:
        """Smoothed next-state distribution over the admissible successors.

        With zero smoothing and no observations from this state the row
        falls back to uniform over the admissible successors.
        """
        successors = self.admissible_successors(state)
        if not successors:
            raise ValueError(f"state {state} has no unblocked successors")
        raw = self.counts.get(state, {})
        alpha = self.smoothing_alpha
        total = sum(raw.get(s, 0.0) for s in successors) + alpha * len(successors)
        if total == 0.0:
            p = 1.0 / len(successors)
            return {s: p for s in successors}
        return {s: (raw.get(s, 0.0) + alpha) / total for s in successors}

    def probability(self, a: MovementState, b: MovementState) -> float:
        return self.row(a).get(b, 0.0)

    def prune_edge(self, a: MovementState, b: MovementState) -> None:
        """Zero the count for a->b and block it from smoothing forever."""
        remaining = [s for s in self.admissible_successors(a) if s != b]
        if not remaining:
            raise ValueError("cannot prune the last remaining successor")
        if a in self.counts:
            self.counts[a].pop(b, None)
        self.blocked.add((a, b))

    def boost_edge(self, a: MovementState, b: MovementState, factor: float) -> None:
        """Scale the smoothed weight of a->b by factor (> 1 strengthens it).

        Implemented as count' = factor*(count+alpha) - alpha so the
        smoothed numerator scales by exactly factor even when the raw
        count is zero.  factor == 1 leaves the model bit-identical.
        """
        if factor <= 0:
            raise ValueError("boost factor must be positive")
        if factor == 1.0:
            return
        if b not in self.admissible_successors(a):
            raise ValueError(f"{b} is not an admissible successor of {a}")
        row = self.counts.setdefault(a, {})
        count = row.get(b, 0.0)
        row[b] = factor * (count + self.smoothing_alpha) - self.smoothing_alpha

    def states(self) -> list[MovementState]:
        return sorted(self.counts)


def build_transition_model(
    sequences: Iterable[list[MovementState]],
    smoothing_alpha: float,
    width: int,
    height: int,
) -> TransitionModel:
    model = TransitionModel(width=width, height=height, smoothing_alpha=smoothing_alpha)
    for seq in sequences:
        model.observe_sequence(seq)
    return model


def triple_distance(a: StateTriple, b: StateTriple) -> float:
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))
