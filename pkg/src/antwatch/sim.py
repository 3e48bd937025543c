"""Deterministic synthetic colony simulator.

Substitutes for video capture: ants, larvae, and foreign entities move on a
discrete arena under a seeded RNG, frames are rendered as grayscale grids,
and ground truth (positions plus influence events) is exported for
verification.

Movement model: each mobile agent takes one move per frame from the 9-move
set (stay + 8 neighbors).  With no other agent within influence_radius the
move is uniform over the 9; otherwise, with probability attraction_strength
the agent picks uniformly among the moves that strictly decrease Euclidean
distance to the nearest in-radius agent, else uniformly over all 9.  Moves
that would leave the arena are resampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .frames import Frame
from .grid import MOVE_DELTAS, MOVES, euclidean, in_bounds

SCENARIO_KINDS = (
    "foreign-entity",
    "larval-foreign",
    "larval-local",
    "mature-foreign",
    "combined",
)

KIND_ANT = "ant"
KIND_LARVA = "larva"
KIND_FOREIGN = "foreign"

_LARVA_CLUSTER_RADIUS = 3
_CLUSTER_SEPARATION = 10
_BLOB_HALF = 1  # agents render as 3x3 blobs


@dataclass(frozen=True)
class ScenarioConfig:
    scenario_kind: str
    arena_width: int
    arena_height: int
    n_ants: int
    n_larvae: int
    n_foreign: int
    influence_radius: float = 5.0
    attraction_strength: float = 0.0
    blob_intensity: int = 200
    background_intensity: int = 40
    rng_seed: int = 0
    n_frames: int = 100
    fps: int = 30
    n_larva_clusters: int = 1

    def validate(self) -> None:
        if self.scenario_kind not in SCENARIO_KINDS:
            raise ValueError(f"unknown scenario kind {self.scenario_kind!r}")
        if self.arena_width < 8 or self.arena_height < 8:
            raise ValueError("arena must be at least 8x8 cells")
        if min(self.n_ants, self.n_larvae, self.n_foreign) < 0:
            raise ValueError("agent counts must be non-negative")
        if not (0 <= self.background_intensity < self.blob_intensity <= 255):
            raise ValueError("blob_intensity must exceed background_intensity (both 0-255)")
        if not (0.0 <= self.attraction_strength < 1.0):
            raise ValueError("attraction_strength must lie in [0, 1)")
        if self.influence_radius <= 0:
            raise ValueError("influence_radius must be positive")
        if self.n_frames < 0 or self.fps <= 0:
            raise ValueError("n_frames must be >= 0 and fps positive")
        if self.n_larva_clusters < 1:
            raise ValueError("n_larva_clusters must be >= 1")
        total = self.n_ants + self.n_larvae + self.n_foreign
        if total > self.arena_width * self.arena_height:
            raise ValueError(
                f"{total} agents do not fit an arena of "
                f"{self.arena_width * self.arena_height} cells"
            )


@dataclass
class Agent:
    agent_id: int
    kind: str
    x: int
    y: int
    mobile: bool


@dataclass
class InfluenceEvent:
    """Influence acting on an agent during the step out of frame `frame`."""

    frame: int
    agent_id: int
    category: str  # "ant" or "entity"; the simulator never emits "other"


@dataclass
class SimState:
    frame_index: int
    agents: list[Agent]
    rng: np.random.Generator
    larva_cluster_centers: list[tuple[int, int]] = field(default_factory=list)
    events: list[InfluenceEvent] = field(default_factory=list)


def scenario_preset(kind: str, rng_seed: int = 0, n_frames: int = 200) -> ScenarioConfig:
    """Representative configuration for each of the five observation cases."""
    base = dict(
        scenario_kind=kind,
        arena_width=48,
        arena_height=48,
        influence_radius=5.0,
        attraction_strength=0.5,
        rng_seed=rng_seed,
        n_frames=n_frames,
    )
    counts = {
        "foreign-entity": dict(n_ants=6, n_larvae=0, n_foreign=1),
        "larval-foreign": dict(n_ants=6, n_larvae=1, n_foreign=0),
        "larval-local": dict(n_ants=6, n_larvae=6, n_foreign=0, n_larva_clusters=3),
        "mature-foreign": dict(n_ants=6, n_larvae=0, n_foreign=2),
        "combined": dict(n_ants=6, n_larvae=4, n_foreign=1, n_larva_clusters=2),
    }
    if kind not in counts:
        raise ValueError(f"unknown scenario kind {kind!r}")
    return ScenarioConfig(**base, **counts[kind])


def _place_distinct(rng: np.random.Generator, occupied: set, width: int, height: int) -> tuple[int, int]:
    while True:
        x = int(rng.integers(width))
        y = int(rng.integers(height))
        if (x, y) not in occupied:
            return x, y


def _cluster_centers(rng: np.random.Generator, config: ScenarioConfig, k: int) -> list[tuple[int, int]]:
    margin = _LARVA_CLUSTER_RADIUS
    centers: list[tuple[int, int]] = []
    for _ in range(k):
        best = None
        for _ in range(200):
            cx = int(rng.integers(margin, config.arena_width - margin))
            cy = int(rng.integers(margin, config.arena_height - margin))
            if all(euclidean((cx, cy), c) >= _CLUSTER_SEPARATION for c in centers):
                best = (cx, cy)
                break
            best = (cx, cy)  # best effort on crowded arenas
        centers.append(best)
    return centers


def _disc_cells(center: tuple[int, int], radius: int, width: int, height: int) -> list[tuple[int, int]]:
    cx, cy = center
    cells = []
    for y in range(max(0, cy - radius), min(height, cy + radius + 1)):
        for x in range(max(0, cx - radius), min(width, cx + radius + 1)):
            if (x - cx) ** 2 + (y - cy) ** 2 <= radius**2:
                cells.append((x, y))
    return cells


def init_scenario(config: ScenarioConfig) -> SimState:
    """Place agents at distinct seeded-random cells; larvae clustered in discs.

    Agent ids run ants first, then larvae, then foreign entities.  Larvae
    are distributed round-robin over n_larva_clusters discs of radius 3 and
    are immobile for the whole run; ants and foreign entities are mobile.
    """
    config.validate()
    rng = np.random.default_rng(config.rng_seed)
    agents: list[Agent] = []
    occupied: set[tuple[int, int]] = set()
    next_id = 0

    for _ in range(config.n_ants):
        x, y = _place_distinct(rng, occupied, config.arena_width, config.arena_height)
        occupied.add((x, y))
        agents.append(Agent(next_id, KIND_ANT, x, y, mobile=True))
        next_id += 1

    centers: list[tuple[int, int]] = []
    if config.n_larvae > 0:
        k = min(config.n_larva_clusters, config.n_larvae)
        centers = _cluster_centers(rng, config, k)
        discs = [
            sorted(
                _disc_cells(c, _LARVA_CLUSTER_RADIUS, config.arena_width, config.arena_height),
                key=lambda cell: (cell[1], cell[0]),
            )
            for c in centers
        ]
        per_cluster = [config.n_larvae // k + (1 if i < config.n_larvae % k else 0) for i in range(k)]
        for i, want in enumerate(per_cluster):
            free = [c for c in discs[i] if c not in occupied]
            if want > len(free):
                raise ValueError(
                    f"larva cluster {i} needs {want} free cells but its disc has {len(free)}"
                )
        for j in range(config.n_larvae):
            disc = discs[j % k]
            while True:
                x, y = disc[int(rng.integers(len(disc)))]
                if (x, y) not in occupied:
                    break
            occupied.add((x, y))
            agents.append(Agent(next_id, KIND_LARVA, x, y, mobile=False))
            next_id += 1

    for _ in range(config.n_foreign):
        x, y = _place_distinct(rng, occupied, config.arena_width, config.arena_height)
        occupied.add((x, y))
        agents.append(Agent(next_id, KIND_FOREIGN, x, y, mobile=True))
        next_id += 1

    return SimState(frame_index=0, agents=agents, rng=rng, larva_cluster_centers=centers)


def _nearest_in_radius(agent: Agent, others: list[Agent], radius: float) -> Agent | None:
    best = None
    best_key = None
    for other in others:
        if other.agent_id == agent.agent_id:
            continue
        d = math.hypot(other.x - agent.x, other.y - agent.y)
        if d <= radius:
            key = (d, other.agent_id)
            if best_key is None or key < best_key:
                best, best_key = other, key
    return best


def _decreasing_moves(agent: Agent, target: Agent) -> list[str]:
    d0 = math.hypot(target.x - agent.x, target.y - agent.y)
    out = []
    for move in MOVES:
        dx, dy = MOVE_DELTAS[move]
        if math.hypot(target.x - (agent.x + dx), target.y - (agent.y + dy)) < d0:
            out.append(move)
    return out


def _draw_move(
    rng: np.random.Generator,
    agent: Agent,
    config: ScenarioConfig,
    decreasing: list[str] | None,
) -> str:
    # Resample until the move stays in bounds (saturation at the walls).
    while True:
        if decreasing and float(rng.random()) < config.attraction_strength:
            move = decreasing[int(rng.integers(len(decreasing)))]
        else:
            move = MOVES[int(rng.integers(len(MOVES)))]
        dx, dy = MOVE_DELTAS[move]
        if in_bounds(agent.x + dx, agent.y + dy, config.arena_width, config.arena_height):
            return move


def step(state: SimState, config: ScenarioConfig) -> SimState:
    """Advance the colony by one frame.

    Targets are evaluated against the pre-step positions of all agents, in
    ascending agent id.  An influence event is recorded for every mobile
    agent with an in-radius neighbor: category "entity" when the nearest
    neighbor is a larva or foreign entity, "ant" when it is an ant.
    Consumes the input state (the RNG advances in place).
    """
    if config.n_frames and state.frame_index >= config.n_frames:
        raise ValueError("simulation already ran for n_frames steps")
    snapshot = state.agents
    events: list[InfluenceEvent] = []
    new_agents: list[Agent] = []
    for agent in snapshot:
        if not agent.mobile:
            new_agents.append(replace(agent))
            continue
        target = _nearest_in_radius(agent, snapshot, config.influence_radius)
        decreasing = None
        if target is not None:
            category = "ant" if target.kind == KIND_ANT else "entity"
            events.append(InfluenceEvent(state.frame_index, agent.agent_id, category))
            decreasing = _decreasing_moves(agent, target)
        move = _draw_move(state.rng, agent, config, decreasing)
        dx, dy = MOVE_DELTAS[move]
        new_agents.append(replace(agent, x=agent.x + dx, y=agent.y + dy))
    return SimState(
        frame_index=state.frame_index + 1,
        agents=new_agents,
        rng=state.rng,
        larva_cluster_centers=state.larva_cluster_centers,
        events=events,
    )


def render_frame(state: SimState, config: ScenarioConfig) -> Frame:
    """Render agents as 3x3 blobs of blob_intensity over the background.

    Blobs are clamped at the borders; overlaps take the maximum (which for
    constant-intensity blobs is a plain union).
    """
    pixels = np.full(
        (config.arena_height, config.arena_width),
        config.background_intensity,
        dtype=np.uint8,
    )
    for agent in state.agents:
        x0 = max(0, agent.x - _BLOB_HALF)
        x1 = min(config.arena_width, agent.x + _BLOB_HALF + 1)
        y0 = max(0, agent.y - _BLOB_HALF)
        y1 = min(config.arena_height, agent.y + _BLOB_HALF + 1)
        region = pixels[y0:y1, x0:x1]
        np.maximum(region, config.blob_intensity, out=region)
    return Frame(
        width=config.arena_width,
        height=config.arena_height,
        pixels=pixels,
        index=state.frame_index,
    )


@dataclass
class SimulationRun:
    """Full run artifacts: frames plus ground truth for verification."""

    config: ScenarioConfig
    frames: list[Frame]
    # one record per agent per frame: (frame, agent_id, kind, x, y)
    positions: list[tuple[int, int, str, int, int]]
    events: list[InfluenceEvent]
    larva_cluster_centers: list[tuple[int, int]]


def run_scenario(config: ScenarioConfig) -> SimulationRun:
    """Run a scenario end to end, collecting frames and ground truth."""
    state = init_scenario(config)
    frames: list[Frame] = []
    positions: list[tuple[int, int, str, int, int]] = []
    events: list[InfluenceEvent] = []
    for f in range(config.n_frames):
        frames.append(render_frame(state, config))
        for agent in state.agents:
            positions.append((f, agent.agent_id, agent.kind, agent.x, agent.y))
        if f < config.n_frames - 1:
            state = step(state, config)
            events.extend(state.events)
    return SimulationRun(
        config=config,
        frames=frames,
        positions=positions,
        events=events,
        larva_cluster_centers=state.larva_cluster_centers,
    )
