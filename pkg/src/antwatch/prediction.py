"""Random-walk futures over the transition model, with operator control.

A walk tree expands breadth-first from a start state; branches die when
their cumulative path probability drops below a threshold.  Trees can be
re-pruned at a stricter threshold with backtracking, edited through
prune and boost corrections that feed back into the transition model,
and smoothed across frames so improbable "other" mass drains away.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .classifier import classify
from .errors import CorrectionError, UntrainedModelError
from .grid import MOVES, euclidean, in_bounds
from .modelfile import ColonyModel
from .states import (
    MovementState,
    Observation,
    StateTriple,
    TransitionModel,
    estimate_probabilities,
)

DEFAULT_THRESHOLD = 1e-4
DEFAULT_DEPTH_LIMIT = 6
FLOOR_EPSILON = 0.1

_MOVE_ORDER = {m: i for i, m in enumerate(MOVES)}


@dataclass
class WalkNode:
    state: MovementState
    path_probability: float
    category: str
    depth: int
    children: list["WalkNode"] = field(default_factory=list)


@dataclass
class WalkTree:
    root: WalkNode
    threshold: float
    mode: str = "system"  # "system" or "user"

    def nodes(self) -> list[WalkNode]:
        """All nodes, breadth-first, siblings in insertion order."""
        out = []
        queue = deque([self.root])
        while queue:
            node = queue.popleft()
            out.append(node)
            queue.extend(node.children)
        return out


@dataclass(frozen=True)
class PredictedState:
    x: int
    y: int
    p: float
    tag: str  # "entity" (entity-induced) | "ant" (non-entity) | "other"


@dataclass
class Prediction:
    ant_id: int
    frame_index: int
    future_states: list[PredictedState]


def _tag_state(
    state: MovementState,
    model: ColonyModel,
    extra_observations: list[Observation] | None,
) -> str:
    observations = model.observations
    if extra_observations:
        observations = observations + extra_observations
    triple = estimate_probabilities(state, observations, model.similarity_radius)
    return classify(triple, model.table)[0]


def expand_walk(
    start: MovementState,
    model: ColonyModel,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
    threshold: float = DEFAULT_THRESHOLD,
    mode: str = "system",
    extra_observations: list[Observation] | None = None,
) -> WalkTree:
    """Breadth-first walk tree from a start state.

    A successor becomes a child when its transition probability is nonzero
    and the resulting path probability stays at or above the threshold.
    Children appear in canonical move order.  Every node is tagged by the
    classifier on its estimated probability triple.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must lie in (0, 1]")
    if depth_limit < 0:
        raise ValueError("depth_limit must be >= 0")
    if model.table is None:
        raise UntrainedModelError("model has no trained classifier weights")
    transitions = model.transitions
    if not transitions.admissible_successors(start):
        raise ValueError(f"state {start} has no admissible successors")

    tags: dict[MovementState, str] = {}

    def tag(state: MovementState) -> str:
        if state not in tags:
            tags[state] = _tag_state(state, model, extra_observations)
        return tags[state]

    root = WalkNode(start, 1.0, tag(start), 0)
    queue = deque([root])
    while queue:
        node = queue.popleft()
        if node.depth >= depth_limit:
            continue
        for successor, p in transitions.row(node.state).items():
            if p <= 0.0:
                continue
            path_p = node.path_probability * p
            if path_p < threshold:
                continue
            child = WalkNode(successor, path_p, tag(successor), node.depth + 1)
            node.children.append(child)
            queue.append(child)
    return WalkTree(root, threshold, mode)


def _copy_pruned(node: WalkNode, threshold: float) -> WalkNode | None:
    """Post-order rebuild dropping sub-threshold nodes and, cascading
    upward, nodes that only existed to reach them."""
    kept_children = []
    for child in node.children:
        kept = _copy_pruned(child, threshold)
        if kept is not None:
            kept_children.append(kept)
    survives = node.path_probability >= threshold
    was_internal = bool(node.children)
    if not survives or (was_internal and not kept_children):
        return None
    return WalkNode(node.state, node.path_probability, node.category, node.depth, kept_children)


def prune_walk(tree: WalkTree, threshold: float) -> WalkTree:
    """Re-prune a tree at a (typically stricter) threshold.

    Backtracking: removing a node also removes ancestors that had
    children before pruning and none after, since their subtree led only
    to eliminated states.  The root always survives.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must lie in (0, 1]")
    kept_children = []
    for child in tree.root.children:
        kept = _copy_pruned(child, threshold)
        if kept is not None:
            kept_children.append(kept)
    root = WalkNode(
        tree.root.state,
        tree.root.path_probability,
        tree.root.category,
        tree.root.depth,
        kept_children,
    )
    return WalkTree(root, threshold, tree.mode)


def _find_path(tree: WalkTree, path: list[MovementState]) -> WalkNode:
    if not path or path[0] != tree.root.state:
        raise CorrectionError("branch path does not start at the tree root")
    node = tree.root
    for want in path[1:]:
        for child in node.children:
            if child.state == want:
                node = child
                break
        else:
            raise CorrectionError(f"branch path leaves the tree at {want}")
    return node


def apply_correction(
    model: ColonyModel,
    tree: WalkTree,
    kind: str,
    path: list[MovementState],
    factor: float = 2.0,
) -> None:
    """Apply an operator correction to the transition model.

    The branch path runs from the tree root to the corrected node; the
    correction acts on the final edge of that path.  "prune" removes the
    continuation for good, "boost" scales its smoothed weight by factor
    (factor 1 is a bit-exact no-op).  Later walk expansions see the
    updated model.
    """
    if kind not in ("prune", "boost"):
        raise CorrectionError(f"unknown correction kind {kind!r}")
    _find_path(tree, path)
    if len(path) < 2:
        raise CorrectionError("cannot correct the root itself; pick a branch")
    parent, target = path[-2], path[-1]
    transitions = model.transitions
    if kind == "prune":
        try:
            transitions.prune_edge(parent, target)
        except ValueError as exc:
            raise CorrectionError(str(exc)) from exc
    else:
        if factor <= 0:
            raise CorrectionError("boost factor must be positive")
        transitions.boost_edge(parent, target, factor)


FrameEstimates = list[tuple[MovementState, StateTriple]]


def refine_across_frames(
    frames: list[FrameEstimates],
    transitions: TransitionModel,
    rounds: int,
    floor_epsilon: float = FLOOR_EPSILON,
) -> list[FrameEstimates]:
    """Smooth per-frame probability triples through the transition structure.

    One round replaces each state's triple with the transition-weighted
    convex average of itself, its admissible successors present in the
    next frame, and its admissible predecessors in the previous frame.
    Two guards follow the averaging: a state's p_other never rises above
    its pre-round value (excess shifts to p_ant and p_entity in
    proportion), and p_other below floor_epsilon is reassigned the same
    way.  Both act downward, so total p_other mass never increases.
    """
    if rounds < 0:
        raise ValueError("rounds must be >= 0")
    current = [list(frame) for frame in frames]
    for _ in range(rounds):
        lookup = [{state: triple for state, triple in frame} for frame in current]
        rows = [{state: transitions.row(state) for state, _ in frame} for frame in current]
        next_frames: list[FrameEstimates] = []
        for f, frame in enumerate(current):
            out: FrameEstimates = []
            for state, triple in frame:
                weights = [1.0]
                triples = [triple]
                if f + 1 < len(current):
                    for succ, p in rows[f][state].items():
                        found = lookup[f + 1].get(succ)
                        if found is not None and p > 0:
                            weights.append(p)
                            triples.append(found)
                if f > 0:
                    for prev_state, prev_triple in current[f - 1]:
                        p = rows[f - 1][prev_state].get(state, 0.0)
                        if p > 0:
                            weights.append(p)
                            triples.append(prev_triple)
                total = sum(weights)
                avg = [
                    sum(w * t[i] for w, t in zip(weights, triples)) / total
                    for i in range(3)
                ]
                out.append((state, _guard_other(avg, triple.p_other, floor_epsilon)))
            next_frames.append(out)
        current = next_frames
    return current


def _guard_other(avg: list[float], previous_other: float, floor_epsilon: float) -> StateTriple:
    p_ant, p_entity, p_other = avg
    capped = min(p_other, previous_other)
    if capped < floor_epsilon:
        capped = 0.0
    excess = p_other - capped
    if excess > 0:
        base = p_ant + p_entity
        if base > 0:
            p_ant += excess * (p_ant / base)
            p_entity += excess * (p_entity / base)
        else:
            p_ant += excess / 2
            p_entity += excess / 2
    return StateTriple(p_ant, p_entity, capped)


def zone_observations(model: ColonyModel) -> list[Observation]:
    """Ephemeral entity observations covering larva zones.

    Every in-arena cell within the influence radius of a larva zone
    centroid contributes one entity observation per move, so probability
    estimates near those zones lean toward entity-induced without
    touching the stored database.
    """
    transitions = model.transitions
    out: list[Observation] = []
    radius = model.influence_radius
    reach = int(radius) + 1
    for zone in model.zones:
        if zone.label != "larva":
            continue
        cx, cy = zone.centroid
        for y in range(cy - reach, cy + reach + 1):
            for x in range(cx - reach, cx + reach + 1):
                if not in_bounds(x, y, transitions.width, transitions.height):
                    continue
                if euclidean((x, y), (cx, cy)) > radius:
                    continue
                for move in MOVES:
                    out.append(Observation(MovementState(x, y, move), "entity"))
    return out


def best_matching_state(
    position: tuple[int, int],
    model: ColonyModel,
) -> MovementState:
    """Observed state nearest the position, within the similarity radius.

    Distance ties go to the state observed most often, then to canonical
    move order.  With nothing close enough the fallback is standing still
    at the position.
    """
    counts: dict[MovementState, int] = {}
    for obs in model.observations:
        counts[obs.state] = counts.get(obs.state, 0) + 1
    best = None
    best_key = None
    for state, count in counts.items():
        d = euclidean(state.cell, position)
        if d > model.similarity_radius:
            continue
        key = (d, -count, _MOVE_ORDER[state.move], state.x, state.y)
        if best_key is None or key < best_key:
            best, best_key = state, key
    if best is None:
        return MovementState(position[0], position[1], "stay")
    return best


def live_predict(
    position: tuple[int, int],
    frame_index: int,
    model: ColonyModel,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
    threshold: float = DEFAULT_THRESHOLD,
    ant_id: int = 0,
) -> Prediction:
    """Predict an ant's future states from its current position.

    The walk starts at the observed state best matching the position and
    its nodes are tagged with larva-zone influence folded into the
    probability estimates.  The flattened tree, current state included,
    forms the prediction.
    """
    if model.table is None:
        raise UntrainedModelError("model has no trained classifier weights")
    transitions = model.transitions
    if not in_bounds(position[0], position[1], transitions.width, transitions.height):
        raise ValueError(f"position {position} outside the arena")
    start = best_matching_state(position, model)
    tree = expand_walk(
        start,
        model,
        depth_limit=depth_limit,
        threshold=threshold,
        extra_observations=zone_observations(model),
    )
    future = [
        PredictedState(node.state.x, node.state.y, node.path_probability, node.category)
        for node in tree.nodes()
    ]
    return Prediction(ant_id, frame_index, future)


def prediction_to_json(prediction: Prediction) -> dict:
    return {
        "ant": prediction.ant_id,
        "frame": prediction.frame_index,
        "states": [
            {"x": s.x, "y": s.y, "p": s.p, "tag": s.tag}
            for s in prediction.future_states
        ],
    }


def tree_to_json(tree: WalkTree) -> dict:
    """Tree with stable integer node ids (breadth-first order) for clients.

    Each node carries the id path from the root so a client can name a
    branch unambiguously when requesting a correction.
    """
    nodes = []
    queue = deque([(tree.root, None)])
    ids: dict[int, int] = {}
    while queue:
        node, parent_id = queue.popleft()
        node_id = len(nodes)
        ids[id(node)] = node_id
        nodes.append(
            {
                "id": node_id,
                "parent": parent_id,
                "x": node.state.x,
                "y": node.state.y,
                "move": node.state.move,
                "p": node.path_probability,
                "tag": node.category,
                "depth": node.depth,
            }
        )
        for child in node.children:
            queue.append((child, node_id))
    return {"threshold": tree.threshold, "mode": tree.mode, "nodes": nodes}


def node_path(tree: WalkTree, node_id: int) -> list[MovementState]:
    """Root-to-node state path for the breadth-first node id."""
    queue = deque([(tree.root, [tree.root.state])])
    index = 0
    while queue:
        node, path = queue.popleft()
        if index == node_id:
            return path
        index += 1
        for child in node.children:
            queue.append((child, path + [child.state]))
    raise CorrectionError(f"no node with id {node_id} in the current tree")
