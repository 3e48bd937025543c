"""Canonical JSON serialization for the trained colony model.

One file carries everything prediction needs: transition counts, the
observation database, classifier weights, the radii both were built with,
and the stationary zones of the training window.  Serialization is
canonical (sorted keys, fixed separators) so identical models produce
byte-identical files, and a digest of those bytes identifies a model
revision cheaply.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .classifier import WeightTable
from .detection import Zone, zones_from_json, zones_to_json
from .errors import LoadError
from .states import (
    DEFAULT_INFLUENCE_RADIUS,
    DEFAULT_SIMILARITY_RADIUS,
    MovementState,
    Observation,
    TransitionModel,
)

FORMAT_VERSION = 1


def _state_key(state: MovementState) -> str:
    return f"{state.x},{state.y},{state.move}"


def _parse_state(key: str) -> MovementState:
    x, y, move = key.split(",")
    return MovementState(int(x), int(y), move)


@dataclass
class ColonyModel:
    transitions: TransitionModel
    observations: list[Observation] = field(default_factory=list)
    table: WeightTable | None = None
    stop_reason: str | None = None
    epochs: int = 0
    similarity_radius: float = DEFAULT_SIMILARITY_RADIUS
    influence_radius: float = DEFAULT_INFLUENCE_RADIUS
    zones: list[Zone] = field(default_factory=list)

    @property
    def trained(self) -> bool:
        return self.table is not None


def to_json_dict(model: ColonyModel) -> dict:
    t = model.transitions
    counts = {
        _state_key(a): {_state_key(b): c for b, c in row.items()}
        for a, row in t.counts.items()
    }
    return {
        "version": FORMAT_VERSION,
        "arena": {"width": t.width, "height": t.height},
        "smoothing_alpha": t.smoothing_alpha,
        "counts": counts,
        "blocked": sorted([_state_key(a), _state_key(b)] for a, b in t.blocked),
        "observations": [[o.state.x, o.state.y, o.state.move, o.category] for o in model.observations],
        "classifier": None if model.table is None else model.table.to_lists(),
        "stop_reason": model.stop_reason,
        "epochs": model.epochs,
        "similarity_radius": model.similarity_radius,
        "influence_radius": model.influence_radius,
        "zones": zones_to_json(model.zones),
    }


def from_json_dict(data: dict) -> ColonyModel:
    if data.get("version") != FORMAT_VERSION:
        raise LoadError(f"unsupported model version {data.get('version')!r}")
    transitions = TransitionModel(
        width=int(data["arena"]["width"]),
        height=int(data["arena"]["height"]),
        smoothing_alpha=float(data["smoothing_alpha"]),
    )
    for a_key, row in data["counts"].items():
        a = _parse_state(a_key)
        transitions.counts[a] = {_parse_state(b): float(c) for b, c in row.items()}
    for a_key, b_key in data["blocked"]:
        transitions.blocked.add((_parse_state(a_key), _parse_state(b_key)))
    table = None if data["classifier"] is None else WeightTable.from_lists(data["classifier"])
    return ColonyModel(
        transitions=transitions,
        observations=[
            Observation(MovementState(int(x), int(y), move), category)
            for x, y, move, category in data["observations"]
        ],
        table=table,
        stop_reason=data["stop_reason"],
        epochs=int(data["epochs"]),
        similarity_radius=float(data["similarity_radius"]),
        influence_radius=float(data["influence_radius"]),
        zones=zones_from_json(data["zones"]),
    )


def canonical_bytes(model: ColonyModel) -> bytes:
    return json.dumps(to_json_dict(model), sort_keys=True, separators=(",", ":")).encode()


def model_digest(model: ColonyModel) -> str:
    return hashlib.sha256(canonical_bytes(model)).hexdigest()


def save_model(model: ColonyModel, path: str | Path) -> None:
    Path(path).write_bytes(canonical_bytes(model) + b"\n")


def load_model(path: str | Path) -> ColonyModel:
    path = Path(path)
    if not path.exists():
        raise LoadError(f"model file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise LoadError(f"model file {path} is not valid JSON: {exc}") from exc
    return from_json_dict(data)
