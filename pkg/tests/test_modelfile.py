import json

import numpy as np
import pytest

from antwatch.classifier import init_weights
from antwatch.detection import Zone
from antwatch.errors import LoadError
from antwatch.modelfile import (
    ColonyModel,
    canonical_bytes,
    from_json_dict,
    load_model,
    model_digest,
    save_model,
    to_json_dict,
)
from antwatch.states import MovementState, Observation, TransitionModel, build_transition_model


def sample_model():
    a = MovementState(4, 4, "E")
    b = MovementState(5, 4, "N")
    c = MovementState(5, 4, "S")
    transitions = build_transition_model(
        [[a, b, MovementState(5, 3, "stay")], [a, c]],
        smoothing_alpha=0.5,
        width=12,
        height=12,
    )
    transitions.prune_edge(a, MovementState(5, 4, "W"))
    return ColonyModel(
        transitions=transitions,
        observations=[
            Observation(a, "ant"),
            Observation(b, "entity"),
        ],
        table=init_weights(3),
        stop_reason="converged",
        epochs=17,
        similarity_radius=4.0,
        influence_radius=6.0,
        zones=[Zone(0, [(1, 1), (1, 2)], (1, 2), label="larva", source="merged")],
    )


def test_untrained_flag():
    model = ColonyModel(transitions=TransitionModel(width=4, height=4))
    assert not model.trained
    assert sample_model().trained


def test_round_trip_preserves_everything(tmp_path):
    model = sample_model()
    path = tmp_path / "model.json"
    save_model(model, path)
    back = load_model(path)

    assert back.transitions.counts == model.transitions.counts
    assert back.transitions.blocked == model.transitions.blocked
    assert back.transitions.smoothing_alpha == 0.5
    assert back.transitions.width == 12 and back.transitions.height == 12
    assert back.observations == model.observations
    assert np.array_equal(back.table.weights, model.table.weights)
    assert np.array_equal(back.table.bias, model.table.bias)
    assert back.stop_reason == "converged"
    assert back.epochs == 17
    assert back.similarity_radius == 4.0
    assert back.influence_radius == 6.0
    assert back.zones == model.zones


def test_round_trip_is_byte_exact(tmp_path):
    model = sample_model()
    path = tmp_path / "model.json"
    save_model(model, path)
    first = path.read_bytes()
    save_model(load_model(path), path)
    assert path.read_bytes() == first
    assert first.endswith(b"\n")


def test_canonical_bytes_ignore_count_insertion_order():
    m1 = sample_model()
    m2 = sample_model()
    for state in list(m2.transitions.counts):
        row = m2.transitions.counts.pop(state)
        m2.transitions.counts[state] = dict(reversed(list(row.items())))
    assert canonical_bytes(m1) == canonical_bytes(m2)
    assert model_digest(m1) == model_digest(m2)


def test_digest_changes_with_content():
    m1 = sample_model()
    m2 = sample_model()
    m2.transitions.boost_edge(MovementState(4, 4, "E"), MovementState(5, 4, "N"), 2.0)
    assert model_digest(m1) != model_digest(m2)


def test_untrained_model_serializes_classifier_null(tmp_path):
    model = ColonyModel(transitions=TransitionModel(width=4, height=4))
    data = to_json_dict(model)
    assert data["classifier"] is None
    path = tmp_path / "model.json"
    save_model(model, path)
    assert load_model(path).table is None


def test_version_mismatch_rejected():
    data = to_json_dict(sample_model())
    data["version"] = 99
    with pytest.raises(LoadError):
        from_json_dict(data)


def test_missing_file_and_bad_json(tmp_path):
    with pytest.raises(LoadError):
        load_model(tmp_path / "absent.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(LoadError):
        load_model(broken)


def test_blocked_edges_sorted_in_file(tmp_path):
    model = sample_model()
    a = MovementState(4, 4, "E")
    model.transitions.prune_edge(a, MovementState(5, 4, "SW"))
    path = tmp_path / "model.json"
    save_model(model, path)
    data = json.loads(path.read_text())
    assert data["blocked"] == sorted(data["blocked"])
    assert len(data["blocked"]) == 2
