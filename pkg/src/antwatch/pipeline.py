"""Stage implementations behind the command-line interface.

Each stage reads the previous stage's artifacts from the output directory
and writes its own, so any stage can run (and be tested) in isolation.
Stage order: simulate, extrude, detect, track, train, predict, eval.
"""

from __future__ import annotations

import json
from pathlib import Path

from .classifier import train, training_accuracy, classify
from .config import PipelineConfig
from .detection import LabeledPoint, Zone, detect_zones, label_zones, merge_zones, zones_from_json, zones_to_json
from .errors import LoadError
from .extrusion import (
    ExtrudedFrame,
    estimate_background,
    extrude_sequence,
    load_extruded,
    save_extruded,
)
from .frames import (
    Frame,
    load_manifest,
    load_sequence,
    save_sequence,
    skip_frames,
    standardize_rate,
)
from .grid import MOVE_DELTAS, clamp_cell, displacement_move, euclidean
from .modelfile import ColonyModel, load_model, save_model
from .prediction import live_predict, prediction_to_json, refine_across_frames
from .sim import run_scenario
from .states import (
    MovementState,
    Observation,
    build_transition_model,
    estimate_probabilities,
    influence_category,
    sample_random_states,
)
from .tracking import Track, frame_blobs, stationary_segments, track_entities, tracks_from_records, tracks_to_records


def write_jsonl(path: Path, records: list[dict]) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_jsonl(path: Path) -> list[dict]:
    if not path.exists():
        raise LoadError(f"missing artifact: {path}")
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def _require_dir(path: Path, hint: str) -> Path:
    if not path.is_dir():
        raise LoadError(f"missing artifact: {path} ({hint})")
    return path


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _read_json(path: Path):
    if not path.exists():
        raise LoadError(f"missing artifact: {path}")
    return json.loads(path.read_text())


# --- simulate ---------------------------------------------------------------

def run_simulate(config: PipelineConfig) -> dict:
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    run = run_scenario(config.scenario)
    save_sequence(run.frames, out / "frames", fps=config.scenario.fps)
    write_jsonl(
        out / "ground_truth.jsonl",
        [
            {"frame": f, "id": i, "kind": kind, "x": x, "y": y}
            for f, i, kind, x, y in run.positions
        ],
    )
    write_jsonl(
        out / "influence_events.jsonl",
        [
            {"frame": e.frame, "id": e.agent_id, "category": e.category}
            for e in run.events
        ],
    )
    return {"frames": len(run.frames), "agents": len(run.positions) // max(1, len(run.frames))}


# --- extrude ----------------------------------------------------------------

def _prepared_selection(n: int, config: PipelineConfig, source_fps: int) -> list[int]:
    """Original frame indices that survive standardization and skipping."""
    indices = list(range(n))
    if config.frames.target_fps is not None:
        if source_fps % config.frames.target_fps != 0:
            raise LoadError(
                f"source rate {source_fps} not divisible by target {config.frames.target_fps}"
            )
        stride = source_fps // config.frames.target_fps
        indices = indices[::stride]
    if config.frames.skip:
        indices = [idx for pos, idx in enumerate(indices) if pos % 3 != 2]
    return indices


def run_extrude(config: PipelineConfig) -> dict:
    out = config.output_dir
    frames_dir = _require_dir(out / "frames", "run simulate first")
    manifest = load_manifest(frames_dir / "manifest.json")
    frames = load_sequence(frames_dir / "manifest.json")
    selection = _prepared_selection(len(frames), config, manifest.fps)
    prepared = [
        Frame(frames[idx].width, frames[idx].height, frames[idx].pixels, index=pos)
        for pos, idx in enumerate(selection)
    ]
    fps = config.frames.target_fps or manifest.fps
    save_sequence(prepared, out / "prepared", fps=fps)
    _write_json(out / "prepared" / "source_indices.json", selection)

    background = estimate_background(prepared)
    extruded = extrude_sequence(prepared, background)
    extruded_dir = out / "extruded"
    extruded_dir.mkdir(exist_ok=True)
    names = []
    for frame in extruded:
        name = f"frame_{frame.index:05d}.pgm"
        save_extruded(frame, extruded_dir / name)
        names.append(name)
    _write_json(
        extruded_dir / "manifest.json",
        {"fps": fps, "width": manifest.width, "height": manifest.height, "frames": names},
    )
    return {"prepared": len(prepared)}


def _load_extruded_sequence(out: Path) -> list[ExtrudedFrame]:
    extruded_dir = _require_dir(out / "extruded", "run extrude first")
    manifest = _read_json(extruded_dir / "manifest.json")
    return [
        load_extruded(extruded_dir / name, index=i)
        for i, name in enumerate(manifest["frames"])
    ]


# --- detect -----------------------------------------------------------------

def _ground_truth_references(out: Path, frame: int) -> list[LabeledPoint]:
    """Labelled centroids from simulator ground truth, when available.

    Larvae become larva references; ants become ant references; mobile
    foreign entities never anchor a stationary zone and are skipped.
    Without ground truth (non-simulated input) there are no references
    and zones stay unknown.
    """
    path = out / "ground_truth.jsonl"
    if not path.exists():
        return []
    refs = []
    for rec in read_jsonl(path):
        if rec["frame"] != frame or rec["kind"] == "foreign":
            continue
        label = "larva" if rec["kind"] == "larva" else "ant"
        refs.append(LabeledPoint(rec["id"], (rec["x"], rec["y"]), label))
    return refs


def run_detect(config: PipelineConfig) -> dict:
    out = config.output_dir
    extruded = _load_extruded_sequence(out)
    prepared_dir = _require_dir(out / "prepared", "run extrude first")
    prepared = load_sequence(prepared_dir / "manifest.json")
    d = config.detection
    end = d.window_end if d.window_end is not None else len(extruded)
    if end > len(extruded) or end - d.window_start < 2:
        raise LoadError(
            f"detection window [{d.window_start}, {end}) needs >= 2 frames of the {len(extruded)} available"
        )
    window = slice(d.window_start, end)

    from_extruded = detect_zones(
        extruded[window], d.motion_epsilon, d.min_height, d.min_cells, source="extruded"
    )
    # Second route: raw intensities as pseudo-heights.  Entities present for
    # the entire run are absorbed into the estimated background and invisible
    # to the extruded route; this route still sees them.
    pseudo = [
        ExtrudedFrame(f.width, f.height, f.pixels.astype(float), f.index)
        for f in prepared[window]
    ]
    from_regular = detect_zones(
        pseudo, d.motion_epsilon, d.raw_min_intensity, d.min_cells, source="regular"
    )
    merged = merge_zones(from_extruded, from_regular)

    selection = _read_json(out / "prepared" / "source_indices.json")
    references = _ground_truth_references(out, selection[d.window_start])
    labeled = label_zones(merged, references, d.knn_k) if references else merged
    _write_json(out / "zones.json", zones_to_json(labeled))
    return {
        "zones": len(labeled),
        "extruded_route": len(from_extruded),
        "regular_route": len(from_regular),
    }


# --- track ------------------------------------------------------------------

def _load_zones(out: Path) -> list[Zone]:
    return zones_from_json(_read_json(out / "zones.json"))


def run_track(config: PipelineConfig) -> dict:
    out = config.output_dir
    extruded = _load_extruded_sequence(out)
    zones = _load_zones(out)
    exclude = set()
    for zone in zones:
        exclude.update(zone.cells)
    t = config.tracking
    blob_frames = [frame_blobs(f, t.blob_threshold, exclude=exclude) for f in extruded]
    tracks = track_entities(blob_frames, t.n_tracks, t.max_step)
    write_jsonl(out / "tracks.jsonl", tracks_to_records(tracks))
    segments = []
    for track in tracks:
        for seg in stationary_segments(track, t.stationary_eps, t.stationary_min_len):
            segments.append(
                {
                    "track": seg.track_id,
                    "start": seg.start_frame,
                    "end": seg.end_frame,
                    "x": seg.anchor_cell[0],
                    "y": seg.anchor_cell[1],
                }
            )
    write_jsonl(out / "segments.jsonl", segments)
    return {"tracks": len(tracks), "segments": len(segments)}


# --- train ------------------------------------------------------------------

def _real_states(track: Track) -> list[tuple[int, MovementState]]:
    """(index, state) for states whose defining pair of points is real."""
    states = []
    points = track.points
    for i in range(len(points)):
        if points[i].interpolated:
            continue
        if i + 1 < len(points):
            if points[i + 1].interpolated:
                continue
            move = displacement_move(
                points[i + 1].x - points[i].x, points[i + 1].y - points[i].y
            )
        else:
            move = "stay"
        states.append((i, MovementState(points[i].x, points[i].y, move)))
    return states


def _track_positions_by_frame(tracks: list[Track]) -> dict[int, dict[int, tuple[int, int]]]:
    by_frame: dict[int, dict[int, tuple[int, int]]] = {}
    for track in tracks:
        for p in track.points:
            by_frame.setdefault(p.frame, {})[track.track_id] = p.cell
    return by_frame


def build_observations(
    tracks: list[Track],
    zones: list[Zone],
    segments: list[dict],
    influence_radius: float,
) -> list[Observation]:
    """Observation database: every real tracked state, categorized by the
    influence present at its cell, plus one entity observation per
    stationary stop inside a larva zone's influence."""
    by_frame = _track_positions_by_frame(tracks)
    larva_zones = [z for z in zones if z.label == "larva"]
    observations: list[Observation] = []
    for track in tracks:
        for i, state in _real_states(track):
            frame = track.points[i].frame
            others = [
                cell for tid, cell in sorted(by_frame.get(frame, {}).items())
                if tid != track.track_id
            ]
            category = influence_category(state.cell, zones, others, influence_radius)
            observations.append(Observation(state, category))
    for seg in segments:
        anchor = (seg["x"], seg["y"])
        if any(euclidean(anchor, z.centroid) <= influence_radius for z in larva_zones):
            observations.append(Observation(MovementState(anchor[0], anchor[1], "stay"), "entity"))
    return observations


def run_train(config: PipelineConfig) -> dict:
    out = config.output_dir
    tracks = tracks_from_records(read_jsonl(out / "tracks.jsonl"))
    zones = _load_zones(out)
    segments = read_jsonl(out / "segments.jsonl")
    manifest = _read_json(out / "extruded" / "manifest.json")
    m = config.model

    observations = build_observations(tracks, zones, segments, m.influence_radius)
    sequences = []
    for track in tracks:
        indexed = _real_states(track)
        run: list[MovementState] = []
        previous_index = None
        for i, state in indexed:
            if previous_index is not None and i == previous_index + 1:
                run.append(state)
            else:
                if len(run) >= 2:
                    sequences.append(run)
                run = [state]
            previous_index = i
        if len(run) >= 2:
            sequences.append(run)
    transitions = build_transition_model(
        sequences, m.smoothing_alpha, manifest["width"], manifest["height"]
    )

    samples = [
        (estimate_probabilities(obs.state, observations, m.similarity_radius), obs.category)
        for obs in observations
    ]
    if not samples:
        raise LoadError("no observations to train on; tracks may be empty")
    result = train(samples, m.training, rng_seed=config.scenario.rng_seed)

    model = ColonyModel(
        transitions=transitions,
        observations=observations,
        table=result.table,
        stop_reason=result.stop_reason,
        epochs=result.epochs,
        similarity_radius=m.similarity_radius,
        influence_radius=m.influence_radius,
        zones=zones,
    )
    save_model(model, out / "model.json")

    random_rows = []
    for state in sample_random_states(
        manifest["width"], manifest["height"], m.n_random_states, config.scenario.rng_seed
    ):
        triple = estimate_probabilities(state, observations, m.similarity_radius)
        category, scores = classify(triple, result.table)
        random_rows.append(
            {
                "x": state.x,
                "y": state.y,
                "move": state.move,
                "p_ant": triple.p_ant,
                "p_entity": triple.p_entity,
                "p_other": triple.p_other,
                "category": category,
                "scores": list(scores),
            }
        )
    _write_json(
        out / "train_report.json",
        {
            "stop_reason": result.stop_reason,
            "epochs": result.epochs,
            "final_loss": result.final_loss,
            "training_accuracy": training_accuracy(samples, result.table),
            "n_observations": len(observations),
            "weights": result.table.to_lists(),
            "random_states": random_rows,
        },
    )
    return {"observations": len(observations), "stop_reason": result.stop_reason}


# --- predict ----------------------------------------------------------------

def run_predict(config: PipelineConfig) -> dict:
    out = config.output_dir
    model = load_model(out / "model.json")
    tracks = tracks_from_records(read_jsonl(out / "tracks.jsonl"))
    p = config.prediction
    track = next((t for t in tracks if t.track_id == p.ant_track), None)
    if track is None:
        raise LoadError(f"no track {p.ant_track} in {out / 'tracks.jsonl'}")
    frame = p.frame if p.frame is not None else track.points[-1].frame
    point = next((pt for pt in track.points if pt.frame == frame), None)
    if point is None:
        raise LoadError(f"track {p.ant_track} has no point at frame {frame}")
    prediction = live_predict(
        point.cell, frame, model, p.depth_limit, p.threshold, ant_id=p.ant_track
    )
    _write_json(out / "predictions.json", prediction_to_json(prediction))

    summary = {"prediction_states": len(prediction.future_states)}
    if p.refine_rounds > 0:
        frames_est = []
        for f in sorted({pt.frame for t in tracks for pt in t.points}):
            estimates = []
            for t in tracks:
                for i, state in _real_states(t):
                    if t.points[i].frame == f:
                        triple = estimate_probabilities(
                            state, model.observations, model.similarity_radius
                        )
                        estimates.append((state, triple))
            if estimates:
                frames_est.append(estimates)
        totals = [sum(tr.p_other for fr in frames_est for _, tr in fr)]
        current = frames_est
        for _ in range(p.refine_rounds):
            current = refine_across_frames(current, model.transitions, 1)
            totals.append(sum(tr.p_other for fr in current for _, tr in fr))
        _write_json(
            out / "refinement.json",
            {"rounds": p.refine_rounds, "sum_p_other": totals},
        )
        summary["sum_p_other"] = totals
    return summary


# --- eval -------------------------------------------------------------------

def top_k_cells(model: ColonyModel, state: MovementState, k: int) -> list[tuple[int, int]]:
    """The k most probable next cells implied by one transition row.

    Each successor of `state` lands on a cell determined by its own move;
    successor probabilities aggregate by landing cell (wall clamping can
    fold several onto one).  Ties break toward the earlier successor in
    canonical move order, which aggregation preserves via insertion order.
    """
    transitions = model.transitions
    mass: dict[tuple[int, int], float] = {}
    for successor, p in transitions.row(state).items():
        dx, dy = MOVE_DELTAS[successor.move]
        cell = clamp_cell(
            successor.x + dx, successor.y + dy, transitions.width, transitions.height
        )
        mass[cell] = mass.get(cell, 0.0) + p
    ranked = sorted(mass.items(), key=lambda kv: -kv[1])
    return [cell for cell, _ in ranked[:k]]


def run_eval(config: PipelineConfig) -> dict:
    out = config.output_dir
    model = load_model(out / "model.json")
    tracks = tracks_from_records(read_jsonl(out / "tracks.jsonl"))
    k = config.prediction.top_k
    hits = 0
    total = 0
    for track in tracks:
        points = track.points
        for i in range(len(points) - 2):
            # the state at i is known once the move to i+1 is observed; the
            # model then predicts the cell reached at i+2
            window = points[i : i + 3]
            if any(p.interpolated for p in window):
                continue
            state = MovementState(
                points[i].x,
                points[i].y,
                displacement_move(
                    points[i + 1].x - points[i].x, points[i + 1].y - points[i].y
                ),
            )
            predicted = top_k_cells(model, state, k)
            hits += points[i + 2].cell in predicted
            total += 1
    if total == 0:
        raise LoadError("no evaluable transitions in tracks.jsonl")
    baseline = min(k, 9) / 9
    report = {
        "k": k,
        "n_evaluated": total,
        "hits": hits,
        "hit_rate": hits / total,
        "baseline": baseline,
        "skill_ratio": (hits / total) / baseline,
    }
    _write_json(out / "eval_report.json", report)
    return report
