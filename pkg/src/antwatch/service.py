"""Session-scoped HTTP service for the operator frontend.

Each session loads the pipeline artifacts of one output directory and
keeps a private copy of the model, so operator corrections stay
session-local until explicitly persisted.  Walk trees returned to the
client carry integer node ids; a correction must name a node of the most
recently returned tree, and any correction that changes the model makes
that tree stale until the client fetches a fresh one.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

from fastapi import FastAPI
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from .detection import zones_to_json
from .errors import CorrectionError, LoadError, UntrainedModelError
from .modelfile import ColonyModel, load_model, model_digest, save_model
from .prediction import (
    DEFAULT_DEPTH_LIMIT,
    DEFAULT_THRESHOLD,
    WalkTree,
    apply_correction,
    best_matching_state,
    expand_walk,
    live_predict,
    node_path,
    prediction_to_json,
    prune_walk,
    tree_to_json,
    zone_observations,
)
from .tracking import Track, tracks_from_records

API_VERSION = 1

# User-mode walks expand one decade past the requested threshold so the
# operator can see shoots the system would have cut.
USER_MODE_SLACK = 0.1


class SessionRequest(BaseModel):
    artifact_dir: str | None = None


class CursorRequest(BaseModel):
    frame: int


class WalkRequest(BaseModel):
    x: int
    y: int
    mode: Literal["system", "user"] = "system"
    depth: int = DEFAULT_DEPTH_LIMIT
    threshold: float = DEFAULT_THRESHOLD


class CorrectionRequest(BaseModel):
    node_id: int
    action: Literal["prune", "boost"]
    factor: float = 2.0
    persist: bool = False


@dataclass
class Session:
    session_id: str
    artifact_dir: Path
    frames_dir: Path
    extruded_dir: Path
    n_frames: int
    model: ColonyModel
    tracks: list[Track]
    stored_prediction: dict | None
    cursor: int = 0
    corrections: list[dict] = field(default_factory=list)
    tree: WalkTree | None = None
    tree_stale: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)


def _error(status: int, code: str, detail: str) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"version": API_VERSION, "error": code, "detail": detail},
    )


def _load_session_dir(artifact_dir: Path) -> tuple[Path, int]:
    for candidate in (artifact_dir / "prepared", artifact_dir / "frames"):
        manifest = candidate / "manifest.json"
        if manifest.exists():
            return candidate, len(json.loads(manifest.read_text())["frames"])
    raise LoadError("manifest")


def create_app(root_dir: str | Path = ".") -> FastAPI:
    root = Path(root_dir)
    app = FastAPI(title="antwatch service")
    sessions: dict[str, Session] = {}
    counter = {"next": 1}
    registry_lock = threading.Lock()

    def _get(session_id: str) -> Session | None:
        return sessions.get(session_id)

    @app.post("/sessions")
    def create_session(body: SessionRequest):
        artifact_dir = Path(body.artifact_dir) if body.artifact_dir else root
        try:
            frames_dir, n_frames = _load_session_dir(artifact_dir)
        except LoadError:
            return _error(404, "missing-artifact", f"no manifest under {artifact_dir}")
        model_path = artifact_dir / "model.json"
        if not model_path.exists():
            return _error(404, "missing-artifact", f"model not found: {model_path}")
        model = load_model(model_path)
        tracks_path = artifact_dir / "tracks.jsonl"
        tracks = []
        if tracks_path.exists():
            with open(tracks_path) as fh:
                tracks = tracks_from_records([json.loads(l) for l in fh if l.strip()])
        predictions_path = artifact_dir / "predictions.json"
        stored = json.loads(predictions_path.read_text()) if predictions_path.exists() else None
        with registry_lock:
            session_id = f"s{counter['next']}"
            counter["next"] += 1
            sessions[session_id] = Session(
                session_id=session_id,
                artifact_dir=artifact_dir,
                frames_dir=frames_dir,
                extruded_dir=artifact_dir / "extruded",
                n_frames=n_frames,
                model=model,
                tracks=tracks,
                stored_prediction=stored,
            )
        session = sessions[session_id]
        return {
            "version": API_VERSION,
            "session_id": session_id,
            "cursor": session.cursor,
            "frames": n_frames,
            "trained": session.model.trained,
            "digest": model_digest(session.model),
        }

    @app.get("/sessions/{session_id}")
    def session_info(session_id: str):
        session = _get(session_id)
        if session is None:
            return _error(404, "unknown-session", session_id)
        return {
            "version": API_VERSION,
            "session_id": session_id,
            "cursor": session.cursor,
            "frames": session.n_frames,
            "trained": session.model.trained,
            "digest": model_digest(session.model),
            "corrections": session.corrections,
            "tree_stale": session.tree_stale,
        }

    @app.put("/sessions/{session_id}/cursor")
    def set_cursor(session_id: str, body: CursorRequest):
        session = _get(session_id)
        if session is None:
            return _error(404, "unknown-session", session_id)
        if not 0 <= body.frame < session.n_frames:
            return _error(416, "frame-out-of-range", f"frame {body.frame} of {session.n_frames}")
        with session.lock:
            session.cursor = body.frame
        return {"version": API_VERSION, "cursor": body.frame}

    @app.get("/sessions/{session_id}/frames/{index}")
    def get_frame(
        session_id: str,
        index: int,
        variant: Literal["regular", "extruded"] = "regular",
    ):
        session = _get(session_id)
        if session is None:
            return _error(404, "unknown-session", session_id)
        if not 0 <= index < session.n_frames:
            return _error(416, "frame-out-of-range", f"frame {index} of {session.n_frames}")
        base = session.frames_dir if variant == "regular" else session.extruded_dir
        path = base / f"frame_{index:05d}.pgm"
        if not path.exists():
            return _error(404, "missing-artifact", str(path))
        return Response(path.read_bytes(), media_type="application/octet-stream")

    @app.get("/sessions/{session_id}/frames/{index}/overlays")
    def get_overlays(session_id: str, index: int):
        session = _get(session_id)
        if session is None:
            return _error(404, "unknown-session", session_id)
        if not 0 <= index < session.n_frames:
            return _error(416, "frame-out-of-range", f"frame {index} of {session.n_frames}")
        track_points = []
        for track in session.tracks:
            for p in track.points:
                if p.frame == index:
                    track_points.append(
                        {
                            "track": track.track_id,
                            "x": p.x,
                            "y": p.y,
                            "interpolated": p.interpolated,
                        }
                    )
        prediction = session.stored_prediction
        return {
            "version": API_VERSION,
            "frame": index,
            "zones": zones_to_json(session.model.zones),
            "tracks": track_points,
            "prediction": prediction if prediction and prediction["frame"] == index else None,
        }

    @app.post("/sessions/{session_id}/walks")
    def post_walk(session_id: str, body: WalkRequest):
        session = _get(session_id)
        if session is None:
            return _error(404, "unknown-session", session_id)
        if not 0.0 < body.threshold <= 1.0 or body.depth < 0:
            return _error(422, "bad-parameters", "depth >= 0 and threshold in (0, 1] required")
        with session.lock:
            try:
                start = best_matching_state((body.x, body.y), session.model)
                extra = zone_observations(session.model)
                if body.mode == "user":
                    expand_threshold = max(body.threshold * USER_MODE_SLACK, 1e-12)
                    tree = expand_walk(
                        start,
                        session.model,
                        depth_limit=body.depth,
                        threshold=expand_threshold,
                        mode="user",
                        extra_observations=extra,
                    )
                else:
                    tree = prune_walk(
                        expand_walk(
                            start,
                            session.model,
                            depth_limit=body.depth,
                            threshold=body.threshold,
                            mode="system",
                            extra_observations=extra,
                        ),
                        body.threshold,
                    )
            except UntrainedModelError as exc:
                return _error(409, "untrained-model", str(exc))
            except ValueError as exc:
                return _error(422, "bad-parameters", str(exc))
            session.tree = tree
            session.tree_stale = False
        payload = tree_to_json(tree)
        payload["version"] = API_VERSION
        payload["requested_threshold"] = body.threshold
        return payload

    @app.post("/sessions/{session_id}/corrections")
    def post_correction(session_id: str, body: CorrectionRequest):
        session = _get(session_id)
        if session is None:
            return _error(404, "unknown-session", session_id)
        with session.lock:
            if session.tree is None:
                return _error(409, "no-walk", "post a walk before sending corrections")
            if session.tree_stale:
                return _error(
                    409, "stale-tree", "the tree changed since your last fetch; re-fetch the walk"
                )
            try:
                path = node_path(session.tree, body.node_id)
                before = model_digest(session.model)
                apply_correction(session.model, session.tree, body.action, path, body.factor)
            except CorrectionError as exc:
                return _error(409, "stale-branch", f"{exc}; re-fetch the walk tree")
            except ValueError as exc:
                return _error(422, "bad-parameters", str(exc))
            after = model_digest(session.model)
            noop = after == before
            if not noop:
                session.tree_stale = True
            entry = {
                "serial": len(session.corrections) + 1,
                "action": body.action,
                "factor": body.factor if body.action == "boost" else None,
                "path": [[s.x, s.y, s.move] for s in path],
                "noop": noop,
            }
            session.corrections.append(entry)
            if body.persist:
                save_model(session.model, session.artifact_dir / "model.json")
            touched = path[-2]
            row = session.model.transitions.row(touched)
        return {
            "version": API_VERSION,
            "digest": after,
            "noop": noop,
            "correction": entry,
            "row": [
                {"x": s.x, "y": s.y, "move": s.move, "p": p}
                for s, p in row.items()
            ],
        }

    @app.post("/sessions/{session_id}/persist")
    def persist(session_id: str):
        session = _get(session_id)
        if session is None:
            return _error(404, "unknown-session", session_id)
        with session.lock:
            save_model(session.model, session.artifact_dir / "model.json")
            digest = model_digest(session.model)
        return {"version": API_VERSION, "digest": digest, "path": str(session.artifact_dir / "model.json")}

    @app.get("/sessions/{session_id}/predictions/{index}")
    def get_prediction(session_id: str, index: int, track: int = 0):
        session = _get(session_id)
        if session is None:
            return _error(404, "unknown-session", session_id)
        if not 0 <= index < session.n_frames:
            return _error(416, "frame-out-of-range", f"frame {index} of {session.n_frames}")
        stored = session.stored_prediction
        if stored and stored["frame"] == index and stored["ant"] == track and not session.corrections:
            return {"version": API_VERSION, **stored}
        the_track = next((t for t in session.tracks if t.track_id == track), None)
        if the_track is None:
            return _error(404, "unknown-track", f"no track {track} in session artifacts")
        point = next((p for p in the_track.points if p.frame == index), None)
        if point is None:
            return _error(404, "no-position", f"track {track} has no point at frame {index}")
        try:
            prediction = live_predict(point.cell, index, session.model, ant_id=track)
        except UntrainedModelError as exc:
            return _error(409, "untrained-model", str(exc))
        return {"version": API_VERSION, **prediction_to_json(prediction)}

    return app
