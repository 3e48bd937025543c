"""Pipeline configuration: one YAML document drives every stage.

Parse errors surface with the YAML line that caused them; semantic errors
name the offending key by its dotted path.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import yaml

from .classifier import TrainConfig
from .errors import ConfigError
from .sim import ScenarioConfig, scenario_preset


@dataclass(frozen=True)
class FrameOptions:
    skip: bool = True  # drop every third frame
    target_fps: int | None = None  # standardize before skipping when set


@dataclass(frozen=True)
class DetectionOptions:
    motion_epsilon: float = 2.0
    min_height: float = 50.0
    raw_min_intensity: float = 120.0
    min_cells: int = 4
    knn_k: int = 3
    window_start: int = 0
    window_end: int | None = None  # exclusive; None = end of sequence


@dataclass(frozen=True)
class TrackingOptions:
    n_tracks: int = 2
    max_step: int = 3
    blob_threshold: float = 50.0
    stationary_eps: int = 1
    stationary_min_len: int = 10


@dataclass(frozen=True)
class ModelOptions:
    similarity_radius: float = 5.0
    influence_radius: float = 5.0
    smoothing_alpha: float = 0.5
    n_random_states: int = 25
    training: TrainConfig = field(default_factory=TrainConfig)


@dataclass(frozen=True)
class PredictionOptions:
    depth_limit: int = 6
    threshold: float = 1e-4
    refine_rounds: int = 2
    ant_track: int = 0
    frame: int | None = None  # None = last frame
    top_k: int = 3


@dataclass(frozen=True)
class PipelineConfig:
    scenario: ScenarioConfig
    frames: FrameOptions = FrameOptions()
    detection: DetectionOptions = DetectionOptions()
    tracking: TrackingOptions = TrackingOptions()
    model: ModelOptions = ModelOptions()
    prediction: PredictionOptions = PredictionOptions()
    output_dir: Path = Path("out")

    def validate(self) -> None:
        try:
            self.scenario.validate()
        except ValueError as exc:
            raise ConfigError(f"scenario: {exc}") from exc
        if self.frames.target_fps is not None and self.frames.target_fps <= 0:
            raise ConfigError("frames.target_fps must be positive")
        d = self.detection
        if d.min_cells < 1:
            raise ConfigError("detection.min_cells must be >= 1")
        if d.window_start < 0:
            raise ConfigError("detection.window_start must be >= 0")
        if d.window_end is not None and d.window_end <= d.window_start + 1:
            raise ConfigError("detection.window_end must leave a window of >= 2 frames")
        t = self.tracking
        if t.n_tracks < 1:
            raise ConfigError("tracking.n_tracks must be >= 1")
        if t.max_step < 1:
            raise ConfigError("tracking.max_step must be >= 1")
        m = self.model
        if m.similarity_radius <= 0 or m.influence_radius <= 0:
            raise ConfigError("model radii must be positive")
        if m.smoothing_alpha < 0:
            raise ConfigError("model.smoothing_alpha must be >= 0")
        p = self.prediction
        if not 0.0 < p.threshold <= 1.0:
            raise ConfigError("prediction.threshold must lie in (0, 1]")
        if p.depth_limit < 0 or p.refine_rounds < 0:
            raise ConfigError("prediction depth_limit and refine_rounds must be >= 0")
        if p.top_k < 1:
            raise ConfigError("prediction.top_k must be >= 1")


def _build(cls, data: dict, path: str):
    allowed = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, value in data.items():
        if key not in allowed:
            raise ConfigError(f"unknown key {path}.{key}")
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _scenario_from(data: dict) -> ScenarioConfig:
    data = dict(data)
    preset = data.pop("preset", None)
    if preset is not None:
        base = scenario_preset(preset)
        overrides = {}
        allowed = {f.name for f in fields(ScenarioConfig)}
        for key, value in data.items():
            if key not in allowed:
                raise ConfigError(f"unknown key scenario.{key}")
            overrides[key] = value
        try:
            return replace(base, **overrides)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"scenario: {exc}") from exc
    return _build(ScenarioConfig, data, "scenario")


def config_from_dict(data: dict) -> PipelineConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration root must be a mapping")
    unknown = set(data) - {
        "scenario", "frames", "detection", "tracking", "model", "prediction", "output_dir",
    }
    if unknown:
        raise ConfigError(f"unknown top-level key {sorted(unknown)[0]}")
    if "scenario" not in data:
        raise ConfigError("missing required section: scenario")
    model_data = dict(data.get("model", {}))
    training = _build(TrainConfig, model_data.pop("training", {}), "model.training")
    model = _build(ModelOptions, {**model_data, "training": training}, "model")
    config = PipelineConfig(
        scenario=_scenario_from(data["scenario"]),
        frames=_build(FrameOptions, data.get("frames", {}), "frames"),
        detection=_build(DetectionOptions, data.get("detection", {}), "detection"),
        tracking=_build(TrackingOptions, data.get("tracking", {}), "tracking"),
        model=model,
        prediction=_build(PredictionOptions, data.get("prediction", {}), "prediction"),
        output_dir=Path(data.get("output_dir", "out")),
    )
    config.validate()
    return config


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if data is None:
        raise ConfigError(f"config file {path} is empty")
    return config_from_dict(data)
