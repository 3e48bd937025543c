"""Synthetic ant-colony observation and prediction pipeline.

Simulate a colony on a grid, extrude frames into height fields, detect
stationary entities, track ants, learn per-state influence probabilities
and movement transitions, and predict probable futures as pruned random
walks, with an HTTP service for operator corrections.
"""

from .classifier import TrainConfig, TrainResult, WeightTable, classify, train
from .detection import LabeledPoint, Zone, detect_zones, knn_label, merge_zones
from .errors import (
    AntwatchError,
    ConfigError,
    CorrectionError,
    LoadError,
    UntrainedModelError,
)
from .extrusion import ExtrudedFrame, estimate_background, extrude, motion_mask
from .frames import Frame, SequenceManifest, read_pgm, skip_frames, standardize_rate, write_pgm
from .grid import MOVES, chebyshev, displacement_move, euclidean
from .modelfile import ColonyModel, load_model, model_digest, save_model
from .prediction import (
    Prediction,
    WalkNode,
    WalkTree,
    apply_correction,
    expand_walk,
    live_predict,
    prune_walk,
    refine_across_frames,
)
from .sim import ScenarioConfig, SimulationRun, run_scenario, scenario_preset
from .states import (
    CATEGORIES,
    MovementState,
    Observation,
    StateTriple,
    TransitionModel,
    build_transition_model,
    discretize,
    estimate_probabilities,
    influence_category,
    sample_random_states,
)
from .tracking import Track, TrackPoint, stationary_segments, track_entities

__version__ = "0.1.0"

__all__ = [
    "AntwatchError",
    "CATEGORIES",
    "ColonyModel",
    "ConfigError",
    "CorrectionError",
    "ExtrudedFrame",
    "Frame",
    "LabeledPoint",
    "LoadError",
    "MOVES",
    "MovementState",
    "Observation",
    "Prediction",
    "ScenarioConfig",
    "SequenceManifest",
    "SimulationRun",
    "StateTriple",
    "Track",
    "TrackPoint",
    "TrainConfig",
    "TrainResult",
    "TransitionModel",
    "UntrainedModelError",
    "WalkNode",
    "WalkTree",
    "WeightTable",
    "Zone",
    "apply_correction",
    "build_transition_model",
    "chebyshev",
    "classify",
    "detect_zones",
    "discretize",
    "displacement_move",
    "estimate_background",
    "estimate_probabilities",
    "euclidean",
    "expand_walk",
    "extrude",
    "influence_category",
    "knn_label",
    "live_predict",
    "load_model",
    "merge_zones",
    "model_digest",
    "motion_mask",
    "prune_walk",
    "read_pgm",
    "refine_across_frames",
    "run_scenario",
    "sample_random_states",
    "save_model",
    "scenario_preset",
    "skip_frames",
    "standardize_rate",
    "stationary_segments",
    "track_entities",
    "train",
    "write_pgm",
]
