"""Softmax classifier from category-probability features to categories.

One linear layer, three inputs to three outputs, trained full-batch by
gradient descent on cross-entropy.  Weights are shared across all states;
a state enters as its probability triple, so the classifier can score
states never seen during training.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UntrainedModelError
from .states import CATEGORIES, StateTriple

# Tie-break order for predicted categories, strongest first.
_PRIORITY = {"entity": 2, "ant": 1, "other": 0}

_STALL_TOL = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.5
    max_epochs: int = 2000
    convergence_tol: float = 1e-7
    triviality_tol: float = 1e-6

    def __post_init__(self) -> None:
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if self.convergence_tol <= 0 or self.triviality_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class WeightTable:
    """3x3 weight matrix plus per-output bias; rows are inputs, columns outputs."""

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weights.shape != (3, 3) or self.bias.shape != (3,):
            raise ValueError("expected a 3x3 weight matrix and a 3-vector bias")
        if not (np.isfinite(self.weights).all() and np.isfinite(self.bias).all()):
            raise ValueError("weights must be finite")

    def to_lists(self) -> dict:
        return {"weights": self.weights.tolist(), "bias": self.bias.tolist()}

    @classmethod
    def from_lists(cls, data: dict) -> "WeightTable":
        return cls(np.array(data["weights"]), np.array(data["bias"]))


@dataclass(frozen=True)
class TrainResult:
    table: WeightTable
    stop_reason: str  # "converged" | "trivial" | "max_epochs"
    epochs: int
    final_loss: float


def init_weights(rng_seed: int) -> WeightTable:
    rng = np.random.default_rng(rng_seed)
    return WeightTable(rng.uniform(-0.01, 0.01, (3, 3)), rng.uniform(-0.01, 0.01, 3))


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def loss_and_gradients(
    features: np.ndarray,
    label_indices: np.ndarray,
    weights: np.ndarray,
    bias: np.ndarray,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean cross-entropy and its gradients for a full batch.

    features is (n, 3), label_indices (n,) into CATEGORIES.  Returns
    (loss, dW, db) with shapes matching weights and bias.
    """
    n = len(features)
    probs = _softmax(features @ weights + bias)
    loss = float(-np.log(probs[np.arange(n), label_indices]).mean())
    delta = probs.copy()
    delta[np.arange(n), label_indices] -= 1.0
    delta /= n
    return loss, features.T @ delta, delta.sum(axis=0)


def train(
    samples: list[tuple[StateTriple, str]],
    config: TrainConfig = TrainConfig(),
    rng_seed: int = 0,
) -> TrainResult:
    """Fit the weight table on (feature triple, category label) samples.

    Descent stops on the first of: the largest per-epoch parameter change
    dropping below convergence_tol; any parameter magnitude falling below
    triviality_tol once the loss has stopped improving (after at least one
    epoch); or max_epochs.
    """
    if not samples:
        raise ValueError("cannot train on an empty sample list")
    features = np.array([list(t) for t, _ in samples], dtype=np.float64)
    labels = np.array([CATEGORIES.index(c) for _, c in samples])
    table = init_weights(rng_seed)
    w, b = table.weights, table.bias

    previous_loss = np.inf
    final_loss = np.inf
    stop_reason = "max_epochs"
    for epoch in range(1, config.max_epochs + 1):
        loss, dw, db = loss_and_gradients(features, labels, w, b)
        step_w = config.learning_rate * dw
        step_b = config.learning_rate * db
        w = w - step_w
        b = b - step_b
        final_loss = loss
        largest_step = max(np.abs(step_w).max(), np.abs(step_b).max())
        if largest_step < config.convergence_tol:
            stop_reason = "converged"
            break
        stalled = previous_loss - loss <= _STALL_TOL
        tiny = min(np.abs(w).min(), np.abs(b).min()) < config.triviality_tol
        if stalled and tiny:
            stop_reason = "trivial"
            break
        previous_loss = loss
    return TrainResult(WeightTable(w, b), stop_reason, epoch, final_loss)


def classify(feature: StateTriple, table: WeightTable) -> tuple[str, StateTriple]:
    """Predicted category and the softmax scores for one feature triple.

    Score ties resolve entity first, then ant, then other.
    """
    scores = _softmax(np.array(feature, dtype=np.float64) @ table.weights + table.bias)
    best = max(range(3), key=lambda i: (scores[i], _PRIORITY[CATEGORIES[i]]))
    return CATEGORIES[best], StateTriple(*scores.tolist())


def training_accuracy(samples: list[tuple[StateTriple, str]], table: WeightTable) -> float:
    if not samples:
        raise UntrainedModelError("no samples to score")
    hits = sum(1 for feat, label in samples if classify(feat, table)[0] == label)
    return hits / len(samples)
