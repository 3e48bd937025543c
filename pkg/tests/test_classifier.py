import numpy as np
import pytest

from antwatch.classifier import (
    TrainConfig,
    WeightTable,
    classify,
    init_weights,
    loss_and_gradients,
    train,
    training_accuracy,
)
from antwatch.states import StateTriple


def clustered_samples():
    """Three well-separated feature clusters, one per category."""
    samples = []
    for i in range(8):
        eps = i * 0.002
        samples.append((StateTriple(0.8 - eps, 0.1, 0.1 + eps), "ant"))
        samples.append((StateTriple(0.1, 0.8 - eps, 0.1 + eps), "entity"))
        samples.append((StateTriple(0.1 + eps, 0.1, 0.8 - eps), "other"))
    return samples


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=-0.1)
    with pytest.raises(ValueError):
        TrainConfig(max_epochs=0)
    with pytest.raises(ValueError):
        TrainConfig(convergence_tol=0.0)
    TrainConfig(learning_rate=0.0)  # zero rate is allowed


def test_weight_table_shape_checks():
    with pytest.raises(ValueError):
        WeightTable(np.zeros((2, 3)), np.zeros(3))
    with pytest.raises(ValueError):
        WeightTable(np.zeros((3, 3)), np.zeros(2))
    with pytest.raises(ValueError):
        WeightTable(np.full((3, 3), np.nan), np.zeros(3))


def test_weight_table_list_round_trip():
    table = init_weights(4)
    back = WeightTable.from_lists(table.to_lists())
    assert np.array_equal(back.weights, table.weights)
    assert np.array_equal(back.bias, table.bias)


def test_init_weights_seeded_and_small():
    a = init_weights(9)
    b = init_weights(9)
    assert np.array_equal(a.weights, b.weights)
    assert np.array_equal(a.bias, b.bias)
    assert np.abs(a.weights).max() <= 0.01
    assert not np.array_equal(a.weights, init_weights(10).weights)


def test_zero_learning_rate_converges_immediately_with_init_weights():
    samples = clustered_samples()
    result = train(samples, TrainConfig(learning_rate=0.0), rng_seed=5)
    assert result.stop_reason == "converged"
    assert result.epochs == 1
    init = init_weights(5)
    assert np.array_equal(result.table.weights, init.weights)
    assert np.array_equal(result.table.bias, init.bias)


def test_separable_clusters_reach_full_accuracy():
    samples = clustered_samples()
    result = train(samples, TrainConfig(learning_rate=0.5, max_epochs=500), rng_seed=0)
    assert training_accuracy(samples, result.table) == 1.0
    assert result.epochs <= 500


def test_training_is_deterministic():
    samples = clustered_samples()
    a = train(samples, rng_seed=1)
    b = train(samples, rng_seed=1)
    assert np.array_equal(a.table.weights, b.table.weights)
    assert a.final_loss == b.final_loss
    assert a.epochs == b.epochs


def test_loss_decreases_over_epochs():
    samples = clustered_samples()
    features = np.array([list(t) for t, _ in samples])
    labels = np.array([("ant", "entity", "other").index(c) for _, c in samples])
    table = init_weights(0)
    w, b = table.weights, table.bias
    losses = []
    for _ in range(60):
        loss, dw, db = loss_and_gradients(features, labels, w, b)
        losses.append(loss)
        w = w - 0.5 * dw
        b = b - 0.5 * db
    assert all(l2 < l1 for l1, l2 in zip(losses, losses[1:]))


def test_gradients_match_central_differences():
    rng = np.random.default_rng(6)
    h = 1e-5
    for _ in range(10):
        n = int(rng.integers(2, 12))
        features = rng.random((n, 3))
        labels = rng.integers(0, 3, n)
        w = rng.normal(scale=0.7, size=(3, 3))
        b = rng.normal(scale=0.7, size=3)
        _, dw, db = loss_and_gradients(features, labels, w, b)

        for i in range(3):
            for j in range(3):
                wp, wm = w.copy(), w.copy()
                wp[i, j] += h
                wm[i, j] -= h
                lp = loss_and_gradients(features, labels, wp, b)[0]
                lm = loss_and_gradients(features, labels, wm, b)[0]
                assert dw[i, j] == pytest.approx((lp - lm) / (2 * h), abs=1e-6)
        for i in range(3):
            bp, bm = b.copy(), b.copy()
            bp[i] += h
            bm[i] -= h
            lp = loss_and_gradients(features, labels, w, bp)[0]
            lm = loss_and_gradients(features, labels, w, bm)[0]
            assert db[i] == pytest.approx((lp - lm) / (2 * h), abs=1e-6)


def test_classify_matches_manual_argmax():
    rng = np.random.default_rng(2)
    for _ in range(30):
        table = WeightTable(rng.normal(size=(3, 3)), rng.normal(size=3))
        raw = rng.random(3)
        feat = StateTriple(*(raw / raw.sum()).tolist())
        label, scores = classify(feat, table)
        logits = np.array(feat) @ table.weights + table.bias
        assert label == ("ant", "entity", "other")[int(np.argmax(logits))]
        assert sum(scores) == pytest.approx(1.0)
        scores.check()


def test_classify_tie_prefers_entity():
    # Zero weights score every category identically.
    table = WeightTable(np.zeros((3, 3)), np.zeros(3))
    label, scores = classify(StateTriple(0.2, 0.3, 0.5), table)
    assert label == "entity"
    assert scores == StateTriple(1 / 3, 1 / 3, 1 / 3)


def test_classify_is_shift_invariant_in_bias():
    table = init_weights(3)
    shifted = WeightTable(table.weights.copy(), table.bias + 7.5)
    feat = StateTriple(0.6, 0.3, 0.1)
    a_label, a_scores = classify(feat, table)
    b_label, b_scores = classify(feat, shifted)
    assert a_label == b_label
    assert np.allclose(a_scores, b_scores)


def test_trivial_stop_when_updates_cannot_help():
    # A contradictory dataset (same feature, every label) stalls the loss at
    # ln 3 while weights stay near their tiny init.
    feat = StateTriple(1 / 3, 1 / 3, 1 / 3)
    samples = [(feat, "ant"), (feat, "entity"), (feat, "other")]
    result = train(samples, TrainConfig(learning_rate=0.5, max_epochs=400), rng_seed=0)
    assert result.stop_reason in ("trivial", "converged")
    assert result.final_loss == pytest.approx(np.log(3), abs=1e-3)


def test_max_epochs_stop_reported():
    samples = clustered_samples()
    result = train(samples, TrainConfig(learning_rate=0.5, max_epochs=3), rng_seed=0)
    assert result.stop_reason == "max_epochs"
    assert result.epochs == 3


def test_empty_samples_rejected():
    with pytest.raises(ValueError):
        train([])
