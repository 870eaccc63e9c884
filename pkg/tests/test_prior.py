import warnings

import numpy as np
import pytest

from anchscgan.data import make_dataset
from anchscgan.errors import DataError
from anchscgan.prior import (THRESHOLD, class_representation, classify, default_batch_size,
                             filter_misclassified, new_prior, prior_layer_spec, score, train_prior)


def test_layer_widths():
    assert [(a, b) for a, b, _ in prior_layer_spec(3)] == [(3, 6), (6, 12), (12, 3), (3, 1)]
    assert [act for *_, act in prior_layer_spec(3)] == ["relu", "relu", "sigmoid", "sigmoid"]


def test_default_batch_size_bounds():
    assert default_batch_size(20) == 8
    assert default_batch_size(500) == 50
    assert default_batch_size(5000) == 128


def test_zero_weights_give_half_everywhere():
    clf = new_prior(4, zero=True)
    X = np.random.default_rng(0).normal(size=(6, 4))
    np.testing.assert_array_equal(score(clf, X), np.full(6, 0.5))
    np.testing.assert_array_equal(class_representation(clf, X), np.full((6, 4), 0.5))
    # score 0.5 sits on the threshold and counts as minority
    assert THRESHOLD == 0.5
    assert classify(clf, X).tolist() == [1] * 6


def test_training_separates_and_freezes():
    rng = np.random.default_rng(1)
    X = np.vstack([rng.normal(0.2, 0.05, (30, 2)), rng.normal(0.8, 0.05, (30, 2))])
    y = np.r_[np.zeros(30), np.ones(30)]
    clf = train_prior(X, y, epochs=200, seed=2)
    assert clf.frozen
    assert np.mean(classify(clf, X) == y) > 0.95
    rep = class_representation(clf, X)
    assert rep.shape == (60, 2) and np.all((rep >= 0) & (rep <= 1))
    again = train_prior(X, y, epochs=200, seed=2)
    for p, q in zip(clf.net.parameters(), again.net.parameters()):
        assert np.array_equal(p, q)


def test_training_needs_two_classes():
    with pytest.raises(DataError):
        train_prior(np.zeros((4, 2)), np.zeros(4), epochs=1)


def _fixed_prior(cut):
    """Prior on one feature whose score is ~1 above ``cut`` and ~0 below it."""
    clf = new_prior(1, zero=True)
    for layer in clf.net.layers[:3]:
        layer.weights[:] = 1.0
    # layers 1-3 give h3 = sigmoid(8 x + b); the output sharpens h3 around 0.5
    clf.net.layers[2].bias[:] = -8.0 * cut
    clf.net.layers[3].weights[:] = 200.0
    clf.net.layers[3].bias[:] = -100.0
    return clf


def test_filter_drops_misclassified_rows():
    X = np.array([[0.0], [0.1], [0.2], [0.9], [1.0], [0.05]])
    y = np.array([0, 0, 1, 1, 1, 1])
    clf = _fixed_prior(0.5)
    assert classify(clf, X).tolist() == [0, 0, 0, 1, 1, 0]
    # exactly half the minority rows go, which does not trip the safeguard
    kept = filter_misclassified(clf, make_dataset(X, y))
    assert kept.row_ids.tolist() == [0, 1, 3, 4]


def test_filter_safeguard_keeps_minority():
    X = np.array([[0.0], [0.1], [0.2], [0.3], [0.9]])
    y = np.array([0, 0, 1, 1, 1])
    clf = _fixed_prior(0.5)
    assert classify(clf, X).tolist() == [0, 0, 0, 0, 1]
    with pytest.warns(RuntimeWarning, match="keeping them"):
        kept = filter_misclassified(clf, make_dataset(X, y))
    assert kept.n_minority == 3
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        strict = filter_misclassified(clf, make_dataset(X, y), safeguard=False)
    assert strict.n_minority == 1
