"""MLP prior classifier trained on anchors; filtering, class representation and score."""

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .nn import Adam, backward, bce, flat_grads, forward, init_network

log = logging.getLogger(__name__)

THRESHOLD = 0.5
REPRESENTATION_LAYER = 3  # activations after the third layer (sigmoid, width d)
MAX_MINORITY_LOSS = 0.5


def prior_layer_spec(d):
    return [
        (d, 2 * d, "relu"),
        (2 * d, 4 * d, "relu"),
        (4 * d, d, "sigmoid"),
        (d, 1, "sigmoid"),
    ]


def default_batch_size(n):
    return int(min(128, max(8, n // 10)))


@dataclass
class PriorClassifier:
    net: object
    threshold: float = THRESHOLD

    @property
    def d(self):
        return self.net.input_dim

    @property
    def frozen(self):
        return self.net.frozen

    def freeze(self):
        self.net.freeze()
        return self

    def activations(self, X):
        return forward(self.net, X)


def new_prior(d, seed=0, zero=False):
    net = init_network(prior_layer_spec(d), seed)
    if zero:
        for p in net.parameters():
            p[...] = 0.0
    return PriorClassifier(net)


def train_prior(X, y, epochs=1000, batch_size=None, lr=0.001, seed=0):
    """Fit the prior on anchor rows with mean BCE and Adam; returns a frozen classifier.

    One epoch is a full shuffled pass over the rows in mini-batches.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(np.unique(y)) < 2:
        raise DataError("prior classifier needs anchors from both classes")
    rng = np.random.default_rng(seed)
    clf = new_prior(X.shape[1], seed=int(rng.integers(2**31)))
    bs = default_batch_size(len(y)) if batch_size is None else int(batch_size)
    bs = max(1, min(bs, len(y)))
    opt = Adam(clf.net.parameters(), lr=lr)
    for e in range(epochs):
        order = rng.permutation(len(y))
        total = 0.0
        for start in range(0, len(y), bs):
            rows = order[start:start + bs]
            acts = forward(clf.net, X[rows])
            loss, g = bce(acts[-1], y[rows, None])
            grads, _ = backward(clf.net, acts, g)
            opt.step(flat_grads(grads))
            total += loss * len(rows)
        if (e + 1) % 200 == 0:
            log.info("prior epoch %d/%d  loss %.4f", e + 1, epochs, total / len(y))
    return clf.freeze()


def score(clf, X):
    """Final sigmoid output in [0, 1]; near 1 means minority."""
    return clf.activations(X)[-1][:, 0]


def classify(clf, X):
    return (score(clf, X) >= clf.threshold).astype(np.int64)


def class_representation(clf, X):
    return clf.activations(X)[REPRESENTATION_LAYER]


def filter_misclassified(clf, data, safeguard=True):
    """Keep rows whose predicted label matches the true label.

    When more than half of the minority rows would be dropped and
    ``safeguard`` is on, misclassified minority rows are kept and a warning
    is issued.
    """
    pred = classify(clf, data.features)
    keep = pred == data.labels
    minority = data.labels == 1
    n_min = int(minority.sum())
    lost = int((minority & ~keep).sum())
    if safeguard and n_min and lost > MAX_MINORITY_LOSS * n_min:
        warnings.warn(
            f"filtering would remove {lost} of {n_min} minority rows; keeping them",
            RuntimeWarning, stacklevel=2,
        )
        keep = keep | minority
    return data.subset(np.flatnonzero(keep))
