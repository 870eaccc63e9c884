"""Classical oversamplers: ROS, SMOTE, Borderline-SMOTE (borderline-1), ADASYN.

Each returns the input dataset with synthetic minority rows appended so that
both classes end up the same size.  Majority rows are never touched.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .neighbors import NeighborIndex


@dataclass(frozen=True)
class OversamplerConfig:
    k_neighbors: int = 5
    borderline_m: int = 10
    seed: int = 0


def _deficit(train):
    if train.n_minority == 0 or train.n_majority == 0:
        raise DataError("both classes must be present")
    return max(train.n_majority - train.n_minority, 0)


def _effective_k(n_min, k):
    if n_min < 2:
        raise DataError("need at least 2 minority rows to interpolate")
    if n_min <= k:
        warnings.warn(f"reducing k from {k} to {n_min - 1} (only {n_min} minority rows)",
                      RuntimeWarning, stacklevel=3)
        return n_min - 1
    return k


def minority_neighbors(X_min, k):
    """k nearest minority neighbours of each minority row (positions into ``X_min``)."""
    return NeighborIndex(X_min).knn_rows(np.arange(len(X_min)), k)


def interpolate(X_min, parents, nbr_table, picks, deltas):
    """``x + delta * (x_nn - x)`` for each (parent, neighbour pick, delta)."""
    x = X_min[parents]
    x_nn = X_min[nbr_table[parents, picks]]
    return x + deltas[:, None] * (x_nn - x)


def ros(train, seed=0):
    g = _deficit(train)
    if g == 0:
        return train
    rng = np.random.default_rng(seed)
    X_min = train.features[train.labels == 1]
    return train.append_minority(X_min[rng.integers(len(X_min), size=g)])


def smote(train, k=5, seed=0):
    g = _deficit(train)
    if g == 0:
        return train
    X_min = train.features[train.labels == 1]
    k = _effective_k(len(X_min), k)
    nbrs = minority_neighbors(X_min, k)
    rng = np.random.default_rng(seed)
    parents = rng.integers(len(X_min), size=g)
    picks = rng.integers(k, size=g)
    deltas = rng.random(g)
    return train.append_minority(interpolate(X_min, parents, nbrs, picks, deltas))


def _majority_share(train, k):
    """Fraction of majority rows among each minority row's k nearest (mixed pool)."""
    X, y = train.features, train.labels
    P = np.flatnonzero(y == 1)
    k = min(k, train.n - 1)
    nbrs = NeighborIndex(X).knn_rows(P, k)
    return (y[nbrs] == 0).sum(axis=1), k


def danger_set(train, m=10):
    """Positions (into the minority rows) with ``m/2 <= #majority < m`` among m nearest."""
    counts, m = _majority_share(train, m)
    return np.flatnonzero((counts >= m / 2.0) & (counts < m))


def borderline_smote(train, k=5, m=10, seed=0):
    g = _deficit(train)
    if g == 0:
        return train
    danger = danger_set(train, m)
    if len(danger) == 0:
        warnings.warn("no minority rows in danger; falling back to SMOTE", RuntimeWarning, stacklevel=2)
        return smote(train, k, seed)
    X_min = train.features[train.labels == 1]
    k = _effective_k(len(X_min), k)
    nbrs = minority_neighbors(X_min, k)
    rng = np.random.default_rng(seed)
    parents = danger[rng.integers(len(danger), size=g)]
    picks = rng.integers(k, size=g)
    deltas = rng.random(g)
    return train.append_minority(interpolate(X_min, parents, nbrs, picks, deltas))


def adasyn_allocation(ratios, total):
    """Split ``total`` synthetic rows proportionally to ``ratios``.

    Rounds half-up, then settles the rounding residue one row at a time on
    the largest ratios first (ties by position): a shortfall adds rows there,
    an excess removes them (skipping rows already at zero).
    """
    r = np.asarray(ratios, dtype=np.float64)
    if r.sum() <= 0:
        raise ValueError("ratios sum to zero")
    share = r / r.sum()
    g = np.floor(share * total + 0.5).astype(np.int64)
    diff = total - int(g.sum())
    order = np.argsort(-share, kind="stable")
    step = 1 if diff > 0 else -1
    i = 0
    while diff != 0:
        j = order[i % len(order)]
        if step > 0 or g[j] > 0:
            g[j] += step
            diff -= step
        i += 1
    return g


def adasyn(train, k=5, seed=0):
    g_total = _deficit(train)
    if g_total == 0:
        return train
    counts, kk = _majority_share(train, k)
    ratios = counts / kk
    if ratios.sum() == 0:
        warnings.warn("no minority row has majority neighbours; falling back to SMOTE",
                      RuntimeWarning, stacklevel=2)
        return smote(train, k, seed)
    alloc = adasyn_allocation(ratios, g_total)
    X_min = train.features[train.labels == 1]
    k = _effective_k(len(X_min), k)
    nbrs = minority_neighbors(X_min, k)
    rng = np.random.default_rng(seed)
    parents = np.repeat(np.arange(len(X_min)), alloc)
    picks = rng.integers(k, size=g_total)
    deltas = rng.random(g_total)
    return train.append_minority(interpolate(X_min, parents, nbrs, picks, deltas))


METHODS = ("none", "ros", "smote", "bsmote", "adasyn", "anchscgan")


def run_baseline(name, train, config=OversamplerConfig()):
    if name == "none":
        return train
    if name == "ros":
        return ros(train, config.seed)
    if name == "smote":
        return smote(train, config.k_neighbors, config.seed)
    if name == "bsmote":
        return borderline_smote(train, config.k_neighbors, config.borderline_m, config.seed)
    if name == "adasyn":
        return adasyn(train, config.k_neighbors, config.seed)
    raise ValueError(f"unknown baseline {name!r}")
