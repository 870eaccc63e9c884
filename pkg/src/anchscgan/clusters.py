"""k-means over anchor rows and the positive/negative choice for the anchor loss."""

import warnings
from dataclasses import dataclass

import numpy as np

from .neighbors import squared_distances

DEFAULT_CLUSTERS = 5
N_NEAREST_POSITIVES = 2


@dataclass(frozen=True)
class KMeansResult:
    centroids: np.ndarray
    assignments: np.ndarray
    inertia: float
    n_iter: int
    history: tuple


def _farthest_point_init(X, c, rng):
    first = int(rng.integers(len(X)))
    chosen = [first]
    closest = squared_distances(X[first], X)[0]
    for _ in range(1, c):
        nxt = int(np.argmax(closest))
        chosen.append(nxt)
        closest = np.minimum(closest, squared_distances(X[nxt], X)[0])
    return X[chosen].copy()


def kmeans(points, c, seed=0, max_iter=100, tol=1e-8):
    """Lloyd's algorithm with seeded farthest-point initialisation.

    ``c`` is lowered (with a warning) to the number of distinct points.
    An empty cluster is re-seeded to the point farthest from its centroid.
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2 or len(X) == 0:
        raise ValueError("kmeans needs a non-empty 2-D point matrix")
    if c < 1:
        raise ValueError("c must be >= 1")
    distinct = len(np.unique(X, axis=0))
    if c > distinct:
        warnings.warn(f"reducing cluster count from {c} to {distinct}", RuntimeWarning, stacklevel=2)
        c = distinct
    rng = np.random.default_rng(seed)
    cent = _farthest_point_init(X, c, rng)
    assign = None
    prev_inertia = np.inf
    history = []
    it = 0
    for it in range(1, max_iter + 1):
        d2 = squared_distances(X, cent)
        new_assign = np.argmin(d2, axis=1)
        inertia = float(d2[np.arange(len(X)), new_assign].sum())
        history.append(inertia)
        if assign is not None and np.array_equal(new_assign, assign):
            break
        if prev_inertia - inertia < tol and assign is not None:
            assign = new_assign
            break
        assign = new_assign
        prev_inertia = inertia
        for j in range(c):
            members = assign == j
            if members.any():
                cent[j] = X[members].mean(axis=0)
            else:
                own = d2[np.arange(len(X)), assign]
                far = int(np.argmax(own))
                cent[j] = X[far]
                assign[far] = j
    d2 = squared_distances(X, cent)
    assign = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(len(X)), assign].sum())
    return KMeansResult(cent, assign, inertia, it, tuple(history))


@dataclass(frozen=True)
class CentroidSet:
    minority_centroids: np.ndarray
    majority_centroids: np.ndarray
    c: int
    inertia_minority: float
    inertia_majority: float


def build_centroids(X, y, c=DEFAULT_CLUSTERS, seed=0):
    y = np.asarray(y)
    rng = np.random.default_rng(seed)
    s_min, s_maj = (int(s) for s in rng.integers(2**31, size=2))
    res_min = kmeans(X[y == 1], c, seed=s_min)
    res_maj = kmeans(X[y == 0], c, seed=s_maj)
    return CentroidSet(res_min.centroids, res_maj.centroids, c,
                       res_min.inertia, res_maj.inertia)


def pick_positive(x_gen, same_class_centroids, rng, n_nearest=N_NEAREST_POSITIVES):
    """Index of a positive centroid per generated row, uniform over its nearest few."""
    x_gen = np.atleast_2d(x_gen)
    c = len(same_class_centroids)
    if c == 1:
        return np.zeros(len(x_gen), dtype=np.int64)
    n_nearest = min(n_nearest, c)
    d2 = squared_distances(x_gen, same_class_centroids)
    nearest = np.argsort(d2, axis=1, kind="stable")[:, :n_nearest]
    pick = rng.integers(n_nearest, size=len(x_gen))
    return nearest[np.arange(len(x_gen)), pick]


def list_negatives(opposite_centroids):
    return [row for row in np.asarray(opposite_centroids)]
