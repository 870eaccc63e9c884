"""Exact Euclidean k-nearest-neighbour search.

Brute force is the reference path.  The optional KD-tree path only proposes
candidates; final distances and ordering are always recomputed with the same
arithmetic as brute force, so both paths return identical indices.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree


def squared_distances(queries, points):
    """(q, n) squared distances, accumulated feature by feature in a fixed order."""
    queries = np.atleast_2d(queries)
    out = np.zeros((queries.shape[0], points.shape[0]))
    for j in range(points.shape[1]):
        diff = queries[:, j, None] - points[None, :, j]
        out += diff * diff
    return out


def _rank(d2, candidates, k):
    # stable sort on distance keeps lower indices first among ties
    order = np.argsort(d2, kind="stable")[:k]
    return candidates[order]


class NeighborIndex:
    def __init__(self, points, accelerate=False):
        self.points = np.asarray(points, dtype=np.float64)
        if self.points.ndim != 2:
            raise ValueError("points must be a 2-D matrix")
        self.tree = cKDTree(self.points) if accelerate else None

    @property
    def n(self):
        return self.points.shape[0]

    def _check_k(self, k, exclude):
        limit = self.n - (0 if exclude is None else 1)
        if not 1 <= k <= limit:
            raise ValueError(f"k={k} out of range [1, {limit}]")

    def knn(self, query, k, exclude=None):
        """Indices of the ``k`` nearest points, sorted by (distance, index)."""
        self._check_k(k, exclude)
        q = np.asarray(query, dtype=np.float64).reshape(1, -1)
        if self.tree is None:
            cand = np.arange(self.n)
        else:
            kk = k if exclude is None else k + 1
            dist, _ = self.tree.query(q[0], k=kk)
            radius = float(np.atleast_1d(dist)[-1])
            radius = radius * (1.0 + 1e-9) + 1e-12
            cand = np.sort(np.asarray(self.tree.query_ball_point(q[0], radius), dtype=np.int64))
        d2 = squared_distances(q, self.points[cand])[0]
        if exclude is not None:
            d2[cand == exclude] = np.inf
        return _rank(d2, cand, k)

    def knn_rows(self, rows, k, chunk=256):
        """Self-excluding neighbours of the indexed rows ``rows``: (len(rows), k)."""
        rows = np.asarray(rows, dtype=np.int64)
        self._check_k(k, 0)
        if self.tree is not None:
            return np.array([self.knn(self.points[r], k, exclude=r) for r in rows],
                            dtype=np.int64).reshape(len(rows), k)
        out = np.empty((len(rows), k), dtype=np.int64)
        cand = np.arange(self.n)
        for start in range(0, len(rows), chunk):
            block = rows[start:start + chunk]
            d2 = squared_distances(self.points[block], self.points)
            d2[np.arange(len(block)), block] = np.inf
            order = np.argsort(d2, axis=1, kind="stable")[:, :k]
            out[start:start + len(block)] = cand[order]
        return out


def knn(index, query, k, exclude=None):
    return index.knn(query, k, exclude)


@dataclass(frozen=True)
class FrequencyTable:
    """How many minority neighbourhoods each majority row falls in."""

    majority_rows: np.ndarray
    counts: np.ndarray
    k: int

    def count(self, row):
        hit = np.flatnonzero(self.majority_rows == row)
        if len(hit) == 0:
            raise KeyError(row)
        return int(self.counts[hit[0]])

    def as_dict(self):
        return {int(r): int(c) for r, c in zip(self.majority_rows, self.counts)}


def majority_frequency_table(X, y, k, index=None, neighbors=None):
    """Count, for every majority row, the minority rows whose k-NN contain it.

    Neighbours are searched over all rows of ``X`` (both classes).
    ``neighbors`` may pass precomputed k-NN lists of the minority rows.
    """
    y = np.asarray(y)
    P = np.flatnonzero(y == 1)
    N = np.flatnonzero(y == 0)
    if len(P) == 0 or len(N) == 0:
        raise ValueError("both classes must be non-empty")
    if neighbors is None:
        index = index or NeighborIndex(X)
        neighbors = index.knn_rows(P, k)
    per_row = np.bincount(neighbors.ravel(), minlength=len(y))
    return FrequencyTable(N, per_row[N].astype(np.int64), k)
