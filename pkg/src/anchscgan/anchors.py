"""Boundary anchor selection: minority anchors, majority anchors, class balancing.

All indices are row positions in the training matrix.  Neighbourhoods are
searched over the whole training set (both classes) and never contain the
query row itself.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .neighbors import NeighborIndex, majority_frequency_table

log = logging.getLogger(__name__)

DEFAULT_K = 5
NOISE_REMOVAL_MAX_IR = 30.0
K_STEP = 2


@dataclass(frozen=True)
class AnchorSet:
    minority_indices: np.ndarray
    majority_indices: np.ndarray
    k_used_minority: int
    k_used_majority: int
    discarded_noise: np.ndarray
    overlap_discard: np.ndarray
    exhausted: bool = False

    @property
    def indices(self):
        return np.sort(np.concatenate([self.minority_indices, self.majority_indices]))


def _as_array(values):
    return np.array(sorted(int(v) for v in values), dtype=np.int64)


def _minority_passes(y, neighbors, P, k, noise_removal):
    """Both minority passes given the (|P|, k) neighbour lists of ``P``."""
    maj_counts = (y[neighbors] == 0).sum(axis=1)
    first = (maj_counts >= 1) & (maj_counts < k)
    noise = (maj_counts == k) if noise_removal else np.zeros(len(P), dtype=bool)
    # single second pass: neighbours are checked against the first-pass set only
    near_pass1 = np.isin(neighbors, P[first]).any(axis=1)
    second = near_pass1 & ~first & ~noise
    return set(P[first | second].tolist()), set(P[noise].tolist())


def select_minority_anchors(X, y, k, noise_removal=True, index=None):
    """Return ``(anchors, noise)`` as sorted index arrays.

    A minority row is a first-pass anchor when 1 <= (#majority neighbours) < k,
    and noise when all k neighbours are majority.  A second, single pass adds
    remaining minority rows that have a first-pass anchor among their neighbours.
    """
    y = np.asarray(y)
    P = np.flatnonzero(y == 1)
    if len(P) == 0:
        raise ValueError("no minority rows")
    index = index or NeighborIndex(X)
    nbrs = index.knn_rows(P, k)
    anchors, noise = _minority_passes(y, nbrs, P, k, noise_removal)
    return _as_array(anchors), _as_array(noise)


def classify_majority(freq):
    """Split majority rows by frequency: ``(anchors, overlap_discard)``."""
    half = freq.k / 2.0
    c = freq.counts
    anchors = freq.majority_rows[(c > 0) & (c < half)]
    overlap = freq.majority_rows[c > half]
    return np.sort(anchors), np.sort(overlap)


def select_majority_anchors(X, y, k, freq=None, index=None):
    """Majority rows in ``0 < count < k/2`` minority neighbourhoods are anchors;
    rows with ``count > k/2`` are overlap discards; ``count == k/2`` is neither."""
    if freq is None:
        freq = majority_frequency_table(X, y, k, index=index)
    elif freq.k != k:
        raise ValueError("frequency table was built with a different k")
    return classify_majority(freq)


def balance_anchors(X, y, k0, min_anchors, maj_anchors, seed, noise=(), overlap=(),
                    noise_removal=True, index=None):
    """Grow the smaller anchor side with k += 2 until enough candidates exist,
    then draw the shortfall uniformly without replacement.

    Candidates are rows selected by the deficient side's rule at the enlarged k
    that are not yet anchors and were not discarded at ``k0``.  Growth stops
    early once k would exceed the neighbour pool (n - 1).
    """
    y = np.asarray(y)
    index = index or NeighborIndex(X)
    n = len(y)
    sel_min = set(int(v) for v in min_anchors)
    sel_maj = set(int(v) for v in maj_anchors)
    blocked = set(int(v) for v in noise) | set(int(v) for v in overlap)
    k_min = k_maj = k0
    if len(sel_min) == len(sel_maj):
        return AnchorSet(_as_array(sel_min), _as_array(sel_maj), k0, k0,
                         _as_array(noise), _as_array(overlap))

    grow_minority = len(sel_min) < len(sel_maj)
    selected, target = (sel_min, len(sel_maj)) if grow_minority else (sel_maj, len(sel_min))
    own_class = 1 if grow_minority else 0
    P = np.flatnonzero(y == 1)

    k = k0
    candidates = set()
    ranking = None
    while len(selected) + len(candidates) < target and k + K_STEP <= n - 1:
        k += K_STEP
        if ranking is None:
            # one full ranking; the k-NN list at any k is its prefix
            ranking = index.knn_rows(P, n - 1)
        nbrs = ranking[:, :k]
        if grow_minority:
            found, _ = _minority_passes(y, nbrs, P, k, noise_removal)
        else:
            freq = majority_frequency_table(X, y, k, neighbors=nbrs)
            found, _ = classify_majority(freq)
            found = set(found.tolist())
        candidates = (set(found) - selected) - blocked

    need = target - len(selected)
    pool = np.array(sorted(candidates), dtype=np.int64)
    rng = np.random.default_rng(seed)
    take = min(need, len(pool))
    drawn = rng.choice(pool, size=take, replace=False) if take > 0 else np.empty(0, np.int64)
    selected = selected | set(int(v) for v in drawn)
    exhausted = len(selected) < target
    if exhausted:
        log.warning("anchor balancing exhausted class %d at k=%d (%d of %d)",
                    own_class, k, len(selected), target)
    if grow_minority:
        k_min = k
        sel_min = selected
    else:
        k_maj = k
        sel_maj = selected
    return AnchorSet(_as_array(sel_min), _as_array(sel_maj), k_min, k_maj,
                     _as_array(noise), _as_array(overlap), exhausted)


def default_noise_removal(y):
    y = np.asarray(y)
    n1 = np.count_nonzero(y == 1)
    ir = np.count_nonzero(y == 0) / n1 if n1 else np.inf
    return ir < NOISE_REMOVAL_MAX_IR


def select_anchors(train, k=DEFAULT_K, noise_removal=None, seed=0):
    """Run the full anchor selection on a binarised training set.

    Returns ``(AnchorSet, pruned_train)`` where the pruned set drops minority
    noise and overlapping majority rows.  ``noise_removal=None`` enables noise
    removal only when the imbalance ratio is below 30.
    """
    X, y = train.features, train.labels
    if noise_removal is None:
        noise_removal = default_noise_removal(y)
    index = NeighborIndex(X)
    min_anch, noise = select_minority_anchors(X, y, k, noise_removal, index=index)
    maj_anch, overlap = select_majority_anchors(X, y, k, index=index)
    anchors = balance_anchors(X, y, k, min_anch, maj_anch, seed, noise, overlap,
                              noise_removal, index=index)
    drop = np.zeros(train.n, dtype=bool)
    drop[anchors.discarded_noise] = True
    drop[anchors.overlap_discard] = True
    return anchors, train.subset(np.flatnonzero(~drop))


def anchor_table(train, anchors):
    """Rows of ``(row_index, class, is_anchor, is_noise, is_overlap_discard)``."""
    is_anchor = np.zeros(train.n, dtype=int)
    is_anchor[anchors.indices] = 1
    noise = np.zeros(train.n, dtype=int)
    noise[anchors.discarded_noise] = 1
    over = np.zeros(train.n, dtype=int)
    over[anchors.overlap_discard] = 1
    return [(int(train.row_ids[i]), int(train.labels[i]), int(is_anchor[i]), int(noise[i]), int(over[i]))
            for i in range(train.n)]
