"""Slow, literal re-implementations used as independent test oracles.

Everything here is plain Python loops over lists; nothing is shared with the
package except the seeded draw convention
``default_rng(seed).choice(sorted_pool, size, replace=False)``.
"""

import math

import numpy as np


def sqdist(a, b):
    total = 0.0
    for u, v in zip(a, b):
        total += (u - v) * (u - v)
    return total


def knn_literal(X, i, k):
    """k nearest rows of row i (self excluded), ties broken by lower index."""
    pairs = sorted((sqdist(X[i], X[j]), j) for j in range(len(X)) if j != i)
    return [j for _, j in pairs[:k]]


def minority_rule(X, y, k, noise_removal):
    """(anchors, noise) by the two-pass rule at neighbourhood size k."""
    n = len(y)
    minority = [i for i in range(n) if y[i] == 1]
    first, noise = set(), set()
    nbrs = {}
    for i in minority:
        nb = knn_literal(X, i, k)
        nbrs[i] = nb
        n_maj = sum(1 for j in nb if y[j] == 0)
        if 1 <= n_maj < k:
            first.add(i)
        elif n_maj == k and noise_removal:
            noise.add(i)
    anchors = set(first)
    for i in minority:
        if i in first or i in noise:
            continue
        for j in nbrs[i]:
            if j in first:
                anchors.add(i)
                break
    return anchors, noise


def majority_counts(X, y, k):
    counts = {i: 0 for i in range(len(y)) if y[i] == 0}
    for i in range(len(y)):
        if y[i] == 1:
            for j in knn_literal(X, i, k):
                if y[j] == 0:
                    counts[j] += 1
    return counts


def majority_rule(X, y, k):
    """(anchors, overlap) from the minority-neighbourhood frequency table."""
    anchors, overlap = set(), set()
    for j, c in majority_counts(X, y, k).items():
        if c > k / 2:
            overlap.add(j)
        elif 0 < c < k / 2:
            anchors.add(j)
    return anchors, overlap


def anchor_selection(X, y, k, noise_removal, seed):
    """Full selection with balancing; returns a plain dict."""
    X = [list(map(float, row)) for row in X]
    y = [int(v) for v in y]
    n = len(y)
    amin, noise = minority_rule(X, y, k, noise_removal)
    amaj, overlap = majority_rule(X, y, k)
    blocked = noise | overlap
    out = {"noise": sorted(noise), "overlap": sorted(overlap), "k_min": k, "k_maj": k,
           "exhausted": False}
    if len(amin) != len(amaj):
        grow_min = len(amin) < len(amaj)
        selected = set(amin if grow_min else amaj)
        target = len(amaj) if grow_min else len(amin)
        kk = k
        cand = set()
        while len(selected) + len(cand) < target and kk + 2 <= n - 1:
            kk += 2
            if grow_min:
                found, _ = minority_rule(X, y, kk, noise_removal)
            else:
                found, _ = majority_rule(X, y, kk)
            cand = found - selected - blocked
        pool = sorted(cand)
        take = min(target - len(selected), len(pool))
        if take > 0:
            drawn = np.random.default_rng(seed).choice(np.array(pool, dtype=np.int64), size=take,
                                                       replace=False)
            selected |= set(int(v) for v in drawn)
        out["exhausted"] = len(selected) < target
        if grow_min:
            amin, out["k_min"] = selected, kk
        else:
            amaj, out["k_maj"] = selected, kk
    out["minority"] = sorted(amin)
    out["majority"] = sorted(amaj)
    return out


def smote_literal(X_min, k, seed, g):
    """SMOTE rows with the draw order parents, neighbour picks, deltas."""
    X_min = [list(map(float, r)) for r in X_min]
    rng = np.random.default_rng(seed)
    parents = rng.integers(len(X_min), size=g)
    picks = rng.integers(k, size=g)
    deltas = rng.random(g)
    rows = []
    for p, q, t in zip(parents, picks, deltas):
        nb = knn_literal(X_min, int(p), k)[int(q)]
        rows.append([a + t * (b - a) for a, b in zip(X_min[p], X_min[nb])])
    return np.array(rows)


def on_segment(x, a, b, tol=1e-9):
    """True when x = a + t (b - a) for some t in [0, 1], within tol."""
    x, a, b = (np.asarray(v, dtype=float) for v in (x, a, b))
    ab = b - a
    den = float(ab @ ab)
    if den == 0.0:
        return float(np.max(np.abs(x - a))) <= tol
    t = float((x - a) @ ab) / den
    if t < -tol or t > 1 + tol:
        return False
    return float(np.max(np.abs(a + t * ab - x))) <= tol


def metrics_closed_form(tp, fp, tn, fn):
    """Precision, recall, specificity, F1, G-mean, AUC via mpmath at 50 digits."""
    import mpmath
    mpmath.mp.dps = 50
    tp, fp, tn, fn = (mpmath.mpf(v) for v in (tp, fp, tn, fn))

    def ratio(a, b):
        return a / b if b else mpmath.mpf(0)

    p = ratio(tp, tp + fp)
    r = ratio(tp, tp + fn)
    s = ratio(tn, tn + fp)
    f1 = ratio(2 * p * r, p + r)
    return {"precision": p, "recall": r, "specificity": s, "f1": f1,
            "gmean": mpmath.sqrt(r * s), "auc": (r + s) / 2}


def friedman_literal(matrix, higher_is_better=True):
    """Chi-square Friedman statistic with average ranks for ties, pure Python."""
    n = len(matrix)
    k = len(matrix[0])
    sums = [0.0] * k
    for row in matrix:
        keyed = [-v if higher_is_better else v for v in row]
        order = sorted(range(k), key=lambda j: keyed[j])
        ranks = [0.0] * k
        i = 0
        while i < k:
            j = i
            while j + 1 < k and keyed[order[j + 1]] == keyed[order[i]]:
                j += 1
            avg = (i + j) / 2.0 + 1.0
            for t in range(i, j + 1):
                ranks[order[t]] = avg
            i = j + 1
        for j in range(k):
            sums[j] += ranks[j]
    R = [s / n for s in sums]
    chi2 = 12.0 * n / (k * (k + 1)) * (sum(r * r for r in R) - k * (k + 1) ** 2 / 4.0)
    return chi2, R


def chi2_sf_literal(x, df):
    """Upper tail of chi-square via the regularised incomplete gamma (mpmath)."""
    import mpmath
    mpmath.mp.dps = 50
    return float(mpmath.gammainc(mpmath.mpf(df) / 2, mpmath.mpf(x) / 2, mpmath.inf, regularized=True))


def sigmoid(t):
    return 1.0 / (1.0 + math.exp(-t))
