"""Imbalanced-learning metrics, the downstream SVM, repeat benchmarking and the Friedman test."""

import json
import logging
import math
import traceback
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats
from sklearn.svm import SVC

from .baselines import METHODS, OversamplerConfig, run_baseline
from .data import apply_scaler, fit_scaler, stratified_split
from .errors import DataError

log = logging.getLogger(__name__)

METRIC_NAMES = ("precision", "recall", "specificity", "f1", "gmean", "auc")


# -- metrics ----------------------------------------------------------------

@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("counts must be non-negative")

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn


def confusion(y_true, y_pred):
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    return ConfusionCounts(
        tp=int(np.sum((y_true == 1) & (y_pred == 1))),
        fp=int(np.sum((y_true == 0) & (y_pred == 1))),
        tn=int(np.sum((y_true == 0) & (y_pred == 0))),
        fn=int(np.sum((y_true == 1) & (y_pred == 0))),
    )


def _ratio(num, den):
    return num / den if den else 0.0


def metrics_from_counts(c):
    """Precision, recall, specificity, F1, G-mean and balanced-accuracy AUC.

    Any ratio with a zero denominator is 0.
    """
    precision = _ratio(c.tp, c.tp + c.fp)
    recall = _ratio(c.tp, c.tp + c.fn)
    specificity = _ratio(c.tn, c.tn + c.fp)
    f1 = _ratio(2.0 * precision * recall, precision + recall)
    return {
        "precision": precision,
        "recall": recall,
        "specificity": specificity,
        "f1": f1,
        "gmean": math.sqrt(recall * specificity),
        "auc": (recall + specificity) / 2.0,
    }


def roc_auc(scores, y_true):
    """Rank-based (Mann-Whitney) ROC AUC from continuous scores; ties count half."""
    y_true = np.asarray(y_true)
    pos = y_true == 1
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    if n_pos == 0 or n_neg == 0:
        return 0.0
    ranks = stats.rankdata(scores)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


# -- SVM --------------------------------------------------------------------

@dataclass
class SvmModel:
    support_vectors: np.ndarray
    dual_coef: np.ndarray  # y_i * alpha_i for each support vector
    bias: float
    gamma: float
    C: float
    estimator: object = field(repr=False, default=None)

    def decision_function(self, X):
        X = np.asarray(X, dtype=np.float64)
        d2 = (np.sum(X ** 2, axis=1)[:, None] + np.sum(self.support_vectors ** 2, axis=1)[None, :]
              - 2.0 * X @ self.support_vectors.T)
        K = np.exp(-self.gamma * np.maximum(d2, 0.0))
        return K @ self.dual_coef + self.bias


def scale_gamma(X):
    var = float(np.asarray(X).var())
    return 1.0 / (X.shape[1] * var) if var > 0 else 1.0


def train_svm(X, y, C=1.0, gamma="scale", tol=1e-3, seed=0):
    """RBF soft-margin SVM solved by libsvm's SMO-type dual solver."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if len(np.unique(y)) < 2:
        raise DataError("SVM training set has a single class")
    g = scale_gamma(X) if gamma == "scale" else float(gamma)
    est = SVC(C=C, kernel="rbf", gamma=g, tol=tol, random_state=seed)
    est.fit(X, y)
    # sklearn orders classes [0, 1]; its decision function is positive for class 1
    return SvmModel(est.support_vectors_.copy(), est.dual_coef_[0].copy(),
                    float(est.intercept_[0]), g, C, est)


def svm_predict(model, X):
    return model.estimator.predict(np.asarray(X, dtype=np.float64)).astype(np.int64)


# -- Friedman ---------------------------------------------------------------

@dataclass(frozen=True)
class FriedmanResult:
    statistic: float
    p_value: float
    average_ranks: np.ndarray
    df: int
    method: str = "chi2"


def average_ranks(scores, higher_is_better=True):
    S = np.asarray(scores, dtype=np.float64)
    keyed = -S if higher_is_better else S
    return np.vstack([stats.rankdata(row) for row in keyed])


def friedman_test(scores, higher_is_better=True, iman_davenport=False):
    """Friedman rank test over a (datasets x methods) score matrix.

    Rank 1 is the best method on a dataset; ties share average ranks.  The
    p-value is the chi-square upper tail with k-1 degrees of freedom, or the
    Iman-Davenport F refinement when requested.
    """
    S = np.asarray(scores, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] < 2 or S.shape[1] < 2:
        raise ValueError("need at least 2 datasets and 2 methods")
    n, k = S.shape
    R = average_ranks(S, higher_is_better).mean(axis=0)
    chi2 = 12.0 * n / (k * (k + 1)) * (np.sum(R ** 2) - k * (k + 1) ** 2 / 4.0)
    chi2 = max(float(chi2), 0.0)
    if not iman_davenport:
        return FriedmanResult(chi2, float(stats.chi2.sf(chi2, k - 1)), R, k - 1)
    denom = n * (k - 1) - chi2
    f = (n - 1) * chi2 / denom if denom > 0 else math.inf
    p = float(stats.f.sf(f, k - 1, (k - 1) * (n - 1))) if math.isfinite(f) else 0.0
    return FriedmanResult(f, p, R, k - 1, "iman-davenport")


# -- benchmark --------------------------------------------------------------

@dataclass
class CellResult:
    dataset: str
    method: str
    repeat: int
    seed: int
    counts: dict = None
    metrics: dict = None
    error: str = None


@dataclass
class MetricsReport:
    cells: list
    methods: list
    datasets: list
    friedman: dict = field(default_factory=dict)

    def means(self):
        """{dataset: {method: {metric: mean over successful repeats}}}."""
        out = {}
        for ds in self.datasets:
            out[ds] = {}
            for m in self.methods:
                rows = [c.metrics for c in self.cells
                        if c.dataset == ds and c.method == m and c.metrics is not None]
                if rows:
                    out[ds][m] = {k: float(np.mean([r[k] for r in rows])) for k in rows[0]}
        return out

    def score_matrix(self, metric):
        means = self.means()
        datasets = [ds for ds in self.datasets if all(m in means[ds] for m in self.methods)]
        return datasets, np.array([[means[ds][m][metric] for m in self.methods] for ds in datasets])

    def compute_friedman(self, metrics=("auc", "gmean", "f1")):
        self.friedman = {}
        for metric in metrics:
            datasets, S = self.score_matrix(metric)
            if len(self.methods) < 2 or len(datasets) < 2:
                self.friedman[metric] = {"skipped": "needs at least 2 methods and 2 complete datasets"}
                continue
            res = friedman_test(S)
            self.friedman[metric] = {
                "statistic": res.statistic, "p_value": res.p_value, "df": res.df,
                "average_ranks": dict(zip(self.methods, (float(r) for r in res.average_ranks))),
            }
        return self.friedman

    def to_dict(self):
        return {
            "datasets": list(self.datasets),
            "methods": list(self.methods),
            "cells": [asdict(c) for c in self.cells],
            "summary": self.means(),
            "friedman": self.friedman,
        }

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")


def oversample_with(method, train, seed, anchscgan_config=None, baseline_config=None):
    if method == "anchscgan":
        from .pipeline import PipelineConfig, oversample_anchscgan
        cfg = anchscgan_config or PipelineConfig()
        cfg = PipelineConfig(**{**cfg.__dict__, "seed": seed})
        return oversample_anchscgan(train, cfg)[0]
    bcfg = baseline_config or OversamplerConfig()
    return run_baseline(method, train, OversamplerConfig(bcfg.k_neighbors, bcfg.borderline_m, seed))


def evaluate_split(train, test, method, seed, anchscgan_config=None, baseline_config=None,
                   with_roc_auc=False):
    """Oversample ``train``, fit scaler + SVM on the result, score on ``test``."""
    balanced = oversample_with(method, train, seed, anchscgan_config, baseline_config)
    real_ids = balanced.row_ids[balanced.row_ids >= 0]
    if np.intersect1d(real_ids, test.row_ids).size:
        raise AssertionError("test rows leaked into training data")
    scaler = fit_scaler(balanced)
    svm = train_svm(apply_scaler(scaler, balanced.features), balanced.labels, seed=seed)
    Xt = apply_scaler(scaler, test.features)
    c = confusion(test.labels, svm_predict(svm, Xt))
    metrics = metrics_from_counts(c)
    if with_roc_auc:
        metrics["roc_auc"] = roc_auc(svm.estimator.decision_function(Xt), test.labels)
    return c, metrics


def _run_cell(name, data, method, r, seed, test_fraction, anchscgan_config, baseline_config, with_roc_auc):
    cell = CellResult(name, method, r, int(seed))
    try:
        train, test = stratified_split(data, test_fraction, seed)
        c, metrics = evaluate_split(train, test, method, seed, anchscgan_config, baseline_config,
                                    with_roc_auc)
        cell.counts = asdict(c)
        cell.metrics = metrics
    except Exception as exc:  # cell failures are recorded, not fatal
        cell.error = f"{type(exc).__name__}: {exc}"
        log.debug("cell %s/%s/%d failed\n%s", name, method, r, traceback.format_exc())
    return cell


def benchmark(datasets, methods, repeats=5, test_fraction=0.3, seeds=None,
              anchscgan_config=None, baseline_config=None, n_jobs=1, with_roc_auc=False):
    """Run every (dataset, method, repeat) cell.

    ``datasets`` is a sequence of ``(name, Dataset)``.  Repeat ``r`` uses
    ``seeds[r]`` for its split and oversampler, so all methods see the same
    split within a repeat.
    """
    methods = list(methods)
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    seeds = list(range(repeats)) if seeds is None else list(seeds)
    if len(seeds) < repeats:
        raise ValueError("fewer seeds than repeats")
    jobs = [(name, data, m, r, seeds[r]) for name, data in datasets for m in methods for r in range(repeats)]
    args = (test_fraction, anchscgan_config, baseline_config, with_roc_auc)
    if n_jobs == 1:
        cells = [_run_cell(*j, *args) for j in jobs]
    else:
        from joblib import Parallel, delayed
        cells = Parallel(n_jobs=n_jobs)(delayed(_run_cell)(*j, *args) for j in jobs)
    report = MetricsReport(cells, methods, [name for name, _ in datasets])
    report.compute_friedman()
    return report
