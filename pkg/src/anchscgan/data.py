"""Dataset container, CSV ingestion/emission, min-max scaling and stratified splits."""

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class Dataset:
    """Binary tabular data; label 1 is the minority class.

    ``raw_labels`` keeps the original label string of every row so OvR data
    can be written back unchanged.  ``row_ids`` tracks provenance: original
    row position for loaded data, -1 for synthetic rows.
    """

    features: np.ndarray
    labels: np.ndarray
    column_names: tuple
    minority_label_value: str = "1"
    label_column: str = "label"
    raw_labels: tuple = None
    row_ids: np.ndarray = field(default=None, compare=False)
    majority_label_value: str = "0"

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        if X.ndim != 2:
            raise DataError("features must be a 2-D matrix")
        y = np.asarray(self.labels).astype(np.int64)
        if y.shape != (X.shape[0],):
            raise DataError("labels length does not match feature rows")
        if not np.all((y == 0) | (y == 1)):
            raise DataError("labels must be 0 or 1")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain non-finite values")
        if len(self.column_names) != X.shape[1]:
            raise DataError("column_names length does not match feature width")
        raw = self.raw_labels
        if raw is None:
            raw = tuple(self.minority_label_value if v else self.majority_label_value for v in y)
        elif len(raw) != len(y):
            raise DataError("raw_labels length does not match rows")
        ids = np.arange(len(y)) if self.row_ids is None else np.asarray(self.row_ids, dtype=np.int64)
        X.flags.writeable = False
        y.flags.writeable = False
        ids.flags.writeable = False
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "column_names", tuple(self.column_names))
        object.__setattr__(self, "raw_labels", tuple(raw))
        object.__setattr__(self, "row_ids", ids)

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]

    @property
    def n_minority(self):
        return int(np.count_nonzero(self.labels == 1))

    @property
    def n_majority(self):
        return int(np.count_nonzero(self.labels == 0))

    @property
    def imbalance_ratio(self):
        return self.n_majority / self.n_minority if self.n_minority else math.inf

    def subset(self, rows):
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(
            self.features[rows], self.labels[rows], self.column_names,
            self.minority_label_value, self.label_column,
            tuple(self.raw_labels[i] for i in rows), self.row_ids[rows],
            self.majority_label_value,
        )

    def with_features(self, X):
        return Dataset(
            X, self.labels, self.column_names, self.minority_label_value,
            self.label_column, self.raw_labels, self.row_ids, self.majority_label_value,
        )

    def append_minority(self, X_new):
        """Return a copy with synthetic minority rows appended (row id -1)."""
        X_new = np.asarray(X_new, dtype=np.float64).reshape(-1, self.d)
        m = X_new.shape[0]
        return Dataset(
            np.vstack([self.features, X_new]),
            np.concatenate([self.labels, np.ones(m, dtype=np.int64)]),
            self.column_names, self.minority_label_value, self.label_column,
            self.raw_labels + (self.minority_label_value,) * m,
            np.concatenate([self.row_ids, np.full(m, -1, dtype=np.int64)]),
            self.majority_label_value,
        )


def make_dataset(X, y, column_names=None, **kw):
    X = np.asarray(X, dtype=np.float64)
    if column_names is None:
        column_names = [f"x{j}" for j in range(X.shape[1])]
    return Dataset(X, np.asarray(y), tuple(column_names), **kw)


def check_binary(data, require_minority=True):
    n1, n0 = data.n_minority, data.n_majority
    if n1 < 2 or n0 < 2:
        raise DataError(f"need at least 2 rows per class, got minority={n1} majority={n0}")
    if require_minority and n1 >= n0:
        raise DataError(f"class 1 not minority ({n1} minority rows vs {n0} majority rows)")


def load_csv(path, label_column, minority_value, require_minority=True):
    """Read a headered CSV; rows whose label equals ``minority_value`` become class 1.

    With ``require_minority`` the minority class must be strictly smaller than
    the rest, otherwise only the two-rows-per-class check applies.
    """
    if not os.path.isfile(path):
        raise DataError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not in header")
        li = header.index(label_column)
        names = [h for j, h in enumerate(header) if j != li]
        rows, raw = [], []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise DataError(f"{path}: line {lineno} has {len(rec)} cells, expected {len(header)}")
            vals = []
            for j, cell in enumerate(rec):
                if j == li:
                    continue
                cell = cell.strip()
                if cell == "":
                    raise DataError(f"{path}: blank cell at line {lineno}, column {header[j]!r}")
                try:
                    v = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}: non-numeric cell {cell!r} at line {lineno}, column {header[j]!r}"
                    ) from None
                if not math.isfinite(v):
                    raise DataError(f"{path}: non-finite cell {cell!r} at line {lineno}, column {header[j]!r}")
                vals.append(v)
            rows.append(vals)
            raw.append(rec[li].strip())
    X = np.array(rows, dtype=np.float64).reshape(len(rows), len(names))
    y = np.array([1 if r == minority_value else 0 for r in raw], dtype=np.int64)
    data = Dataset(X, y, tuple(names), minority_value, label_column, tuple(raw))
    check_binary(data, require_minority)
    return data


def write_csv(data, path):
    """Write header ``column_names + [label_column]``; floats at 17 significant digits."""
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise OSError(f"directory does not exist: {parent}")
    if os.path.isdir(path):
        raise OSError(f"path is a directory: {path}")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(data.column_names) + [data.label_column])
        for row, lab in zip(data.features, data.raw_labels):
            w.writerow([format(v, ".17g") for v in row] + [lab])


# -- scaling ------------------------------------------------------------------

@dataclass(frozen=True)
class Scaler:
    minimum: np.ndarray
    maximum: np.ndarray

    @property
    def d(self):
        return self.minimum.shape[0]

    def _check(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.d:
            raise DataError(f"width mismatch: scaler has {self.d} columns, got {X.shape}")
        return X


def fit_scaler(train):
    X = train.features if isinstance(train, Dataset) else np.asarray(train, dtype=np.float64)
    if X.shape[0] < 1:
        raise DataError("cannot fit scaler on zero rows")
    return Scaler(X.min(axis=0).copy(), X.max(axis=0).copy())


def apply_scaler(s, X):
    X = s._check(X)
    span = s.maximum - s.minimum
    const = span == 0
    out = (X - s.minimum) / np.where(const, 1.0, span)
    out[:, const] = 0.0
    return out


def invert_scaler(s, X):
    X = s._check(X)
    span = s.maximum - s.minimum
    out = X * span + s.minimum
    const = span == 0
    out[:, const] = s.minimum[const]
    return out


# -- splitting ----------------------------------------------------------------

def _round_half_up(x):
    return int(math.floor(x + 0.5))


def stratified_split(data, test_fraction, seed):
    """Per-class shuffled split; each class contributes ``round(count * fraction)`` test rows.

    Every class keeps at least one row on each side.  Row order inside each
    partition follows the input order.
    """
    if not 0.0 < test_fraction < 1.0:
        raise DataError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    rng = np.random.default_rng(seed)
    test_rows = []
    for cls in (0, 1):
        idx = np.flatnonzero(data.labels == cls)
        if len(idx) < 2:
            raise DataError(f"class {cls} has fewer than 2 rows")
        n_test = min(max(_round_half_up(len(idx) * test_fraction), 1), len(idx) - 1)
        test_rows.append(rng.permutation(idx)[:n_test])
    test = np.sort(np.concatenate(test_rows))
    mask = np.ones(data.n, dtype=bool)
    mask[test] = False
    return data.subset(np.flatnonzero(mask)), data.subset(test)


def binarize_labels(labels, minority_value):
    """OvR reduction of arbitrary label strings."""
    return np.array([1 if str(v) == minority_value else 0 for v in labels], dtype=np.int64)
