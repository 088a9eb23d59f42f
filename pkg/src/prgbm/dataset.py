"""In-memory data model, CSV ingestion, train/test splitting, and seeded RNG.

Everything downstream (trees, ensembles, the benchmark harness) consumes
``Dataset`` objects and draws randomness through ``SeededRng`` so that runs
are reproducible from a single 64-bit seed.
"""

from __future__ import annotations

import csv
import math
import sys
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Dataset",
    "DatasetError",
    "SeededRng",
    "TrainTestSplit",
    "default_feature_names",
    "load_csv",
    "save_csv",
    "split_train_test",
    "uniform",
]


class DatasetError(ValueError):
    """Raised for malformed input data: bad CSV cells, shape mismatches,
    non-finite values, degenerate split requests."""


def default_feature_names(n_features: int) -> list[str]:
    return [f"x{j + 1}" for j in range(n_features)]


class Dataset:
    """Dense numeric feature matrix plus a target vector.

    Rows are examples, columns are features. Values are float64 and must be
    finite; both arrays are frozen after construction so a Dataset can be
    shared across threads.
    """

    __slots__ = ("features", "targets", "feature_names")

    def __init__(self, features, targets, feature_names=None):
        features = np.ascontiguousarray(features, dtype=np.float64)
        targets = np.ascontiguousarray(targets, dtype=np.float64)
        if features.ndim != 2:
            raise DatasetError(f"features must be 2-D, got shape {features.shape}")
        if targets.ndim != 1:
            raise DatasetError(f"targets must be 1-D, got shape {targets.shape}")
        n, m = features.shape
        if n < 1 or m < 1:
            raise DatasetError(f"need at least one row and one column, got {n}x{m}")
        if targets.shape[0] != n:
            raise DatasetError(
                f"row count mismatch: {n} feature rows vs {targets.shape[0]} targets")
        if not np.isfinite(features).all():
            raise DatasetError("features contain non-finite values")
        if not np.isfinite(targets).all():
            raise DatasetError("targets contain non-finite values")
        if feature_names is not None:
            feature_names = [str(s) for s in feature_names]
            if len(feature_names) != m:
                raise DatasetError(
                    f"expected {m} feature names, got {len(feature_names)}")
        features.flags.writeable = False
        targets.flags.writeable = False
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "feature_names", feature_names)

    def __setattr__(self, name, value):
        raise AttributeError("Dataset is immutable")

    @property
    def n_examples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def effective_feature_names(self) -> list[str]:
        if self.feature_names is not None:
            return list(self.feature_names)
        return default_feature_names(self.n_features)

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=np.intp)
        return Dataset(self.features[indices], self.targets[indices],
                       self.feature_names)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (np.array_equal(self.features, other.features)
                and np.array_equal(self.targets, other.targets)
                and self.effective_feature_names() == other.effective_feature_names())

    __hash__ = None  # array contents make value hashing a trap

    def __repr__(self):
        return f"Dataset(n={self.n_examples}, m={self.n_features})"


class SeededRng:
    """Deterministic random source with explicit splitting.

    Backed by NumPy's PCG64 seeded through a ``SeedSequence``. The splitting
    rule is ``SeedSequence.spawn``: each call to :meth:`split` derives child
    sequences from the parent's entropy plus a spawn counter, so children are
    deterministic given the parent's state at split time and are not affected
    by (and do not affect) later draws from the parent's stream.
    """

    __slots__ = ("_seq", "generator")

    def __init__(self, seed):
        if isinstance(seed, np.random.SeedSequence):
            self._seq = seed
        else:
            seed = int(seed) & 0xFFFFFFFFFFFFFFFF  # 64-bit seed contract
            self._seq = np.random.SeedSequence(seed)
        self.generator = np.random.Generator(np.random.PCG64(self._seq))

    def split(self, n_children: int = 1) -> list["SeededRng"]:
        return [SeededRng(seq) for seq in self._seq.spawn(n_children)]

    def uniform(self, lo: float, hi: float) -> float:
        return uniform(self, lo, hi)

    def random(self, size=None):
        return self.generator.random(size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self.generator.normal(loc, scale, size)

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size)

    def permutation(self, n: int) -> np.ndarray:
        return self.generator.permutation(n)


def uniform(rng: SeededRng, lo: float, hi: float) -> float:
    """One draw from the half-open interval [lo, hi)."""
    lo = float(lo)
    hi = float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError(f"interval bounds must be finite, got [{lo}, {hi})")
    if lo >= hi:
        raise ValueError(f"empty interval: lo={lo} must be < hi={hi}")
    return float(rng.generator.uniform(lo, hi))


@dataclass(frozen=True)
class TrainTestSplit:
    """One 3/4 - 1/4 partition of a dataset into disjoint train/test parts."""

    train: Dataset
    test: Dataset
    repeat_index: int = 0


def split_train_test(d: Dataset, rng: SeededRng, repeat_index: int = 0) -> TrainTestSplit:
    """Uniform random partition into floor(3n/4) train rows and the rest.

    Row order within each part follows the original dataset, so a fixed seed
    gives byte-stable downstream results.
    """
    n = d.n_examples
    if n < 4:
        raise DatasetError(f"need at least 4 rows to split, got {n}")
    n_train = (3 * n) // 4
    perm = rng.permutation(n)
    train_idx = np.sort(perm[:n_train])
    test_idx = np.sort(perm[n_train:])
    return TrainTestSplit(d.subset(train_idx), d.subset(test_idx), repeat_index)


def _parse_cell(text: str, line_no: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DatasetError(
            f"unparseable value {text!r} at line {line_no}, column {column!r}")
    if not math.isfinite(value):
        raise DatasetError(
            f"non-finite value {text!r} at line {line_no}, column {column!r}")
    return value


def load_csv(path, target_column) -> Dataset:
    """Read a headered CSV and pull one column out as the target.

    ``target_column`` is matched against header names first; failing that, an
    integer (or digit string) is treated as a 0-based column index.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file, expected a header row")
        header = [h.strip() for h in header]
        if len(set(header)) != len(header):
            raise DatasetError(f"{path}: duplicate column names in header")
        target_idx = _resolve_column(header, target_column, path)
        feature_names = [h for i, h in enumerate(header) if i != target_idx]
        rows = []
        targets = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DatasetError(
                    f"{path}: line {line_no} has {len(row)} cells, expected {len(header)}")
            values = [_parse_cell(cell, line_no, header[i])
                      for i, cell in enumerate(row)]
            targets.append(values.pop(target_idx))
            rows.append(values)
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    return Dataset(np.array(rows, dtype=np.float64),
                   np.array(targets, dtype=np.float64),
                   feature_names)


def load_matrix_csv(path) -> tuple[list[str], np.ndarray]:
    """Read a headered CSV with every column as a feature (no target)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DatasetError(f"{path}: empty file, expected a header row")
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DatasetError(
                    f"{path}: line {line_no} has {len(row)} cells, expected {len(header)}")
            rows.append([_parse_cell(cell, line_no, header[i])
                         for i, cell in enumerate(row)])
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    return header, np.array(rows, dtype=np.float64)


def _resolve_column(header: list[str], target_column, path) -> int:
    name = str(target_column)
    if name in header:
        return header.index(name)
    try:
        idx = int(target_column)
    except (TypeError, ValueError):
        raise DatasetError(f"{path}: target column {target_column!r} not found "
                           f"among {header}")
    if not 0 <= idx < len(header):
        raise DatasetError(f"{path}: target column index {idx} out of range "
                           f"for {len(header)} columns")
    return idx


def save_csv(d: Dataset, path, target_name: str = "y") -> None:
    """Write a Dataset as a headered CSV with round-trippable float text.

    ``path`` may be ``-`` for stdout.
    """
    names = d.effective_feature_names()
    if target_name in names:
        raise DatasetError(f"target name {target_name!r} collides with a feature name")
    if path == "-":
        _write_csv(sys.stdout, d, names, target_name)
        return
    with open(path, "w", newline="\n") as fh:
        _write_csv(fh, d, names, target_name)


def _write_csv(fh, d: Dataset, names, target_name: str) -> None:
    fh.write(",".join(names + [target_name]) + "\n")
    for row, target in zip(d.features, d.targets):
        cells = [repr(float(v)) for v in row]
        cells.append(repr(float(target)))
        fh.write(",".join(cells) + "\n")
