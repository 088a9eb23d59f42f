"""Regression decision trees with three interchangeable split strategies.

Split rules are binary tests ``x[feature] <= threshold`` (boundary goes
left); split quality is variance reduction of the targets. The strategies:

* ``Deterministic`` - exhaustive scan of midpoints between consecutive
  distinct sorted values, per feature (CART-style).
* ``ExtremelyRandomized(n_candidates)`` - K candidates, each a uniform random
  non-constant feature with a uniform random threshold in that feature's
  node range; best of the K kept.
* ``PartiallyRandomized`` - one uniform random threshold per feature, every
  feature considered; best-scoring feature kept, split at its drawn
  threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import backend
from .dataset import SeededRng

__all__ = [
    "BuildStats",
    "Deterministic",
    "ExtremelyRandomized",
    "PartiallyRandomized",
    "SplitCandidate",
    "SplitRule",
    "Tree",
    "best_deterministic_split",
    "build_tree",
    "extremely_randomized_split",
    "partially_randomized_split",
    "predict_tree",
    "variance_reduction",
]

# Nodes whose target spread is at or below this are turned into leaves
# without consulting the splitter.
CONSTANT_TARGET_TOL = 1e-12


@dataclass(frozen=True)
class SplitRule:
    feature: int
    threshold: float


@dataclass(frozen=True)
class SplitCandidate:
    rule: SplitRule
    score: float


@dataclass(frozen=True)
class Deterministic:
    """Exhaustive midpoint split search."""


@dataclass(frozen=True)
class ExtremelyRandomized:
    """Best of ``n_candidates`` random (feature, threshold) draws."""

    n_candidates: int = 1

    def __post_init__(self):
        if self.n_candidates < 1:
            raise ValueError("n_candidates must be at least 1")


@dataclass(frozen=True)
class PartiallyRandomized:
    """One random threshold per feature; best feature wins."""


SplitterKind = Deterministic | ExtremelyRandomized | PartiallyRandomized


@dataclass
class BuildStats:
    """Split-search instrumentation, one entry per splitter invocation.

    ``split_evaluations[i]`` counts candidate splits scored at the i-th
    visited splittable node; with ``record_nodes`` the node's row indices are
    kept alongside so the counts can be re-derived from the data.
    """

    record_nodes: bool = False
    split_evaluations: list = field(default_factory=list)
    node_indices: list = field(default_factory=list)

    def add(self, n_evaluations: int, idx: np.ndarray) -> None:
        self.split_evaluations.append(int(n_evaluations))
        if self.record_nodes:
            self.node_indices.append(idx.copy())


def variance_reduction(targets, left_indices, right_indices) -> float:
    """Parent variance minus size-weighted child variances (biased variance).

    Reference implementation used as the scoring oracle in tests; the tree
    builder computes the same quantity through the backend kernels.
    """
    targets = np.asarray(targets, dtype=np.float64)
    left = np.asarray(left_indices, dtype=np.intp)
    right = np.asarray(right_indices, dtype=np.intp)
    if left.size == 0 or right.size == 0:
        raise ValueError("both sides of a split must be nonempty")
    if np.intersect1d(left, right).size:
        raise ValueError("split sides must be disjoint")
    parent = np.concatenate([targets[left], targets[right]])
    n = parent.size
    reduction = (np.var(parent)
                 - left.size / n * np.var(targets[left])
                 - right.size / n * np.var(targets[right]))
    return max(float(reduction), 0.0)


def _as_node_arrays(features, targets):
    X = np.ascontiguousarray(features, dtype=np.float64)
    y = np.ascontiguousarray(targets, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError("features must be (n, m) with matching 1-D targets")
    return X, y


def best_deterministic_split(features, targets, feature: int):
    """Best midpoint split of one feature, or None if it is constant."""
    X, y = _as_node_arrays(features, targets)
    if X.shape[0] < 2:
        raise ValueError("need at least 2 examples to split")
    idx = np.arange(X.shape[0], dtype=np.int64)
    cols = np.array([feature], dtype=np.int64)
    j, thr, score, _ = backend.best_split_deterministic(
        X, y, idx, float(y.sum()), cols)
    if j < 0:
        return None
    return SplitCandidate(SplitRule(j, thr), max(score, 0.0))


def partially_randomized_split(features, targets, rng: SeededRng):
    """One uniform threshold per non-constant feature; best feature wins."""
    X, y = _as_node_arrays(features, targets)
    if X.shape[0] < 2:
        raise ValueError("need at least 2 examples to split")
    idx = np.arange(X.shape[0], dtype=np.int64)
    found = _split_partially_randomized(X, y, idx, float(y.sum()), rng, None)
    if found is None:
        return None
    j, thr, score, _ = found
    return SplitCandidate(SplitRule(j, thr), max(score, 0.0))


def extremely_randomized_split(features, targets, n_candidates: int,
                               rng: SeededRng):
    """Best of ``n_candidates`` random feature/threshold draws."""
    X, y = _as_node_arrays(features, targets)
    if X.shape[0] < 2:
        raise ValueError("need at least 2 examples to split")
    idx = np.arange(X.shape[0], dtype=np.int64)
    found = _split_extremely_randomized(X, y, idx, float(y.sum()),
                                        n_candidates, rng, None)
    if found is None:
        return None
    j, thr, score, _ = found
    return SplitCandidate(SplitRule(j, thr), max(score, 0.0))


def _rescore_with_redraw(X, y, idx, y_sum, feats, thrs, mins, maxs, rng):
    """Score candidates; invalid ones (an empty side from floating-point
    ties) get one redraw of their threshold before being written off."""
    scores, n_left = backend.score_random_splits(X, y, idx, feats, thrs, y_sum)
    bad = np.nonzero(np.isneginf(scores))[0]
    n_redrawn = 0
    if bad.size:
        u = rng.random(bad.size)
        thrs = thrs.copy()
        thrs[bad] = mins[bad] + u * (maxs[bad] - mins[bad])
        re_scores, _ = backend.score_random_splits(
            X, y, idx, feats[bad], thrs[bad], y_sum)
        scores = scores.copy()
        scores[bad] = re_scores
        n_redrawn = int(bad.size)
    return scores, thrs, n_redrawn


def _split_partially_randomized(X, y, idx, y_sum, rng, stats):
    # One draw per feature regardless of admissibility keeps the stream
    # layout independent of the data.
    u = rng.random(X.shape[1])
    scores, thrs, mins, maxs, n_admissible, n_invalid = \
        backend.uniform_split_scores(X, y, idx, u, y_sum)
    if n_admissible == 0:
        if stats is not None:
            stats.add(0, idx)
        return None
    n_evals = n_admissible
    if n_invalid:
        # Rare: a drawn threshold rounded onto the node max. Redraw those
        # features once; a second failure writes the feature off.
        bad = np.nonzero(np.isneginf(scores) & (maxs > mins))[0].astype(np.int64)
        u2 = rng.random(bad.size)
        re_thrs = mins[bad] + u2 * (maxs[bad] - mins[bad])
        re_scores, _ = backend.score_random_splits(X, y, idx, bad, re_thrs, y_sum)
        scores = scores.copy()
        thrs = thrs.copy()
        scores[bad] = re_scores
        thrs[bad] = re_thrs
        n_evals += int(bad.size)
    if stats is not None:
        stats.add(n_evals, idx)
    best = int(np.argmax(scores))  # first max: lowest feature wins ties
    if np.isneginf(scores[best]):
        return None
    return best, float(thrs[best]), float(scores[best]), n_evals


def _split_extremely_randomized(X, y, idx, y_sum, n_candidates, rng, stats):
    mins, maxs = backend.feature_ranges(X, idx)
    admissible = np.nonzero(maxs > mins)[0].astype(np.int64)
    if admissible.size == 0:
        if stats is not None:
            stats.add(0, idx)
        return None
    picks = rng.integers(0, admissible.size, size=n_candidates)
    feats = admissible[picks]
    u = rng.random(n_candidates)
    lo = mins[feats]
    hi = maxs[feats]
    thrs = lo + u * (hi - lo)
    scores, thrs, n_redrawn = _rescore_with_redraw(
        X, y, idx, y_sum, feats, thrs, lo, hi, rng)
    n_evals = int(n_candidates) + n_redrawn
    if stats is not None:
        stats.add(n_evals, idx)
    # Ties: lowest feature index, then earliest draw.
    best = -1
    for c in range(n_candidates):
        if np.isneginf(scores[c]):
            continue
        if best < 0 or scores[c] > scores[best] or (
                scores[c] == scores[best] and feats[c] < feats[best]):
            best = c
    if best < 0:
        return None
    return int(feats[best]), float(thrs[best]), float(scores[best]), n_evals


def _split_deterministic(X, y, idx, y_sum, rng, mtry, stats):
    features = None
    if mtry is not None and mtry < X.shape[1]:
        chosen = rng.generator.choice(X.shape[1], size=mtry, replace=False)
        features = np.sort(chosen).astype(np.int64)
    j, thr, score, n_evals = backend.best_split_deterministic(
        X, y, idx, y_sum, features)
    if stats is not None:
        stats.add(n_evals, idx)
    if j < 0:
        return None
    return j, thr, score, n_evals


class Tree:
    """Binary regression tree stored as flat node arrays.

    ``feature[i] < 0`` marks node i as a leaf with prediction ``value[i]``;
    internal nodes carry a split rule and child indices. Immutable once
    built.
    """

    __slots__ = ("feature", "threshold", "left", "right", "value",
                 "max_depth", "n_features")

    def __init__(self, feature, threshold, left, right, value,
                 max_depth: int, n_features: int):
        self.feature = np.ascontiguousarray(feature, dtype=np.int64)
        self.threshold = np.ascontiguousarray(threshold, dtype=np.float64)
        self.left = np.ascontiguousarray(left, dtype=np.int64)
        self.right = np.ascontiguousarray(right, dtype=np.int64)
        self.value = np.ascontiguousarray(value, dtype=np.float64)
        self.max_depth = int(max_depth)
        self.n_features = int(n_features)
        for arr in (self.feature, self.threshold, self.left, self.right,
                    self.value):
            arr.flags.writeable = False

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    @property
    def n_leaves(self) -> int:
        return int((self.feature < 0).sum())

    def predict(self, x):
        """Prediction for one feature vector or a batch (rows)."""
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.ndim == 1:
            if x.shape[0] != self.n_features:
                raise ValueError(f"expected {self.n_features} features, "
                                 f"got {x.shape[0]}")
            return float(backend.predict_nodes(
                self.feature, self.threshold, self.left, self.right,
                self.value, x[None, :])[0])
        if x.ndim != 2 or x.shape[1] != self.n_features:
            raise ValueError(f"expected (n, {self.n_features}) features, "
                             f"got shape {x.shape}")
        return backend.predict_nodes(self.feature, self.threshold, self.left,
                                     self.right, self.value, x)

    def to_dict(self) -> dict:
        """Nested {feature, threshold, left, right} / {value} records."""
        def node(i: int) -> dict:
            if self.feature[i] < 0:
                return {"value": float(self.value[i])}
            return {"feature": int(self.feature[i]),
                    "threshold": float(self.threshold[i]),
                    "left": node(int(self.left[i])),
                    "right": node(int(self.right[i]))}
        return node(0)

    @classmethod
    def from_dict(cls, data: dict, max_depth: int, n_features: int) -> "Tree":
        feature, threshold, left, right, value = [], [], [], [], []

        def add(record: dict) -> int:
            i = len(feature)
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(0.0)
            if "value" in record:
                value[i] = float(record["value"])
            else:
                feature[i] = int(record["feature"])
                threshold[i] = float(record["threshold"])
                left[i] = add(record["left"])
                right[i] = add(record["right"])
            return i

        add(data)
        return cls(feature, threshold, left, right, value, max_depth,
                   n_features)

    def __eq__(self, other):
        if not isinstance(other, Tree):
            return NotImplemented
        return (self.max_depth == other.max_depth
                and self.n_features == other.n_features
                and np.array_equal(self.feature, other.feature)
                and np.array_equal(self.threshold, other.threshold)
                and np.array_equal(self.left, other.left)
                and np.array_equal(self.right, other.right)
                and np.array_equal(self.value, other.value))

    __hash__ = None


def predict_tree(tree: Tree, x):
    return tree.predict(x)


def build_tree(features, targets, splitter: SplitterKind, max_depth: int,
               min_samples_split: int = 2, rng: SeededRng | None = None,
               mtry: int | None = None, stats: BuildStats | None = None) -> Tree:
    """Grow a tree top-down until depth, node size, or the splitter stops it.

    Leaf values are node target means. Nodes whose targets are constant to
    within ``CONSTANT_TARGET_TOL`` become leaves immediately. The randomized
    splitters require ``rng``; ``mtry`` restricts the deterministic search to
    a random feature subset per node (random-forest style).
    """
    X, y = _as_node_arrays(features, targets)
    n, m = X.shape
    if n < 1:
        raise ValueError("cannot build a tree on an empty dataset")
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    if min_samples_split < 2:
        raise ValueError("min_samples_split must be at least 2")
    if mtry is not None and not 1 <= mtry <= m:
        raise ValueError(f"mtry must be in [1, {m}], got {mtry}")
    if rng is None and not isinstance(splitter, Deterministic):
        raise ValueError("randomized splitters require an rng")
    if rng is None and mtry is not None and mtry < m:
        raise ValueError("feature subsampling requires an rng")

    if isinstance(splitter, Deterministic):
        def find_split(idx, y_sum):
            return _split_deterministic(X, y, idx, y_sum, rng, mtry, stats)
    elif isinstance(splitter, PartiallyRandomized):
        def find_split(idx, y_sum):
            return _split_partially_randomized(X, y, idx, y_sum, rng, stats)
    elif isinstance(splitter, ExtremelyRandomized):
        def find_split(idx, y_sum):
            return _split_extremely_randomized(X, y, idx, y_sum,
                                               splitter.n_candidates, rng,
                                               stats)
    else:
        raise TypeError(f"unknown splitter {splitter!r}")

    feature, threshold, left, right, value = [], [], [], [], []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    root_idx = np.arange(n, dtype=np.int64)
    stack = [(root_idx, 0, new_node())]
    while stack:
        idx, depth, pos = stack.pop()
        y_sum, y_min, y_max = backend.node_stats(y, idx)
        k = idx.shape[0]
        split = None
        if (depth < max_depth and k >= min_samples_split
                and y_max - y_min > CONSTANT_TARGET_TOL):
            split = find_split(idx, y_sum)
        if split is None:
            value[pos] = y_sum / k
            continue
        j, thr, _, _ = split
        idx_left, idx_right = backend.partition(X, idx, j, thr)
        if idx_left.size == 0 or idx_right.size == 0:
            raise AssertionError("splitter produced an empty child")
        feature[pos] = j
        threshold[pos] = thr
        left_pos = new_node()
        right_pos = new_node()
        left[pos] = left_pos
        right[pos] = right_pos
        # Left child is processed first (LIFO), fixing the rng draw order.
        stack.append((idx_right, depth + 1, right_pos))
        stack.append((idx_left, depth + 1, left_pos))
    return Tree(feature, threshold, left, right, value, max_depth, m)
