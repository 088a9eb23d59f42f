"""NumPy implementations of the split-search and prediction kernels.

Fallback for when the compiled extension is unavailable. The arithmetic is
kept operation-for-operation identical to the compiled kernels (same stable
sort order, same sequential prefix sums, same score expression) so the
deterministic splitter produces bit-identical trees on either backend.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def best_split_deterministic(X, y, idx, y_sum, features=None):
    """Exhaustive midpoint scan over the node rows ``idx``.

    Returns (feature, threshold, score, n_evaluations); feature is -1 when
    every candidate column is constant on the node. One evaluation per
    boundary between distinct consecutive sorted values. Ties on score go to
    the lowest feature index, then the lowest threshold.
    """
    k = idx.shape[0]
    Xn = X[idx]
    if features is None:
        cols = Xn
    else:
        cols = Xn[:, features]
    order = np.argsort(cols, axis=0, kind="stable")
    xs = np.take_along_axis(cols, order, axis=0)
    ys = y[idx][order]
    pref = np.cumsum(ys, axis=0)
    n_left = np.arange(1, k, dtype=np.float64)[:, None]
    s_left = pref[:-1]
    s_right = y_sum - s_left
    mu = y_sum / k
    scores = (s_left * s_left / n_left + s_right * s_right / (k - n_left)) / k - mu * mu
    boundary = xs[1:] > xs[:-1]
    n_evals = int(boundary.sum())
    if n_evals == 0:
        return -1, 0.0, -np.inf, 0
    scores = np.where(boundary, scores, -np.inf)
    flat = np.argmax(scores.T)  # feature-major: lowest feature wins ties
    j, i = divmod(flat, k - 1)
    threshold = (xs[i, j] + xs[i + 1, j]) / 2.0
    feature = int(j) if features is None else int(features[j])
    return feature, float(threshold), float(scores[i, j]), n_evals


def score_random_splits(X, y, idx, feats, thrs, y_sum):
    """Variance-reduction score for each candidate (feature, threshold) pair.

    Candidates that send every row to one side score -inf.
    """
    k = idx.shape[0]
    cols = X[idx][:, feats]
    mask = cols <= thrs[None, :]
    n_left = mask.sum(axis=0)
    s_left = y[idx] @ mask.astype(np.float64)
    valid = (n_left > 0) & (n_left < k)
    mu = y_sum / k
    s_right = y_sum - s_left
    with np.errstate(divide="ignore", invalid="ignore"):
        scores = (s_left * s_left / n_left
                  + s_right * s_right / (k - n_left)) / k - mu * mu
    scores = np.where(valid, scores, -np.inf)
    return scores, n_left.astype(np.int64)


def node_stats(y, idx):
    """Sequential sum, min, and max of the node targets.

    The sum is a strict left fold (np.cumsum) to match the compiled kernel
    bit for bit.
    """
    yn = y[idx]
    if yn.size == 1:
        v = float(yn[0])
        return v, v, v
    return float(np.cumsum(yn)[-1]), float(yn.min()), float(yn.max())


def uniform_split_scores(X, y, idx, u, y_sum):
    """One uniform threshold per feature from the node ranges; score each.

    ``u`` holds one [0, 1) draw per feature. Returns per-feature scores and
    thresholds plus the node ranges, the admissible (non-constant) feature
    count, and how many admissible features still produced an empty side
    (floating-point tie pathology, handled by the caller).
    """
    k = idx.shape[0]
    Xn = X[idx]
    mins = Xn.min(axis=0)
    maxs = Xn.max(axis=0)
    thrs = mins + u * (maxs - mins)
    mask = Xn <= thrs[None, :]
    n_left = mask.sum(axis=0)
    s_left = y[idx] @ mask.astype(np.float64)
    valid = (n_left > 0) & (n_left < k)
    mu = y_sum / k
    s_right = y_sum - s_left
    with np.errstate(divide="ignore", invalid="ignore"):
        scores = (s_left * s_left / n_left
                  + s_right * s_right / (k - n_left)) / k - mu * mu
    scores = np.where(valid, scores, -np.inf)
    admissible = maxs > mins
    n_invalid = int((admissible & ~valid).sum())
    return scores, thrs, mins, maxs, int(admissible.sum()), n_invalid


def feature_ranges(X, idx):
    Xn = X[idx]
    return Xn.min(axis=0), Xn.max(axis=0)


def partition(X, idx, feature, threshold):
    go_left = X[idx, feature] <= threshold
    return idx[go_left], idx[~go_left]


def predict_nodes(feature, threshold, left, right, value, X):
    """Route every row of X to a leaf and return the leaf values."""
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int64)
    active = np.nonzero(feature[node] >= 0)[0]
    while active.size:
        cur = node[active]
        xv = X[active, feature[cur]]
        nxt = np.where(xv <= threshold[cur], left[cur], right[cur])
        node[active] = nxt
        active = active[feature[nxt] >= 0]
    return value[node].copy()
