# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled split-search and prediction kernels.

Mirrors prgbm._pykernels operation for operation: the sort is stable on
(value, row position) and prefix sums accumulate sequentially in sorted
order, so the deterministic splitter matches the NumPy fallback bit for bit.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY
from libc.stdlib cimport free, malloc, qsort

cnp.import_array()

ctypedef cnp.int64_t i64

BACKEND_NAME = "compiled"


cdef struct SortItem:
    double x
    double y
    i64 pos


cdef int _cmp_sort_items(const void* a, const void* b) noexcept nogil:
    cdef const SortItem* ia = <const SortItem*> a
    cdef const SortItem* ib = <const SortItem*> b
    if ia.x < ib.x:
        return -1
    if ia.x > ib.x:
        return 1
    if ia.pos < ib.pos:
        return -1
    if ia.pos > ib.pos:
        return 1
    return 0


def best_split_deterministic(const double[:, ::1] X, const double[::1] y, const i64[::1] idx,
                             double y_sum, features=None):
    """Exhaustive midpoint scan over the node rows ``idx``.

    Returns (feature, threshold, score, n_evaluations); feature is -1 when
    every candidate column is constant on the node.
    """
    cdef const i64[::1] feats
    if features is None:
        feats = np.arange(X.shape[1], dtype=np.int64)
    else:
        feats = features
    cdef Py_ssize_t k = idx.shape[0]
    cdef Py_ssize_t n_feats = feats.shape[0]
    cdef SortItem* items = <SortItem*> malloc(k * sizeof(SortItem))
    if items == NULL:
        raise MemoryError()
    cdef Py_ssize_t jj, i
    cdef i64 j, best_feat = -1, n_evals = 0
    cdef double mu = y_sum / k
    cdef double best_score = -INFINITY, best_thr = 0.0
    cdef double s, sl, sr, score
    cdef double nl, nr
    with nogil:
        for jj in range(n_feats):
            j = feats[jj]
            for i in range(k):
                items[i].x = X[idx[i], j]
                items[i].y = y[idx[i]]
                items[i].pos = i
            qsort(items, k, sizeof(SortItem), _cmp_sort_items)
            s = 0.0
            for i in range(k - 1):
                s = s + items[i].y
                if items[i + 1].x > items[i].x:
                    n_evals = n_evals + 1
                    nl = <double> (i + 1)
                    nr = <double> (k - i - 1)
                    sl = s
                    sr = y_sum - sl
                    score = (sl * sl / nl + sr * sr / nr) / k - mu * mu
                    if score > best_score:
                        best_score = score
                        best_feat = j
                        best_thr = (items[i].x + items[i + 1].x) / 2.0
    free(items)
    if best_feat < 0:
        return -1, 0.0, -np.inf, 0
    return int(best_feat), best_thr, best_score, int(n_evals)


def score_random_splits(const double[:, ::1] X, const double[::1] y, const i64[::1] idx,
                        const i64[::1] feats, const double[::1] thrs, double y_sum):
    """Variance-reduction score for each candidate (feature, threshold) pair.

    Candidates that send every row to one side score -inf.
    """
    cdef Py_ssize_t k = idx.shape[0]
    cdef Py_ssize_t n_cand = feats.shape[0]
    scores_arr = np.empty(n_cand, dtype=np.float64)
    n_left_arr = np.empty(n_cand, dtype=np.int64)
    cdef double[::1] scores = scores_arr
    cdef i64[::1] n_left = n_left_arr
    cdef Py_ssize_t c, i
    cdef i64 j, nl
    cdef double t, sl, sr, mu = y_sum / k
    with nogil:
        for c in range(n_cand):
            j = feats[c]
            t = thrs[c]
            nl = 0
            sl = 0.0
            for i in range(k):
                if X[idx[i], j] <= t:
                    nl = nl + 1
                    sl = sl + y[idx[i]]
            n_left[c] = nl
            if nl == 0 or nl == k:
                scores[c] = -INFINITY
            else:
                sr = y_sum - sl
                scores[c] = (sl * sl / (<double> nl)
                             + sr * sr / (<double> (k - nl))) / k - mu * mu
    return scores_arr, n_left_arr


def node_stats(const double[::1] y, const i64[::1] idx):
    """Sequential sum, min, and max of the node targets."""
    cdef Py_ssize_t k = idx.shape[0]
    cdef double s = y[idx[0]]
    cdef double mn = s, mx = s, v
    cdef Py_ssize_t i
    with nogil:
        for i in range(1, k):
            v = y[idx[i]]
            s = s + v
            if v < mn:
                mn = v
            elif v > mx:
                mx = v
    return s, mn, mx


def uniform_split_scores(const double[:, ::1] X, const double[::1] y,
                         const i64[::1] idx, const double[::1] u, double y_sum):
    """One uniform threshold per feature from the node ranges; score each.

    Returns per-feature scores and thresholds plus the node ranges, the
    admissible (non-constant) feature count, and how many admissible features
    still produced an empty side.
    """
    cdef Py_ssize_t k = idx.shape[0]
    cdef Py_ssize_t m = X.shape[1]
    scores_arr = np.empty(m, dtype=np.float64)
    thrs_arr = np.empty(m, dtype=np.float64)
    mins_arr = np.empty(m, dtype=np.float64)
    maxs_arr = np.empty(m, dtype=np.float64)
    n_left_arr = np.zeros(m, dtype=np.int64)
    s_left_arr = np.zeros(m, dtype=np.float64)
    cdef double[::1] scores = scores_arr
    cdef double[::1] thrs = thrs_arr
    cdef double[::1] mins = mins_arr
    cdef double[::1] maxs = maxs_arr
    cdef i64[::1] n_left = n_left_arr
    cdef double[::1] s_left = s_left_arr
    cdef Py_ssize_t i, j
    cdef i64 n_admissible = 0, n_invalid = 0, nl
    cdef double v, yi, sl, sr, mu = y_sum / k
    with nogil:
        for j in range(m):
            mins[j] = X[idx[0], j]
            maxs[j] = X[idx[0], j]
        for i in range(1, k):
            for j in range(m):
                v = X[idx[i], j]
                if v < mins[j]:
                    mins[j] = v
                elif v > maxs[j]:
                    maxs[j] = v
        for j in range(m):
            thrs[j] = mins[j] + u[j] * (maxs[j] - mins[j])
        for i in range(k):
            yi = y[idx[i]]
            for j in range(m):
                if X[idx[i], j] <= thrs[j]:
                    n_left[j] = n_left[j] + 1
                    s_left[j] = s_left[j] + yi
        for j in range(m):
            nl = n_left[j]
            if nl == 0 or nl == k:
                scores[j] = -INFINITY
                if maxs[j] > mins[j]:
                    n_admissible = n_admissible + 1
                    n_invalid = n_invalid + 1
            else:
                n_admissible = n_admissible + 1
                sl = s_left[j]
                sr = y_sum - sl
                scores[j] = (sl * sl / (<double> nl)
                             + sr * sr / (<double> (k - nl))) / k - mu * mu
    return scores_arr, thrs_arr, mins_arr, maxs_arr, int(n_admissible), int(n_invalid)


def feature_ranges(const double[:, ::1] X, const i64[::1] idx):
    cdef Py_ssize_t k = idx.shape[0]
    cdef Py_ssize_t m = X.shape[1]
    mins_arr = np.empty(m, dtype=np.float64)
    maxs_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] mins = mins_arr
    cdef double[::1] maxs = maxs_arr
    cdef Py_ssize_t i, j
    cdef double v
    with nogil:
        for j in range(m):
            mins[j] = X[idx[0], j]
            maxs[j] = X[idx[0], j]
        for i in range(1, k):
            for j in range(m):
                v = X[idx[i], j]
                if v < mins[j]:
                    mins[j] = v
                elif v > maxs[j]:
                    maxs[j] = v
    return mins_arr, maxs_arr


def partition(const double[:, ::1] X, const i64[::1] idx, i64 feature, double threshold):
    """Split node rows into (left, right) preserving their order."""
    cdef Py_ssize_t k = idx.shape[0]
    left_arr = np.empty(k, dtype=np.int64)
    right_arr = np.empty(k, dtype=np.int64)
    cdef i64[::1] left = left_arr
    cdef i64[::1] right = right_arr
    cdef Py_ssize_t i, nl = 0, nr = 0
    with nogil:
        for i in range(k):
            if X[idx[i], feature] <= threshold:
                left[nl] = idx[i]
                nl = nl + 1
            else:
                right[nr] = idx[i]
                nr = nr + 1
    return left_arr[:nl], right_arr[:nr]


def predict_nodes(const i64[::1] feature, const double[::1] threshold, const i64[::1] left,
                  const i64[::1] right, const double[::1] value, const double[:, ::1] X):
    """Route every row of X to a leaf and return the leaf values."""
    cdef Py_ssize_t n = X.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef i64 node
    with nogil:
        for i in range(n):
            node = 0
            while feature[node] >= 0:
                if X[i, feature[node]] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            out[i] = value[node]
    return out_arr
