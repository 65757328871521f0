"""Hot numeric kernels with two interchangeable implementations.

The numba-jitted path is the default; setting the environment variable
``SURROPT_NO_NUMBA=1`` (or any value other than ``0``/empty) before import
selects the pure-numpy path. Both paths are written to produce bitwise
identical results on ties-free inputs: sums are accumulated in the same
order and ties are broken by the first candidate in scan order.

Kernels here are the profiled inner loops: greedy split search and packed
forest traversal for the boosted trees, and pairwise dominance ranking for
the evolutionary optimizer. Everything else in the package is plain numpy.

``benchmarks/bench_kernels.py`` times the two paths against each other.
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("SURROPT_NO_NUMBA", "0").strip()
_numba_requested = _flag in ("", "0")

if _numba_requested:
    try:
        from numba import njit

        USING_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USING_NUMBA = False
else:
    USING_NUMBA = False


# ---------------------------------------------------------------------------
# Greedy variance-reduction split search.
#
# Candidate thresholds are midpoints between consecutive distinct sorted
# values. The score of a split is the standard sum-of-squares decomposition
#   gain = S_L^2/n_L + S_R^2/n_R - S^2/n   (>= 0),
# equal to the node SSE reduction. Ties keep the lowest feature index, then
# the lowest threshold (first maximum in scan order).
# ---------------------------------------------------------------------------


def _gbt_best_split_numpy(X, y, min_leaf, min_gain):
    n, d = X.shape
    best_gain = 0.0
    best_feature = -1
    best_threshold = 0.0
    for j in range(d):
        order = np.argsort(X[:, j])
        xs = X[order, j]
        ys = y[order]
        csum = np.cumsum(ys)
        total = csum[-1]
        parent = total * total / n
        n_left = np.arange(1, n, dtype=np.float64)
        valid = xs[:-1] != xs[1:]
        if min_leaf > 1:
            valid &= (n_left >= min_leaf) & ((n - n_left) >= min_leaf)
        if not valid.any():
            continue
        left_sum = csum[:-1]
        right_sum = total - left_sum
        gains = left_sum * left_sum / n_left + right_sum * right_sum / (n - n_left) - parent
        gains = np.where(valid, gains, -np.inf)
        k = int(np.argmax(gains))
        if gains[k] > best_gain and gains[k] > min_gain:
            best_gain = float(gains[k])
            best_feature = j
            best_threshold = 0.5 * (xs[k] + xs[k + 1])
    return best_feature, best_threshold, best_gain


def _gbt_best_split_loop(X, y, min_leaf, min_gain):
    n, d = X.shape
    best_gain = 0.0
    best_feature = -1
    best_threshold = 0.0
    for j in range(d):
        col = X[:, j].copy()
        order = np.argsort(col)
        xs = col[order]
        ys = y[order]
        total = 0.0
        for k in range(n):
            total += ys[k]
        parent = total * total / n
        left_sum = 0.0
        for k in range(n - 1):
            left_sum += ys[k]
            if xs[k] == xs[k + 1]:
                continue
            n_left = float(k + 1)
            if min_leaf > 1 and (n_left < min_leaf or (n - n_left) < min_leaf):
                continue
            right_sum = total - left_sum
            gain = left_sum * left_sum / n_left + right_sum * right_sum / (n - n_left) - parent
            if gain > best_gain and gain > min_gain:
                best_gain = gain
                best_feature = j
                best_threshold = 0.5 * (xs[k] + xs[k + 1])
    return best_feature, best_threshold, best_gain


# ---------------------------------------------------------------------------
# Packed forest traversal. Trees are concatenated into flat node arrays with
# child links already globalized; offsets[t] is the root of tree t. Leaves
# carry feature == -1.
# ---------------------------------------------------------------------------


def _forest_predict_numpy(feature, threshold, left, right, value, offsets, X, learning_rate, base):
    n = X.shape[0]
    acc = np.zeros(n)
    for t in range(offsets.shape[0] - 1):
        node = np.full(n, offsets[t], dtype=np.int64)
        active = feature[node] >= 0
        while active.any():
            idx = np.nonzero(active)[0]
            nd = node[idx]
            go_left = X[idx, feature[nd]] <= threshold[nd]
            node[idx] = np.where(go_left, left[nd], right[nd])
            active = feature[node] >= 0
        acc += value[node]
    return base + learning_rate * acc


def _forest_predict_loop(feature, threshold, left, right, value, offsets, X, learning_rate, base):
    n = X.shape[0]
    out = np.empty(n)
    for i in range(n):
        acc = 0.0
        for t in range(offsets.shape[0] - 1):
            node = offsets[t]
            while feature[node] >= 0:
                if X[i, feature[node]] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            acc += value[node]
        out[i] = base + learning_rate * acc
    return out


# ---------------------------------------------------------------------------
# Non-dominated ranking (minimize orientation, finite objectives).
# Rank 0 is the non-dominated set; rank k+1 is non-dominated after removing
# ranks <= k.
# ---------------------------------------------------------------------------


def _nds_ranks_numpy(F):
    n = F.shape[0]
    dominates = np.zeros((n, n), dtype=np.bool_)
    block = 256
    for s in range(0, n, block):
        e = min(s + block, n)
        le = (F[s:e, None, :] <= F[None, :, :]).all(axis=2)
        lt = (F[s:e, None, :] < F[None, :, :]).any(axis=2)
        dominates[s:e] = le & lt
    dom_count = dominates.sum(axis=0).astype(np.int64)
    ranks = np.full(n, -1, dtype=np.int64)
    current = 0
    while True:
        front = (ranks == -1) & (dom_count == 0)
        if not front.any():
            break
        ranks[front] = current
        dom_count -= dominates[front].sum(axis=0)
        current += 1
    return ranks


def _nds_ranks_loop(F):
    n, m = F.shape
    dominates = np.zeros((n, n), dtype=np.bool_)
    dom_count = np.zeros(n, dtype=np.int64)
    for p in range(n):
        for q in range(n):
            if p == q:
                continue
            le = True
            lt = False
            for k in range(m):
                a = F[p, k]
                b = F[q, k]
                if a > b:
                    le = False
                    break
                if a < b:
                    lt = True
            if le and lt:
                dominates[p, q] = True
                dom_count[q] += 1
    ranks = np.full(n, -1, dtype=np.int64)
    current = 0
    assigned = 0
    while assigned < n:
        newly = 0
        for p in range(n):
            if ranks[p] == -1 and dom_count[p] == 0:
                ranks[p] = current
                newly += 1
        if newly == 0:
            break
        for p in range(n):
            if ranks[p] == current:
                for q in range(n):
                    if dominates[p, q]:
                        dom_count[q] -= 1
        assigned += newly
        current += 1
    return ranks


if USING_NUMBA:
    _gbt_best_split_numba = njit(cache=True)(_gbt_best_split_loop)
    _forest_predict_numba = njit(cache=True)(_forest_predict_loop)
    _nds_ranks_numba = njit(cache=True)(_nds_ranks_loop)

    gbt_best_split = _gbt_best_split_numba
    forest_predict = _forest_predict_numba
    nds_ranks = _nds_ranks_numba
else:
    gbt_best_split = _gbt_best_split_numpy
    forest_predict = _forest_predict_numpy
    nds_ranks = _nds_ranks_numpy
