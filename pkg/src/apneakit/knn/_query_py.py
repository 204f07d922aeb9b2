"""Pure-Python KD-tree k-NN query, used when the compiled kernel is absent.

Semantics match ``_kernels.pyx`` exactly: Euclidean metric, distance ties
broken by lower point index, results sorted ascending by (distance, index).
"""

from __future__ import annotations

import numpy as np

from ._tree import TreeArrays

BACKEND = "python"


def _insert(best_d, best_i, count, k, d, i):
    """Insert candidate (d, i) into the sorted-by-(d, i) top-k arrays."""
    if count == k:
        if (d, i) >= (best_d[k - 1], best_i[k - 1]):
            return count
        count -= 1
    pos = count
    while pos > 0 and (d, i) < (best_d[pos - 1], best_i[pos - 1]):
        best_d[pos] = best_d[pos - 1]
        best_i[pos] = best_i[pos - 1]
        pos -= 1
    best_d[pos] = d
    best_i[pos] = i
    return count + 1


def query_knn(points: np.ndarray, tree: TreeArrays, queries: np.ndarray, k: int):
    """Exact k nearest neighbors for each query row.

    Returns (indices int64 [Q, k], distances float64 [Q, k])."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    queries = np.ascontiguousarray(queries, dtype=np.float64)
    n_queries = queries.shape[0]
    out_idx = np.empty((n_queries, k), dtype=np.int64)
    out_dist = np.empty((n_queries, k), dtype=np.float64)

    for qi in range(n_queries):
        q = queries[qi]
        best_d = [np.inf] * k
        best_i = [-1] * k
        count = 0
        stack = [(0, 0.0)]
        while stack:
            node, bound_dsq = stack.pop()
            if count == k and bound_dsq > best_d[k - 1]:
                continue
            dim = tree.split_dim[node]
            if dim < 0:
                lo, hi = tree.start[node], tree.end[node]
                leaf_ids = tree.perm[lo:hi]
                diffs = points[leaf_ids] - q
                dsqs = np.einsum("ij,ij->i", diffs, diffs)
                for d, i in zip(dsqs, leaf_ids):
                    count = _insert(best_d, best_i, count, k, float(d), int(i))
                continue
            delta = q[dim] - tree.split_val[node]
            if delta <= 0.0:
                near, far = tree.left[node], tree.right[node]
            else:
                near, far = tree.right[node], tree.left[node]
            stack.append((far, delta * delta))
            stack.append((near, bound_dsq))
        out_idx[qi] = best_i
        out_dist[qi] = np.sqrt(best_d)
    return out_idx, out_dist
