# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled KD-tree k-NN query kernel.

Same semantics as the pure-Python fallback: Euclidean metric, distance ties
broken by lower point index, results sorted ascending by (distance, index).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, sqrt

cnp.import_array()

BACKEND = "cython"


cdef inline int _insert(double* best_d, long* best_i, int count, int k,
                        double d, long i) nogil:
    cdef int pos
    if count == k:
        if d > best_d[k - 1] or (d == best_d[k - 1] and i >= best_i[k - 1]):
            return count
        count -= 1
    pos = count
    while pos > 0 and (d < best_d[pos - 1] or
                       (d == best_d[pos - 1] and i < best_i[pos - 1])):
        best_d[pos] = best_d[pos - 1]
        best_i[pos] = best_i[pos - 1]
        pos -= 1
    best_d[pos] = d
    best_i[pos] = i
    return count + 1


def query_knn(points, tree, queries, int k):
    """Exact k nearest neighbors for each query row.

    Returns (indices int64 [Q, k], distances float64 [Q, k])."""
    cdef double[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef double[:, ::1] qrs = np.ascontiguousarray(queries, dtype=np.float64)
    cdef long[::1] perm = np.ascontiguousarray(tree.perm, dtype=np.int64)
    cdef int[::1] split_dim = tree.split_dim
    cdef double[::1] split_val = tree.split_val
    cdef int[::1] left = tree.left
    cdef int[::1] right = tree.right
    cdef int[::1] start = tree.start
    cdef int[::1] end = tree.end

    cdef int n_queries = qrs.shape[0]
    cdef int dim = pts.shape[1]
    cdef int n_nodes = split_dim.shape[0]

    out_idx_arr = np.empty((n_queries, k), dtype=np.int64)
    out_dist_arr = np.empty((n_queries, k), dtype=np.float64)
    cdef long[:, ::1] out_idx = out_idx_arr
    cdef double[:, ::1] out_dist = out_dist_arr

    best_d_arr = np.empty(k, dtype=np.float64)
    best_i_arr = np.empty(k, dtype=np.int64)
    cdef double[::1] best_d = best_d_arr
    cdef long[::1] best_i = best_i_arr

    # explicit DFS stack: node id + lower bound on squared distance
    stack_node_arr = np.empty(n_nodes + 1, dtype=np.int32)
    stack_bound_arr = np.empty(n_nodes + 1, dtype=np.float64)
    cdef int[::1] stack_node = stack_node_arr
    cdef double[::1] stack_bound = stack_bound_arr

    cdef int qi, j, count, top, node, sdim, near, far, lo, hi, p
    cdef long pid
    cdef double bound, delta, dsq, diff
    cdef int nd

    with nogil:
        for qi in range(n_queries):
            for j in range(k):
                best_d[j] = INFINITY
                best_i[j] = -1
            count = 0
            top = 0
            stack_node[0] = 0
            stack_bound[0] = 0.0
            top = 1
            while top > 0:
                top -= 1
                node = stack_node[top]
                bound = stack_bound[top]
                if count == k and bound > best_d[k - 1]:
                    continue
                sdim = split_dim[node]
                if sdim < 0:
                    lo = start[node]
                    hi = end[node]
                    for p in range(lo, hi):
                        pid = perm[p]
                        dsq = 0.0
                        for j in range(dim):
                            diff = pts[pid, j] - qrs[qi, j]
                            dsq += diff * diff
                        count = _insert(&best_d[0], &best_i[0], count, k,
                                        dsq, pid)
                    continue
                delta = qrs[qi, sdim] - split_val[node]
                if delta <= 0.0:
                    near = left[node]
                    far = right[node]
                else:
                    near = right[node]
                    far = left[node]
                stack_node[top] = far
                stack_bound[top] = delta * delta
                top += 1
                stack_node[top] = near
                stack_bound[top] = bound
                top += 1
            for j in range(k):
                out_idx[qi, j] = best_i[j]
                out_dist[qi, j] = sqrt(best_d[j])
    return out_idx_arr, out_dist_arr
