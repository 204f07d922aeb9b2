"""KD-tree construction shared by the compiled and pure-Python query kernels.

Median split on the max-spread dimension, leaf size 16. Nodes are stored in
flat arrays; ``perm`` holds point indices so leaves are contiguous slices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LEAF_SIZE = 16


@dataclass(frozen=True)
class TreeArrays:
    perm: np.ndarray       # int64[M], permuted point indices
    split_dim: np.ndarray  # int32[nodes], -1 for leaves
    split_val: np.ndarray  # float64[nodes]
    left: np.ndarray       # int32[nodes], -1 for leaves
    right: np.ndarray      # int32[nodes]
    start: np.ndarray      # int32[nodes], leaf slice into perm
    end: np.ndarray        # int32[nodes]


def build_tree(points: np.ndarray, leaf_size: int = LEAF_SIZE) -> TreeArrays:
    points = np.ascontiguousarray(points, dtype=np.float64)
    m = points.shape[0]
    perm = np.arange(m, dtype=np.int64)
    split_dim: list[int] = []
    split_val: list[float] = []
    left: list[int] = []
    right: list[int] = []
    start: list[int] = []
    end: list[int] = []

    def new_node(lo: int, hi: int) -> int:
        node = len(split_dim)
        split_dim.append(-1)
        split_val.append(0.0)
        left.append(-1)
        right.append(-1)
        start.append(lo)
        end.append(hi)
        return node

    # iterative build to avoid recursion limits on degenerate data
    stack = [new_node(0, m)]
    while stack:
        node = stack.pop()
        lo, hi = start[node], end[node]
        count = hi - lo
        if count <= leaf_size:
            continue
        seg = points[perm[lo:hi]]
        spreads = seg.max(axis=0) - seg.min(axis=0)
        dim = int(np.argmax(spreads))
        if spreads[dim] == 0.0:
            continue  # all points identical along every axis: keep as leaf
        vals = seg[:, dim]
        mid = count // 2
        order = np.argpartition(vals, mid - 1)
        perm[lo:hi] = perm[lo:hi][order]
        split_dim[node] = dim
        split_val[node] = float(vals[order[mid - 1]])
        l_node = new_node(lo, lo + mid)
        r_node = new_node(lo + mid, hi)
        left[node] = l_node
        right[node] = r_node
        stack.append(l_node)
        stack.append(r_node)

    return TreeArrays(
        perm=perm,
        split_dim=np.asarray(split_dim, dtype=np.int32),
        split_val=np.asarray(split_val, dtype=np.float64),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        start=np.asarray(start, dtype=np.int32),
        end=np.asarray(end, dtype=np.int32),
    )
