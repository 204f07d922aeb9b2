"""KD-tree 5-nearest-neighbor majority vote over a labeled reference space.

The query inner loop runs in a compiled Cython kernel when available; a
pure-Python kernel with identical semantics is selected at import otherwise
(see ``apneakit.knn.BACKEND``). Brute-force search is kept as an independent
oracle path and never shares code with the tree query.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..signal_io import read_tensor, write_tensor
from ._tree import LEAF_SIZE, TreeArrays, build_tree

try:
    from . import _kernels as _backend
except ImportError:  # extension not built; fall back to pure Python
    from . import _query_py as _backend

BACKEND = _backend.BACKEND
DEFAULT_K = 5
MIN_REFERENCES = 5


@dataclass(frozen=True)
class ReferenceSpace:
    """Immutable labeled vector set with its KD-tree index."""

    vectors: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)
    tree: TreeArrays = field(repr=False)

    @property
    def n_vectors(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def build_reference(vectors, labels, leaf_size: int = LEAF_SIZE) -> ReferenceSpace:
    vectors = np.ascontiguousarray(vectors, dtype=np.float64)
    labels = np.asarray(labels)
    if vectors.ndim != 2:
        raise ValueError(f"vectors must be 2-D, got shape {vectors.shape}")
    if vectors.shape[0] < MIN_REFERENCES:
        raise ValueError(f"need >= {MIN_REFERENCES} vectors, got {vectors.shape[0]}")
    if labels.shape != (vectors.shape[0],):
        raise ValueError(
            f"labels shape {labels.shape} does not match {vectors.shape[0]} vectors"
        )
    if not np.all(np.isfinite(vectors)):
        raise ValueError("vectors contain non-finite values")
    if not np.isin(labels, (0, 1)).all():
        raise ValueError("labels must be binary 0/1")
    return ReferenceSpace(
        vectors=vectors,
        labels=labels.astype(np.int64),
        tree=build_tree(vectors, leaf_size=leaf_size),
    )


def query_neighbors(space: ReferenceSpace, queries, k: int = DEFAULT_K):
    """k nearest reference indices and distances per query row, sorted by
    (distance, index); ties go to the lower reference index."""
    queries = np.ascontiguousarray(np.atleast_2d(queries), dtype=np.float64)
    if queries.shape[1] != space.dim:
        raise ValueError(
            f"query dimension {queries.shape[1]} != reference dimension {space.dim}"
        )
    if k > space.n_vectors:
        raise ValueError(f"k={k} exceeds reference size {space.n_vectors}")
    return _backend.query_knn(space.vectors, space.tree, queries, k)


def predict(space: ReferenceSpace, query_vector, k: int = DEFAULT_K) -> int:
    """Majority vote of the k nearest labels (k odd: no vote ties)."""
    if k % 2 == 0:
        raise ValueError(f"k must be odd, got {k}")
    idx, _ = query_neighbors(space, query_vector, k)
    return int(space.labels[idx[0]].sum() * 2 > k)


def predict_batch(space: ReferenceSpace, queries, k: int = DEFAULT_K) -> np.ndarray:
    if k % 2 == 0:
        raise ValueError(f"k must be odd, got {k}")
    idx, _ = query_neighbors(space, queries, k)
    return (space.labels[idx].sum(axis=1) * 2 > k).astype(np.int64)


def brute_force_knn(vectors, queries, k: int = DEFAULT_K):
    """Linear-scan oracle with the same (distance, index) ordering."""
    vectors = np.asarray(vectors, dtype=np.float64)
    queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    out_idx = np.empty((queries.shape[0], k), dtype=np.int64)
    out_dist = np.empty((queries.shape[0], k), dtype=np.float64)
    point_ids = np.arange(vectors.shape[0])
    for qi, q in enumerate(queries):
        dists = np.sqrt(((vectors - q) ** 2).sum(axis=1))
        order = np.lexsort((point_ids, dists))[:k]
        out_idx[qi] = order
        out_dist[qi] = dists[order]
    return out_idx, out_dist


def save_reference(space: ReferenceSpace, prefix: str | Path) -> None:
    """Serialize as two tensor files: <prefix>.vectors.apsn, <prefix>.labels.apsn."""
    prefix = str(prefix)
    write_tensor(prefix + ".vectors.apsn", space.vectors.shape, space.vectors)
    write_tensor(prefix + ".labels.apsn", space.labels.shape, space.labels)


def load_reference(prefix: str | Path, leaf_size: int = LEAF_SIZE) -> ReferenceSpace:
    prefix = str(prefix)
    _, vectors = read_tensor(prefix + ".vectors.apsn")
    _, labels = read_tensor(prefix + ".labels.apsn")
    return build_reference(
        vectors.astype(np.float64),
        np.rint(labels).astype(np.int64),
        leaf_size=leaf_size,
    )
