#!/usr/bin/env python3
"""Compare the compiled and pure-Python KD-tree query kernels (and the
brute-force oracle) on random reference spaces.

Usage: python3 benchmarks/bench_knn.py [--m 10000] [--queries 200]
"""

import argparse
import time

import numpy as np

from apneakit import knn
from apneakit.knn import _query_py
from apneakit.knn._tree import build_tree

try:
    from apneakit.knn import _kernels
except ImportError:
    _kernels = None


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--m", type=int, default=10000)
    parser.add_argument("--queries", type=int, default=200)
    parser.add_argument("--k", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"active backend: {knn.BACKEND}")
    print(f"{'D':>5} {'build':>9} {'cython':>9} {'python':>9} {'brute':>9} {'speedup':>8}")
    for d in (8, 64, 512):
        vectors = rng.normal(size=(args.m, d))
        queries = rng.normal(size=(args.queries, d))
        t_build = _time(lambda: build_tree(vectors), repeats=1)
        tree = build_tree(vectors)

        t_py = _time(lambda: _query_py.query_knn(vectors, tree, queries, args.k))
        t_brute = _time(lambda: knn.brute_force_knn(vectors, queries, args.k))
        if _kernels is not None:
            t_cy = _time(lambda: _kernels.query_knn(vectors, tree, queries, args.k))
            cy_idx, _ = _kernels.query_knn(vectors, tree, queries, args.k)
            py_idx, _ = _query_py.query_knn(vectors, tree, queries, args.k)
            assert np.array_equal(cy_idx, py_idx), "backend results diverge"
            cy_col = f"{t_cy * 1e3:8.1f}m"
            speedup = f"{t_py / t_cy:7.1f}x"
        else:
            cy_col, speedup = "n/a".rjust(9), "n/a".rjust(8)
        print(
            f"{d:>5} {t_build * 1e3:8.1f}m {cy_col} {t_py * 1e3:8.1f}m "
            f"{t_brute * 1e3:8.1f}m {speedup}"
        )


if __name__ == "__main__":
    main()
