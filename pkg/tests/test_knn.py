import numpy as np
import pytest

from apneakit import knn
from apneakit.knn import _query_py
from apneakit.knn._tree import build_tree


def _random_space(rng, m=1000, d=8):
    vectors = rng.normal(size=(m, d))
    labels = rng.integers(0, 2, m)
    return vectors, labels


class TestBuildReference:
    def test_minimal_space(self):
        vectors = np.ones((5, 3))
        space = knn.build_reference(vectors, [1, 1, 1, 0, 0])
        assert space.n_vectors == 5
        assert space.dim == 3

    def test_too_few_vectors_rejected(self):
        with pytest.raises(ValueError):
            knn.build_reference(np.ones((4, 3)), [1, 0, 1, 0])

    def test_nan_vector_rejected(self):
        vectors = np.ones((6, 3))
        vectors[2, 1] = np.nan
        with pytest.raises(ValueError):
            knn.build_reference(vectors, [0, 1, 0, 1, 0, 1])

    def test_label_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            knn.build_reference(np.ones((5, 3)), [1, 0, 1])

    def test_nonbinary_labels_rejected(self):
        with pytest.raises(ValueError):
            knn.build_reference(np.ones((5, 3)), [0, 1, 2, 0, 1])


class TestPredict:
    def test_unanimous_neighborhood(self):
        rng = np.random.default_rng(0)
        cluster = rng.normal(0, 0.01, size=(5, 4))
        far = rng.normal(10, 0.01, size=(5, 4))
        space = knn.build_reference(
            np.vstack([cluster, far]), [1] * 5 + [0] * 5
        )
        assert knn.predict(space, cluster[0]) == 1

    def test_three_against_two(self):
        # planted distances 1,1,1 (label 0) and 2,2 (label 1)
        d = 4
        vectors = np.zeros((5, d))
        vectors[0, 0] = 1.0
        vectors[1, 1] = 1.0
        vectors[2, 2] = 1.0
        vectors[3, 0] = 2.0
        vectors[4, 1] = 2.0
        space = knn.build_reference(vectors, [0, 0, 0, 1, 1])
        assert knn.predict(space, np.zeros(d)) == 0

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(1)
        vectors, labels = _random_space(rng, m=1000, d=16)
        queries = rng.normal(size=(100, 16))
        space = knn.build_reference(vectors, labels)
        tree_pred = knn.predict_batch(space, queries)
        idx, _ = knn.brute_force_knn(vectors, queries, 5)
        brute_pred = (labels[idx].sum(axis=1) * 2 > 5).astype(int)
        np.testing.assert_array_equal(tree_pred, brute_pred)

    def test_even_k_rejected(self):
        rng = np.random.default_rng(2)
        vectors, labels = _random_space(rng, m=10)
        space = knn.build_reference(vectors, labels)
        with pytest.raises(ValueError):
            knn.predict(space, vectors[0], k=4)

    def test_dimension_mismatch_rejected(self):
        rng = np.random.default_rng(3)
        vectors, labels = _random_space(rng, m=10, d=8)
        space = knn.build_reference(vectors, labels)
        with pytest.raises(ValueError):
            knn.predict(space, np.zeros(7))


class TestQueryNeighbors:
    @pytest.mark.parametrize("d", [2, 8, 64])
    def test_distance_multiset_matches_brute_force(self, d):
        rng = np.random.default_rng(4)
        vectors, labels = _random_space(rng, m=500, d=d)
        queries = rng.normal(size=(50, d))
        space = knn.build_reference(vectors, labels)
        tree_idx, tree_dist = knn.query_neighbors(space, queries, 5)
        brute_idx, brute_dist = knn.brute_force_knn(vectors, queries, 5)
        np.testing.assert_array_equal(tree_idx, brute_idx)
        np.testing.assert_allclose(tree_dist, brute_dist, atol=1e-12)

    def test_duplicate_points_tie_break_by_index(self):
        vectors = np.zeros((8, 2))  # all identical: ties everywhere
        labels = [0, 1, 0, 1, 0, 1, 0, 1]
        space = knn.build_reference(vectors, labels)
        idx, dist = knn.query_neighbors(space, np.zeros(2), 5)
        np.testing.assert_array_equal(idx[0], [0, 1, 2, 3, 4])
        np.testing.assert_array_equal(dist[0], 0.0)

    def test_insertion_order_invariance(self):
        rng = np.random.default_rng(5)
        vectors, labels = _random_space(rng, m=200, d=6)
        queries = rng.normal(size=(20, 6))
        space = knn.build_reference(vectors, labels)
        base = knn.predict_batch(space, queries)
        perm = rng.permutation(200)
        space_p = knn.build_reference(vectors[perm], labels[perm])
        idx_p, _ = knn.query_neighbors(space_p, queries, 5)
        pred_p = (labels[perm][idx_p].sum(axis=1) * 2 > 5).astype(int)
        np.testing.assert_array_equal(base, pred_p)

    def test_translation_invariance(self):
        rng = np.random.default_rng(6)
        vectors, labels = _random_space(rng, m=300, d=5)
        queries = rng.normal(size=(30, 5))
        shift = rng.normal(size=5)
        a = knn.build_reference(vectors, labels)
        b = knn.build_reference(vectors + shift, labels)
        idx_a, dist_a = knn.query_neighbors(a, queries, 5)
        idx_b, dist_b = knn.query_neighbors(b, queries + shift, 5)
        np.testing.assert_array_equal(idx_a, idx_b)
        np.testing.assert_allclose(dist_a, dist_b, atol=1e-9)


class TestBackends:
    def test_python_fallback_matches_active_backend(self):
        rng = np.random.default_rng(7)
        vectors, labels = _random_space(rng, m=400, d=12)
        queries = rng.normal(size=(40, 12))
        space = knn.build_reference(vectors, labels)
        active_idx, active_dist = knn.query_neighbors(space, queries, 5)
        py_idx, py_dist = _query_py.query_knn(space.vectors, space.tree, queries, 5)
        np.testing.assert_array_equal(active_idx, py_idx)
        np.testing.assert_allclose(active_dist, py_dist, atol=1e-12)

    def test_backend_reported(self):
        assert knn.BACKEND in ("cython", "python")


class TestTree:
    def test_leaves_partition_points(self):
        rng = np.random.default_rng(8)
        tree = build_tree(rng.normal(size=(321, 5)), leaf_size=16)
        assert sorted(tree.perm.tolist()) == list(range(321))
        leaves = np.flatnonzero(tree.split_dim == -1)
        covered = []
        for leaf in leaves:
            covered.extend(range(tree.start[leaf], tree.end[leaf]))
        assert sorted(covered) == list(range(321))

    def test_identical_points_become_single_leaf(self):
        tree = build_tree(np.ones((50, 3)), leaf_size=16)
        assert (tree.split_dim == -1).all()


class TestSerialization:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(9)
        vectors, labels = _random_space(rng, m=64, d=10)
        space = knn.build_reference(vectors, labels)
        prefix = tmp_path / "ref"
        knn.save_reference(space, prefix)
        loaded = knn.load_reference(prefix)
        queries = rng.normal(size=(10, 10))
        np.testing.assert_array_equal(
            knn.predict_batch(space, queries), knn.predict_batch(loaded, queries)
        )
        np.testing.assert_array_equal(loaded.labels, space.labels)
