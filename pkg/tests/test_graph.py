import numpy as np
import pytest

from pccseg.errors import FormatError, InvalidInputError, InvalidParameterError
from pccseg.features import N_FEATURES
from pccseg.graph import (
    IGNORED,
    UNLABELED,
    PixelGraph,
    build_graph,
    build_graph_from_points,
    distance,
    knn_lists,
    labeled_knn_edge_counts,
    load_edgelist,
    load_npz,
    save_edgelist,
    save_npz,
)
from pccseg.index import count_labeled_edges


def brute_force_edges(X, k):
    """Oracle: per-node full pairwise sort with (distance, index) ordering."""
    n = len(X)
    edges = set()
    for i in range(n):
        d = [(np.sqrt(((X[i] - X[j]) ** 2).sum()), j) for j in range(n) if j != i]
        d.sort()
        for _, j in d[:k]:
            edges.add((min(i, j), max(i, j)))
    return edges


def edge_set(g):
    return {tuple(e) for e in g.edge_array()}


def two_class_labels(n):
    lab = np.full(n, UNLABELED, dtype=np.int8)
    lab[0] = 0
    lab[1] = 1
    return lab


class TestBuildGraph:
    def test_collinear_points_k1(self):
        X = np.array([[0.0], [1.0], [2.0]])
        g = build_graph_from_points(X, two_class_labels(3), 1)
        assert edge_set(g) == {(0, 1), (1, 2)}

    def test_k_equals_n_minus_1_complete(self):
        rng = np.random.default_rng(0)
        X = rng.random((12, 3))
        g = build_graph_from_points(X, two_class_labels(12), 11)
        assert g.n_edges == 12 * 11 // 2

    @pytest.mark.parametrize("n,k,seed", [(50, 3, 1), (200, 10, 2), (500, 10, 3)])
    def test_matches_brute_force_oracle(self, n, k, seed):
        rng = np.random.default_rng(seed)
        X = rng.random((n, 5))
        g = build_graph_from_points(X, two_class_labels(n), k)
        assert edge_set(g) == brute_force_edges(X, k)

    def test_large_path_matches_oracle(self):
        # above the exact-sort cutoff: exercises the argpartition path
        rng = np.random.default_rng(9)
        X = rng.random((2100, 3))
        g = build_graph_from_points(X, two_class_labels(2100), 4)
        assert edge_set(g) == brute_force_edges(X, 4)

    def test_symmetry_and_no_self_loops(self):
        rng = np.random.default_rng(4)
        for seed in range(5):
            X = np.random.default_rng(seed).random((60, 4))
            g = build_graph_from_points(X, two_class_labels(60), 5)
            for i in range(g.n_nodes):
                nbrs = g.neighbors(i)
                assert i not in nbrs
                assert len(set(nbrs.tolist())) == len(nbrs)
                for j in nbrs:
                    assert i in g.neighbors(j)

    def test_own_k_nearest_always_present(self):
        rng = np.random.default_rng(5)
        X = rng.random((80, 4))
        k = 6
        g = build_graph_from_points(X, two_class_labels(80), k)
        knn = knn_lists(X, k)
        for i in range(80):
            assert set(knn[i].tolist()) <= set(g.neighbors(i).tolist())
            assert g.degree(i) >= k

    def test_monotone_in_k(self):
        rng = np.random.default_rng(6)
        X = rng.random((70, 3))
        prev = set()
        for k in (1, 2, 4, 8, 16):
            cur = edge_set(build_graph_from_points(X, two_class_labels(70), k))
            assert prev <= cur
            prev = cur

    def test_uniform_weight_scaling_keeps_edges(self):
        rng = np.random.default_rng(7)
        fm = rng.normal(0, 1, (60, N_FEATURES))
        labels = two_class_labels(60)
        w1 = np.full(N_FEATURES, 1.0)
        w2 = np.full(N_FEATURES, 0.25)
        g1 = build_graph(fm, labels, 5, w1)
        g2 = build_graph(fm, labels, 5, w2)
        assert edge_set(g1) == edge_set(g2)

    def test_ignored_pixels_excluded(self):
        rng = np.random.default_rng(8)
        fm = rng.normal(0, 1, (30, N_FEATURES))
        labels = two_class_labels(30)
        labels[5] = IGNORED
        labels[6] = IGNORED
        g = build_graph(fm, labels, 3, np.ones(N_FEATURES))
        assert g.n_nodes == 28
        assert set(g.node_to_pixel.tolist()) == set(range(30)) - {5, 6}

    def test_k_too_large_rejected(self):
        rng = np.random.default_rng(9)
        fm = rng.normal(0, 1, (10, N_FEATURES))
        with pytest.raises(InvalidParameterError):
            build_graph(fm, two_class_labels(10), 10, np.ones(N_FEATURES))

    def test_single_class_rejected(self):
        rng = np.random.default_rng(10)
        fm = rng.normal(0, 1, (10, N_FEATURES))
        lab = np.full(10, UNLABELED, dtype=np.int8)
        lab[0] = 0
        with pytest.raises(InvalidInputError):
            build_graph(fm, lab, 3, np.ones(N_FEATURES))


class TestDistance:
    def test_identity(self):
        rng = np.random.default_rng(0)
        fm = rng.random((5, N_FEATURES))
        assert distance(fm, np.ones(N_FEATURES), 2, 2) == 0.0

    def test_single_dimension_reduction(self):
        fm = np.zeros((2, N_FEATURES))
        fm[0, 4] = 1.0
        fm[1, 4] = 4.0
        w = np.zeros(N_FEATURES)
        w[4] = 0.5
        assert distance(fm, w, 0, 1) == pytest.approx(1.5, abs=1e-15)

    def test_matches_scalar_oracle(self):
        rng = np.random.default_rng(1)
        fm = rng.normal(0, 2, (10, N_FEATURES))
        w = rng.random(N_FEATURES)
        expected = np.sqrt(sum((w[d] * (fm[3, d] - fm[7, d])) ** 2
                               for d in range(N_FEATURES)))
        assert distance(fm, w, 3, 7) == pytest.approx(expected, abs=1e-12)


class TestLabeledEdgeCountsFastPath:
    @pytest.mark.parametrize("seed", range(4))
    def test_matches_full_build(self, seed):
        rng = np.random.default_rng(seed)
        n = 150
        fm = rng.normal(0, 1, (n, N_FEATURES))
        labels = np.full(n, UNLABELED, dtype=np.int8)
        labels[rng.choice(n, 30, replace=False)] = rng.integers(0, 2, 30)
        if len(np.unique(labels[labels >= 0])) < 2:
            labels[0], labels[1] = 0, 1
        w = rng.random(N_FEATURES) + 1e-3
        w = np.clip(w, 0, 1)
        g = build_graph(fm, labels, 7, w)
        assert labeled_knn_edge_counts(fm, labels, 7, w) == count_labeled_edges(g)


class TestSerialization:
    def _graph(self):
        rng = np.random.default_rng(2)
        fm = rng.normal(0, 1, (40, N_FEATURES))
        return build_graph(fm, two_class_labels(40), 4, np.ones(N_FEATURES))

    def test_edgelist_roundtrip(self, tmp_path):
        g = self._graph()
        path = tmp_path / "graph.txt"
        save_edgelist(g, path)
        g2 = load_edgelist(path)
        assert edge_set(g2) == edge_set(g)
        np.testing.assert_array_equal(g2.labels, g.labels)
        assert g2.k == g.k
        np.testing.assert_allclose(g2.lam, g.lam)

    def test_edgelist_bad_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("# N 3\n0 1 2\n")
        with pytest.raises(FormatError):
            load_edgelist(path)

    def test_npz_roundtrip(self, tmp_path):
        g = self._graph()
        path = tmp_path / "graph.npz"
        save_npz(g, path)
        g2 = load_npz(path)
        assert edge_set(g2) == edge_set(g)
        np.testing.assert_array_equal(g2.labels, g.labels)
        np.testing.assert_array_equal(g2.node_to_pixel, g.node_to_pixel)
