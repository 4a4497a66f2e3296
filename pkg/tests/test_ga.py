import numpy as np
import pytest

from conftest import synthetic_cluster_features
from pccseg.errors import ConfigurationError
from pccseg.ga import (
    GaConfig,
    compute_baseline_phi,
    make_alpha_fitness,
    optimize,
    optimize_weights,
)
from pccseg.graph import labeled_knn_edge_counts
from pccseg.index import compute_alpha, compute_phi, compute_sigma


def two_feature_problem(seed=0):
    """One separating dimension plus one noise dimension."""
    rng = np.random.default_rng(seed)
    n = 80
    X = rng.normal(0, 1, (n, 2))
    true = np.zeros(n, dtype=np.int8)
    true[40:] = 1
    X[:, 0] = rng.normal(0, 0.4, n)
    X[40:, 0] += 6.0
    labels = np.full(n, -1, dtype=np.int8)
    for cls in (0, 1):
        ids = np.flatnonzero(true == cls)
        labels[rng.choice(ids, size=8, replace=False)] = cls
    return X, labels


class TestConfigValidation:
    def test_defaults_valid(self):
        GaConfig().validate()

    @pytest.mark.parametrize("kwargs", [
        dict(population_size=1),
        dict(elite_count=-1),
        dict(elite_count=200),
        dict(crossover_fraction=1.5),
        dict(max_generations=0),
        dict(stall_generations=0),
        dict(mutation_rate=2.0),
    ])
    def test_bad_values_rejected(self, kwargs):
        with pytest.raises(ConfigurationError):
            GaConfig(**kwargs).validate()


class TestFitness:
    def test_unit_weights_score_half(self):
        # With lam = 1 the candidate graph IS the baseline graph, so its
        # alpha must equal 0.5 whenever the baseline phi is in (0, 1).
        X, labels = two_feature_problem(seed=3)
        X = X + np.random.default_rng(9).normal(0, 2.5, X.shape)
        phi = compute_baseline_phi(X, labels, 5)
        if not 0.0 < phi < 1.0:
            pytest.skip("fixture produced a degenerate baseline")
        fitness = make_alpha_fitness(X, labels, 5, phi)
        assert fitness(np.ones(2)) == pytest.approx(0.5, abs=1e-12)

    def test_noise_only_weight_not_better_than_baseline(self):
        # Moderate gap: the unit-weight baseline has phi in (0, 1) while
        # the noise-only graph mixes classes far more, so its alpha lands
        # below the 0.5 the baseline itself would score.
        X, labels, _ = synthetic_cluster_features(gap=3.0, n_labeled=40,
                                                  seed=1)
        phi = compute_baseline_phi(X, labels, 5)
        assert 0.0 < phi < 1.0
        fitness = make_alpha_fitness(X, labels, 5, phi)
        lam = np.zeros(23)
        lam[5] = 1.0  # pure-noise dimension
        assert fitness(lam) <= 0.5 + 1e-12

    def test_separating_only_weight_scores_one(self):
        X, labels, _ = synthetic_cluster_features(gap=10.0, seed=2)
        phi = compute_baseline_phi(X, labels, 5)
        fitness = make_alpha_fitness(X, labels, 5, phi)
        lam = np.zeros(23)
        lam[0] = 1.0  # the separating dimension
        assert fitness(lam) == pytest.approx(1.0, abs=1e-12)

    def test_uniform_scaling_invariance_interior(self):
        X, labels, _ = synthetic_cluster_features(seed=4)
        phi = compute_baseline_phi(X, labels, 5)
        fitness = make_alpha_fitness(X, labels, 5, phi)
        rng = np.random.default_rng(0)
        lam = 0.1 + 0.4 * rng.random(23)
        assert fitness(lam) == fitness(2.0 * lam / 2.0)
        # halving stays inside [0,1], so the edge set cannot change
        assert fitness(lam) == pytest.approx(fitness(0.5 * lam), abs=1e-12)


class TestOptimize:
    def test_two_feature_recovery(self):
        X, labels = two_feature_problem()
        phi = compute_baseline_phi(X, labels, 5)
        fitness = make_alpha_fitness(X, labels, 5, phi)
        cfg = GaConfig(population_size=20, max_generations=30, rng_seed=0)
        best, trace = optimize(fitness, n_genes=2, cfg=cfg)
        assert fitness(best) >= 0.99
        assert len(trace.best_alpha) <= 30

    def test_deterministic_given_seed(self):
        X, labels = two_feature_problem(seed=5)
        phi = compute_baseline_phi(X, labels, 5)
        fitness = make_alpha_fitness(X, labels, 5, phi)
        cfg = GaConfig(population_size=16, max_generations=10, rng_seed=11)
        best1, trace1 = optimize(fitness, n_genes=2, cfg=cfg)
        best2, trace2 = optimize(fitness, n_genes=2, cfg=cfg)
        np.testing.assert_array_equal(best1, best2)
        assert trace1.best_alpha == trace2.best_alpha
        assert trace1.mean_alpha == trace2.mean_alpha

    def test_best_alpha_nondecreasing(self):
        X, labels, _ = synthetic_cluster_features(gap=2.0, seed=6)
        phi = compute_baseline_phi(X, labels, 5)
        fitness = make_alpha_fitness(X, labels, 5, phi)
        cfg = GaConfig(population_size=12, max_generations=12,
                       early_stop_alpha=2.0, rng_seed=3)
        _, trace = optimize(fitness, n_genes=23, cfg=cfg)
        diffs = np.diff(trace.best_alpha)
        assert np.all(diffs >= -1e-15)

    def test_separated_baseline_returns_generation_zero(self):
        # When the unit-weight graph already has phi = 1, every candidate
        # scores alpha = 1 and the first generation hits the early stop.
        X, labels, _ = synthetic_cluster_features(gap=50.0, n_dims=4, seed=7)
        X[:, 1:] *= 1e-3
        phi = compute_baseline_phi(X, labels, 5)
        assert phi == 1.0
        best, trace, base = optimize_weights(X, labels, 5,
                                             GaConfig(population_size=10,
                                                      max_generations=20,
                                                      rng_seed=0))
        assert base == 1.0
        assert trace.stop_reason == "target_alpha"
        assert len(trace.best_alpha) == 1

    def test_memoization_bounds_evaluations(self):
        X, labels = two_feature_problem(seed=8)
        phi = compute_baseline_phi(X, labels, 5)
        fitness = make_alpha_fitness(X, labels, 5, phi)
        cfg = GaConfig(population_size=10, max_generations=5,
                       early_stop_alpha=2.0, rng_seed=2)
        _, trace = optimize(fitness, n_genes=2, cfg=cfg)
        assert trace.evaluations <= 10 * 5

    def test_optimize_weights_matches_direct_eval(self):
        X, labels, _ = synthetic_cluster_features(gap=10.0, seed=9)
        cfg = GaConfig(population_size=15, max_generations=15, rng_seed=4)
        best, trace, base = optimize_weights(X, labels, 5, cfg)
        z_same, z_total = labeled_knn_edge_counts(X, labels, 5, best)
        direct = compute_alpha(compute_phi(z_same, z_total), compute_sigma(base))
        assert max(trace.best_alpha) == pytest.approx(direct, abs=1e-12)

    def test_trace_csv_round_trip(self, tmp_path):
        X, labels = two_feature_problem(seed=10)
        phi = compute_baseline_phi(X, labels, 5)
        fitness = make_alpha_fitness(X, labels, 5, phi)
        cfg = GaConfig(population_size=8, max_generations=4,
                       early_stop_alpha=2.0, rng_seed=1)
        _, trace = optimize(fitness, n_genes=2, cfg=cfg)
        path = tmp_path / "trace.csv"
        trace.to_csv(path)
        rows = path.read_text().strip().splitlines()
        assert rows[0] == "generation,best_alpha,mean_alpha,w0,w1"
        assert len(rows) == 1 + len(trace.best_alpha)
        got = [float(r.split(",")[1]) for r in rows[1:]]
        assert got == trace.best_alpha
