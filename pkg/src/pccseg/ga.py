"""Genetic-algorithm search over the feature weight vector.

Maximizes the graph-quality index alpha of the candidate k-NN graph built
with each weight vector. Real-valued genes in [0, 1], tournament selection
(size 2), blend crossover, per-gene uniform-reset mutation, elitism.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError
from .features import N_FEATURES
from .graph import labeled_knn_edge_counts
from .index import compute_alpha, compute_phi, compute_sigma


@dataclass
class GaConfig:
    population_size: int = 200
    max_generations: int = 200
    crossover_fraction: float = 0.8
    elite_count: int = 2
    mutation_rate: Optional[float] = None  # default 1 / n_genes
    stall_generations: int = 50
    rng_seed: int = 0
    early_stop_alpha: float = 1.0 - 1e-9

    def validate(self) -> None:
        if self.population_size < 2:
            raise ConfigurationError("population_size must be >= 2")
        if not 0 <= self.elite_count < self.population_size:
            raise ConfigurationError("elite_count must be < population_size")
        if not 0.0 <= self.crossover_fraction <= 1.0:
            raise ConfigurationError("crossover_fraction must lie in [0, 1]")
        if self.max_generations < 1 or self.stall_generations < 1:
            raise ConfigurationError("generation counts must be >= 1")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ConfigurationError("mutation_rate must lie in [0, 1]")


@dataclass
class OptimizationTrace:
    best_alpha: list[float] = field(default_factory=list)
    mean_alpha: list[float] = field(default_factory=list)
    best_lam: list[np.ndarray] = field(default_factory=list)
    evaluations: int = 0
    stop_reason: str = ""

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["generation", "best_alpha", "mean_alpha"]
                            + [f"w{i}" for i in range(len(self.best_lam[0]))])
            for g, (b, m, lam) in enumerate(zip(self.best_alpha, self.mean_alpha,
                                                self.best_lam)):
                writer.writerow([g, repr(b), repr(m)] + [repr(float(x)) for x in lam])


def make_alpha_fitness(fm_normalized: np.ndarray, pixel_labels: np.ndarray,
                       k: int, baseline_phi: float) -> Callable[[np.ndarray], float]:
    """Fitness closure: candidate graph's alpha against a fixed baseline."""
    sigma = compute_sigma(baseline_phi)

    def fitness(lam: np.ndarray) -> float:
        z_same, z_total = labeled_knn_edge_counts(fm_normalized, pixel_labels, k, lam)
        return compute_alpha(compute_phi(z_same, z_total), sigma)

    return fitness


def compute_baseline_phi(fm_normalized: np.ndarray, pixel_labels: np.ndarray,
                         k: int) -> float:
    """phi of the graph built with unit weights (no feature weighting)."""
    z_same, z_total = labeled_knn_edge_counts(fm_normalized, pixel_labels, k,
                                              np.ones(fm_normalized.shape[1]))
    return compute_phi(z_same, z_total)


def _tournament(rng: np.random.Generator, fitnesses: np.ndarray) -> int:
    a, b = rng.integers(len(fitnesses)), rng.integers(len(fitnesses))
    return int(a if fitnesses[a] >= fitnesses[b] else b)


def _ensure_nonzero(ind: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    if not np.any(ind > 0.0):
        ind = ind.copy()
        ind[rng.integers(len(ind))] = rng.random()
    return ind


def optimize(fitness: Callable[[np.ndarray], float], n_genes: int = N_FEATURES,
             cfg: Optional[GaConfig] = None) -> tuple[np.ndarray, OptimizationTrace]:
    """Run the GA; deterministic for a fixed cfg.rng_seed.

    Fitness values are memoized on the exact gene bit pattern, since the
    population revisits individuals and evaluations are expensive.
    """
    cfg = cfg or GaConfig()
    cfg.validate()
    rng = np.random.default_rng(cfg.rng_seed)
    mut_rate = cfg.mutation_rate if cfg.mutation_rate is not None else 1.0 / n_genes

    cache: dict[bytes, float] = {}
    trace = OptimizationTrace()

    def evaluate(ind: np.ndarray) -> float:
        key = ind.tobytes()
        if key not in cache:
            cache[key] = float(fitness(ind))
            trace.evaluations += 1
        return cache[key]

    pop = rng.random((cfg.population_size, n_genes))
    pop = np.array([_ensure_nonzero(ind, rng) for ind in pop])

    best_ever = -np.inf
    stall = 0
    for gen in range(cfg.max_generations):
        fits = np.array([evaluate(ind) for ind in pop])
        order = np.argsort(-fits, kind="stable")
        gen_best = fits[order[0]]
        trace.best_alpha.append(float(gen_best))
        trace.mean_alpha.append(float(fits.mean()))
        trace.best_lam.append(pop[order[0]].copy())

        if gen_best > best_ever + 1e-12:
            best_ever = gen_best
            stall = 0
        else:
            stall += 1
        if gen_best >= cfg.early_stop_alpha:
            trace.stop_reason = "target_alpha"
            break
        if stall >= cfg.stall_generations:
            trace.stop_reason = "stalled"
            break
        if gen == cfg.max_generations - 1:
            trace.stop_reason = "max_generations"
            break

        children = [pop[i].copy() for i in order[:cfg.elite_count]]
        n_rest = cfg.population_size - cfg.elite_count
        n_cross = int(round(cfg.crossover_fraction * n_rest))
        for _ in range(n_cross):
            pa = pop[_tournament(rng, fits)]
            pb = pop[_tournament(rng, fits)]
            lo = np.minimum(pa, pb)
            hi = np.maximum(pa, pb)
            span = hi - lo
            child = rng.uniform(lo - 0.5 * span, hi + 0.5 * span)
            children.append(_ensure_nonzero(np.clip(child, 0.0, 1.0), rng))
        for _ in range(n_rest - n_cross):
            child = pop[_tournament(rng, fits)].copy()
            flip = rng.random(n_genes) < mut_rate
            child[flip] = rng.random(int(flip.sum()))
            children.append(_ensure_nonzero(child, rng))
        pop = np.array(children)

    best = trace.best_lam[int(np.argmax(trace.best_alpha))].copy()
    return best, trace


def optimize_weights(fm_normalized: np.ndarray, pixel_labels: np.ndarray, k: int,
                     cfg: Optional[GaConfig] = None
                     ) -> tuple[np.ndarray, OptimizationTrace, float]:
    """Search the weight vector maximizing alpha for an image's features.

    Returns (best weights, trace, baseline phi). The baseline phi is
    computed once from the unit-weight graph and fixed for the whole run.
    """
    baseline_phi = compute_baseline_phi(fm_normalized, pixel_labels, k)
    fitness = make_alpha_fitness(fm_normalized, pixel_labels, k, baseline_phi)
    best, trace = optimize(fitness, n_genes=fm_normalized.shape[1], cfg=cfg)
    return best, trace, baseline_phi
