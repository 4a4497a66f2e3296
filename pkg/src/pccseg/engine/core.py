"""Particle competition and cooperation dynamics.

Label-bearing particles walk the pixel graph, raising their class's
domination on visited nodes and lowering rivals'. Phase 1 runs until the
mean top domination stabilizes and finalizes confidently dominated nodes;
phase 2 resolves the remainder by similarity-weighted neighborhood
averaging on the pixel grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from ..errors import ConfigurationError, InvalidInputError
from ..features import apply_weights, extract_features, normalize
from ..graph import IGNORED, PixelGraph, build_graph, labeled_knn_edge_counts
from ..index import compute_alpha, compute_phi, compute_sigma, count_labeled_edges
from . import kernel

ProgressCallback = Callable[[int, float, float], None]  # (round, mean_max_dom, frac_finalized)
CancelCheck = Callable[[], bool]

_NEIGHBOR_OFFSETS = [(-1, -1), (-1, 0), (-1, 1),
                     (0, -1), (0, 1),
                     (1, -1), (1, 0), (1, 1)]


@dataclass
class PccParams:
    """Tunable constants of the dynamics.

    delta_v and stop_threshold are the model's fixed constants (0.1 and
    0.9); the remaining knobs quantify the "periodic check / stabilizes"
    stop criterion and the phase-2 sweep.
    """

    delta_v: float = 0.1
    stop_threshold: float = 0.9
    check_interval: int = 100
    stabilization_window: int = 10
    stabilization_epsilon: float = 1e-3
    max_rounds: int = 20000
    phase2_epsilon: float = 1e-4
    phase2_max_sweeps: int = 1000
    rng_seed: int = 0
    phase2_literal_distance: bool = False  # use the raw-distance weighting variant

    def validate(self, n_classes: int = 2) -> None:
        if self.delta_v <= 0 or self.check_interval <= 0 or self.stabilization_window <= 0 \
                or self.stabilization_epsilon <= 0 or self.max_rounds < 0 \
                or self.phase2_epsilon <= 0 or self.phase2_max_sweeps <= 0:
            raise ConfigurationError("PccParams fields must be positive")
        if not (1.0 / n_classes < self.stop_threshold <= 1.0):
            raise ConfigurationError(
                f"stop_threshold must lie in (1/{n_classes}, 1], got {self.stop_threshold}")


@dataclass
class PccState:
    """Mutable per-run arrays shared with the walk kernel."""

    graph: PixelGraph
    dom: np.ndarray          # (N, C) domination levels
    labeled: np.ndarray      # (N,) uint8 flags
    dist: np.ndarray         # (C, N) int32 team distance tables
    p_cls: np.ndarray        # per-particle class
    p_curr: np.ndarray
    p_prev: np.ndarray
    p_strength: np.ndarray
    rng_state: int

    @property
    def n_particles(self) -> int:
        return len(self.p_cls)

    @property
    def n_classes(self) -> int:
        return self.dom.shape[1]


@dataclass
class Phase1Outcome:
    rounds: int
    stop_reason: str                 # "stabilized" | "max_rounds" | "cancelled"
    check_history: list[float]
    final_label: np.ndarray          # (N,) int8; -1 for nodes left to phase 2


@dataclass
class SegmentationResult:
    labels: np.ndarray               # flat per-pixel class (0 background, 1 foreground)
    mask: np.ndarray                 # (H, W) uint8, 0/255
    alpha: float
    phi: float
    sigma: float
    baseline_phi: float
    rounds: int
    stop_reason: str
    seed: int
    n_finalized_phase1: int
    n_phase2: int
    k: int
    lam: np.ndarray


def init_state(g: PixelGraph, seed: int = 0) -> PccState:
    """Initial dominations, particles and team distance tables for a graph."""
    n = g.n_nodes
    c = g.n_classes
    labels = np.asarray(g.labels, dtype=np.int64)
    for cls in range(c):
        if not np.any(labels == cls):
            raise InvalidInputError(f"class {cls} has no labeled node")

    dom = np.full((n, c), 1.0 / c, dtype=np.float64)
    labeled_ids = np.flatnonzero(labels >= 0)
    dom[labeled_ids] = 0.0
    dom[labeled_ids, labels[labeled_ids]] = 1.0

    dist = np.full((c, n), n - 1, dtype=np.int32)
    dist[labels[labeled_ids], labeled_ids] = 0

    return PccState(
        graph=g,
        dom=dom,
        labeled=(labels >= 0).astype(np.uint8),
        dist=dist,
        p_cls=labels[labeled_ids].astype(np.int32),
        p_curr=labeled_ids.astype(np.int32),
        p_prev=labeled_ids.astype(np.int32),
        p_strength=np.ones(len(labeled_ids), dtype=np.float64),
        rng_state=kernel.seed_state(seed),
    )


def step_particle(state: PccState, p: int) -> None:
    """Advance one particle by one visit (test/inspection granularity)."""
    state.rng_state = kernel.step_particle(
        state.graph.indptr, state.graph.indices, state.dom, state.labeled,
        state.dist, state.p_cls, state.p_curr, state.p_prev,
        state.p_strength, p, state.rng_state)


def transition_probabilities(state: PccState, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Neighbor move distribution of particle p at its current node.

    Equal mixture of the uniform term and the greedy term weighted by the
    neighbor's own-class domination times (1 + team distance)^-2. Returned
    for inspection/testing; the kernel samples from the same distribution.
    """
    q = int(state.p_curr[p])
    c = int(state.p_cls[p])
    nbrs = state.graph.neighbors(q)
    deg = len(nbrs)
    if deg == 0:
        return nbrs, np.zeros(0)
    greedy = state.dom[nbrs, c] / (1.0 + state.dist[c, nbrs].astype(np.float64)) ** 2
    total = greedy.sum()
    if total > 0.0:
        probs = 0.5 / deg + 0.5 * greedy / total
    else:
        probs = np.full(deg, 1.0 / deg)
    return nbrs, probs


def _run_rounds(state: PccState, n_rounds: int) -> None:
    state.rng_state = kernel.run_rounds(
        state.graph.indptr, state.graph.indices, state.dom, state.labeled,
        state.dist, state.p_cls, state.p_curr, state.p_prev,
        state.p_strength, n_rounds, state.rng_state)


def run_phase1(state: PccState, params: PccParams,
               progress: Optional[ProgressCallback] = None,
               should_cancel: Optional[CancelCheck] = None) -> Phase1Outcome:
    """Run rounds until the mean top domination stabilizes, then finalize.

    A round is one step of every particle in creation order. Every
    check_interval rounds the mean (over unlabeled nodes) of the highest
    domination level is recorded; the run stops once the spread of the
    last stabilization_window checks drops below stabilization_epsilon.
    """
    params.validate(state.n_classes)
    unlabeled_ids = np.flatnonzero(state.labeled == 0)
    history: list[float] = []
    rounds = 0
    reason = "max_rounds"
    while rounds < params.max_rounds:
        batch = min(params.check_interval, params.max_rounds - rounds)
        _run_rounds(state, batch)
        rounds += batch
        top = state.dom[unlabeled_ids].max(axis=1) if len(unlabeled_ids) else np.array([1.0])
        history.append(float(top.mean()))
        if progress is not None:
            frac = float(np.mean(top > params.stop_threshold)) if len(unlabeled_ids) else 1.0
            progress(rounds, history[-1], frac)
        if should_cancel is not None and should_cancel():
            reason = "cancelled"
            break
        if len(history) >= params.stabilization_window:
            window = history[-params.stabilization_window:]
            if max(window) - min(window) < params.stabilization_epsilon:
                reason = "stabilized"
                break

    final_label = np.full(state.dom.shape[0], -1, dtype=np.int8)
    labeled_ids = np.flatnonzero(state.labeled == 1)
    final_label[labeled_ids] = state.graph.labels[labeled_ids]
    if len(unlabeled_ids):
        top = state.dom[unlabeled_ids].max(axis=1)
        confident = unlabeled_ids[top > params.stop_threshold]
        final_label[confident] = np.argmax(state.dom[confident], axis=1)
    return Phase1Outcome(rounds=rounds, stop_reason=reason,
                         check_history=history, final_label=final_label)


def run_phase2(g: PixelGraph, X: np.ndarray, dom: np.ndarray,
               final_label: np.ndarray, params: PccParams) -> np.ndarray:
    """Resolve nodes phase 1 left unfinalized by pixel-grid averaging.

    Each unresolved node repeatedly replaces its domination vector with
    the weighted average of its 8-neighborhood's vectors; a neighbor's
    weight is 1 / (1 + feature distance), normalized over the
    neighborhood (neighbors are similarity-weighted). The literal
    raw-distance variant is available via params.phase2_literal_distance.
    Returns the complete per-node label array.
    """
    if g.node_to_pixel is None or g.image_shape is None:
        raise InvalidInputError("phase 2 needs pixel geometry on the graph")
    n = g.n_nodes
    h, w = g.image_shape
    open_ids = np.flatnonzero(final_label < 0)
    labels = final_label.copy()
    if len(open_ids) == 0:
        return labels

    # Finalized nodes contribute as hard one-hot vectors.
    dom_full = dom.copy()
    done = np.flatnonzero(final_label >= 0)
    dom_full[done] = 0.0
    dom_full[done, final_label[done]] = 1.0

    pixel_to_node = np.full(h * w, -1, dtype=np.int64)
    pixel_to_node[g.node_to_pixel] = np.arange(n)
    rows = g.node_to_pixel[open_ids] // w
    cols = g.node_to_pixel[open_ids] % w

    m = len(open_ids)
    nb_node = np.zeros((m, 8), dtype=np.int64)
    nb_w = np.zeros((m, 8), dtype=np.float64)
    for t, (dr, dc) in enumerate(_NEIGHBOR_OFFSETS):
        rr, cc = rows + dr, cols + dc
        ok = (rr >= 0) & (rr < h) & (cc >= 0) & (cc < w)
        node = np.where(ok, pixel_to_node[np.clip(rr, 0, h - 1) * w + np.clip(cc, 0, w - 1)], -1)
        ok &= node >= 0
        node = np.where(ok, node, 0)
        d = np.sqrt(((X[open_ids] - X[node]) ** 2).sum(axis=1))
        if params.phase2_literal_distance:
            weight = d
        else:
            weight = 1.0 / (1.0 + d)
        nb_node[:, t] = node
        nb_w[:, t] = np.where(ok, weight, 0.0)

    if params.phase2_literal_distance:
        denom = (nb_w > 0).sum(axis=1).astype(np.float64)
    else:
        denom = nb_w.sum(axis=1)
    has_info = denom > 0
    safe_denom = np.where(has_info, denom, 1.0)

    prev_mean = -1.0
    for _ in range(params.phase2_max_sweeps):
        num = np.einsum("mt,mtc->mc", nb_w, dom_full[nb_node])
        new = num / safe_denom[:, None]
        dom_full[open_ids[has_info]] = new[has_info]
        cur_mean = float(new[has_info].max(axis=1).mean()) if has_info.any() else 1.0
        if abs(cur_mean - prev_mean) < params.phase2_epsilon:
            break
        prev_mean = cur_mean

    resolved = np.argmax(dom_full[open_ids], axis=1).astype(np.int8)
    resolved[~has_info] = 0  # isolated pixels fall back to background
    labels[open_ids] = resolved
    return labels


def segment(image: np.ndarray, pixel_labels: np.ndarray, weights, k: int,
            params: Optional[PccParams] = None,
            baseline_phi: Optional[float] = None,
            fm_normalized: Optional[np.ndarray] = None,
            progress: Optional[ProgressCallback] = None,
            should_cancel: Optional[CancelCheck] = None) -> SegmentationResult:
    """Full pipeline: features -> graph -> phase 1 -> phase 2 -> label map.

    pixel_labels uses the graph module's flat convention (-2 ignored,
    -1 unlabeled, 0 background, 1 foreground). Ignored pixels are assigned
    background in the output. fm_normalized may be passed to reuse a
    precomputed normalized feature matrix.
    """
    params = params or PccParams()
    h, w = image.shape[:2]
    lam = np.asarray(weights, dtype=np.float64)
    if fm_normalized is None:
        fm_normalized = normalize(extract_features(image))
    g = build_graph(fm_normalized, pixel_labels, k, lam)
    g.image_shape = (h, w)

    z_same, z_total = count_labeled_edges(g)
    phi = compute_phi(z_same, z_total)
    if baseline_phi is None:
        if np.all(lam == 1.0):
            baseline_phi = phi
        else:
            bs, bt = labeled_knn_edge_counts(fm_normalized, pixel_labels, k,
                                             np.ones_like(lam))
            baseline_phi = compute_phi(bs, bt)
    sigma = compute_sigma(baseline_phi)
    alpha = compute_alpha(phi, sigma)

    state = init_state(g, seed=params.rng_seed)
    params.validate(state.n_classes)
    outcome = run_phase1(state, params, progress=progress, should_cancel=should_cancel)
    n_finalized = int(np.sum(outcome.final_label >= 0))
    X = apply_weights(fm_normalized, lam)[g.node_to_pixel]
    node_labels = run_phase2(g, X, state.dom, outcome.final_label, params)

    flat = np.zeros(h * w, dtype=np.int8)  # ignored pixels stay background
    flat[g.node_to_pixel] = node_labels
    mask = (flat.reshape(h, w) == 1).astype(np.uint8) * 255
    return SegmentationResult(
        labels=flat, mask=mask, alpha=alpha, phi=phi, sigma=sigma,
        baseline_phi=baseline_phi, rounds=outcome.rounds,
        stop_reason=outcome.stop_reason, seed=params.rng_seed,
        n_finalized_phase1=n_finalized,
        n_phase2=int(np.sum(outcome.final_label < 0)), k=k, lam=lam)
