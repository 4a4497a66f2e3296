"""Class-separability scoring of candidate graphs.

phi is the fraction of labeled-labeled edges joining nodes of the same
class. alpha = phi ** sigma, with sigma = ln(0.5) / ln(baseline_phi)
chosen so the unweighted-baseline graph scores exactly 0.5.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidInputError
from .graph import PixelGraph

# Baselines below this are clamped before the logarithm.
_PHI_FLOOR = 1e-6


@dataclass
class IndexReport:
    z_same: int
    z_total: int
    phi: float
    sigma: float
    alpha: float
    baseline_phi: float
    baseline_separated: bool = False  # baseline_phi == 1: sigma fixed to 1

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"{k:<20} {v}" for k, v in asdict(self).items()]
        return "\n".join(lines)


def count_labeled_edges(g: PixelGraph) -> tuple[int, int]:
    """Count (same-class, total) edges whose both endpoints are labeled.

    Each undirected edge is counted once.
    """
    edges = g.edge_array()
    lu = g.labels[edges[:, 0]]
    lv = g.labels[edges[:, 1]]
    both = (lu >= 0) & (lv >= 0)
    z_total = int(np.sum(both))
    z_same = int(np.sum(both & (lu == lv)))
    return z_same, z_total


def compute_phi(z_same: int, z_total: int) -> float:
    """Same-class fraction of labeled-labeled edges; 1.0 when there are none."""
    if z_total < 0 or z_same < 0 or z_same > z_total:
        raise InvalidInputError(f"bad edge counts ({z_same}, {z_total})")
    if z_total == 0:
        return 1.0
    return z_same / z_total


def compute_sigma(baseline_phi: float) -> float:
    """Exponent calibrating alpha so the baseline graph scores 0.5.

    baseline_phi = 1 would make the exponent undefined; sigma is then 1 so
    alpha degenerates to phi (callers can flag the condition).
    """
    if baseline_phi <= 0.0:
        raise InvalidInputError(f"baseline phi must be positive, got {baseline_phi}")
    if baseline_phi > 1.0:
        raise InvalidInputError(f"baseline phi must be <= 1, got {baseline_phi}")
    if baseline_phi == 1.0:
        return 1.0
    return math.log(0.5) / math.log(max(baseline_phi, _PHI_FLOOR))


def compute_alpha(phi: float, sigma: float) -> float:
    if not 0.0 <= phi <= 1.0:
        raise InvalidInputError(f"phi must lie in [0, 1], got {phi}")
    if sigma <= 0.0:
        raise InvalidInputError(f"sigma must be positive, got {sigma}")
    return phi ** sigma


def index_report(g: PixelGraph, baseline_phi: float | None = None,
                 sigma: float | None = None) -> IndexReport:
    """Score a graph. With no baseline given, the graph is its own baseline
    (the unweighted-network case, alpha = 0.5 unless perfectly separated)."""
    z_same, z_total = count_labeled_edges(g)
    phi = compute_phi(z_same, z_total)
    if sigma is not None:
        if baseline_phi is None:
            baseline_phi = 0.5 ** (1.0 / sigma)
    else:
        if baseline_phi is None:
            baseline_phi = phi
        sigma = compute_sigma(baseline_phi)
    return IndexReport(z_same=z_same, z_total=z_total, phi=phi, sigma=sigma,
                       alpha=compute_alpha(phi, sigma), baseline_phi=baseline_phi,
                       baseline_separated=(baseline_phi == 1.0))
