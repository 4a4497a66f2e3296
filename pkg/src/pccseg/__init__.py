"""Interactive image segmentation by particle competition and cooperation.

Pipeline: 23 per-pixel features -> weighted k-NN pixel graph -> particle
competition/cooperation label propagation -> per-pixel mask. A graph
quality index (alpha) scores candidate graphs, and a genetic algorithm
searches the feature weights that maximize it.
"""

from .engine import BACKEND, PccParams, SegmentationResult, segment
from .features import FEATURE_NAMES, N_FEATURES, apply_weights, extract_features, normalize
from .ga import GaConfig, optimize_weights
from .graph import PixelGraph, build_graph
from .index import IndexReport, index_report

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "FEATURE_NAMES",
    "N_FEATURES",
    "GaConfig",
    "IndexReport",
    "PccParams",
    "PixelGraph",
    "SegmentationResult",
    "apply_weights",
    "build_graph",
    "extract_features",
    "index_report",
    "normalize",
    "optimize_weights",
    "segment",
]
