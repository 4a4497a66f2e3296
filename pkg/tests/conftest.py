import numpy as np
import pytest

from pccseg.graph import PixelGraph, UNLABELED, _csr_from_edges


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance-criteria verdict lines after the test run."""
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)


def graph_from_edges(n, edges, labels=None, k=0, n_classes=2):
    """Build a PixelGraph directly from an explicit undirected edge list."""
    arr = np.array(sorted({(min(u, v), max(u, v)) for u, v in edges}), dtype=np.int64)
    arr = arr.reshape(-1, 2)
    indptr, indices = _csr_from_edges(n, arr)
    if labels is None:
        lab = np.full(n, UNLABELED, dtype=np.int8)
    else:
        lab = np.asarray(labels, dtype=np.int8)
    return PixelGraph(indptr=indptr, indices=indices, labels=lab, k=k,
                      n_classes=n_classes)


def example_network_edges(separable=False):
    """27-node two-class example networks used for the index arithmetic.

    Default: 20 labeled-labeled edges, 15 intra-class. With
    separable=True: 17 labeled-labeled edges, 16 intra-class.
    """
    same_a = [(i, i + 1) for i in range(7)]          # class 0 chain: 7 edges
    same_b = [(i, i + 1) for i in range(8, 15)]      # class 1 chain: 7 edges
    if separable:
        same = same_a + same_b + [(0, 2), (1, 3)]    # 16 intra-class
        cross = [(0, 8)]                             # 1 inter-class
    else:
        same = same_a + same_b + [(0, 2)]            # 15 intra-class
        cross = [(0, 8), (1, 9), (2, 10), (3, 11), (4, 12)]
    extra = [(7, 16), (16, 17), (17, 18), (18, 19), (15, 20), (20, 21),
             (21, 22), (22, 23), (23, 24), (24, 25), (25, 26), (26, 16)]
    return same + cross + extra


def example_network(separable=False):
    labels = np.full(27, UNLABELED, dtype=np.int8)
    labels[0:8] = 0
    labels[8:16] = 1
    return graph_from_edges(27, example_network_edges(separable), labels)


@pytest.fixture
def fig_network():
    return example_network(separable=False)


@pytest.fixture
def fig_network_separable():
    return example_network(separable=True)


def synthetic_two_region_image(size=64, mean_gap=60, noise_sd=8, seed=0):
    """Left/right two-region RGB image with per-pixel gaussian noise."""
    rng = np.random.default_rng(seed)
    base = np.zeros((size, size, 3), dtype=np.float64)
    base[:, : size // 2] = (90, 100, 110)
    base[:, size // 2:] = (90 + mean_gap, 100 + mean_gap, 110 + mean_gap)
    img = np.clip(base + rng.normal(0, noise_sd, base.shape), 0, 255).astype(np.uint8)
    gt = np.zeros((size, size), dtype=np.int8)
    gt[:, size // 2:] = 1
    return img, gt.reshape(-1)


def seed_labels(gt, frac=0.02, seed=0):
    """Per-pixel label map with `frac` of each region labeled, rest unlabeled."""
    rng = np.random.default_rng(seed)
    labels = np.full(gt.shape, UNLABELED, dtype=np.int8)
    for cls in (0, 1):
        ids = np.flatnonzero(gt == cls)
        chosen = rng.choice(ids, size=max(1, int(len(ids) * frac)), replace=False)
        labels[chosen] = cls
    return labels


def grid_seed_labels(size=64, frac=0.02):
    """2% of each region labeled on a corner-inclusive grid spanning it.

    Spread-out seeds stand in for a user scribbling across each region;
    unlike random placement they always touch the columns next to the
    region boundary, whose blended neighborhood features otherwise leave
    them cut off from every labeled pixel in the k-NN graph.
    """
    labels = np.full(size * size, UNLABELED, dtype=np.int8)
    n_per_region = max(1, int(frac * size * size // 2))
    n_cols = max(2, int(np.ceil(np.sqrt(n_per_region / 2))))
    n_rows = max(2, n_per_region // n_cols)
    rows = np.round(np.linspace(0, size - 1, n_rows)).astype(int)
    half = size // 2
    for cls, (c0, c1) in enumerate([(0, half - 1), (half, size - 1)]):
        cols = np.round(np.linspace(c0, c1, n_cols)).astype(int)
        for r in rows:
            labels[r * size + cols] = cls
    return labels


def synthetic_cluster_features(n_per_class=100, n_dims=23, sep_dim=0, gap=10.0,
                               n_labeled=10, seed=0):
    """Two gaussian clusters separated only along one feature dimension.

    Every other dimension is pure noise. Returns (features, pixel_labels,
    true_class) in the flat-label convention of the graph module.
    """
    rng = np.random.default_rng(seed)
    n = 2 * n_per_class
    X = rng.normal(0, 1, (n, n_dims))
    true = np.zeros(n, dtype=np.int8)
    true[n_per_class:] = 1
    X[:, sep_dim] = rng.normal(0, 0.5, n)
    X[n_per_class:, sep_dim] += gap
    labels = np.full(n, UNLABELED, dtype=np.int8)
    for cls in (0, 1):
        ids = np.flatnonzero(true == cls)
        labels[rng.choice(ids, size=n_labeled, replace=False)] = cls
    return X, labels, true
