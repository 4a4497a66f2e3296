"""Pixel k-NN graph construction.

Nodes are the non-ignored pixels of an image; two nodes are joined when
either is among the other's k nearest neighbors in weighted feature space
(union symmetrization). The graph is undirected, unweighted and stored in
CSR form with per-node sorted neighbor lists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import FormatError, InvalidInputError, InvalidParameterError
from .features import N_FEATURES, apply_weights, validate_weights

UNLABELED = -1
IGNORED = -2

# Full argsort below this node count; argpartition + candidate re-sort above.
_EXACT_SORT_MAX = 2048
_QUERY_CHUNK = 64


@dataclass
class PixelGraph:
    """Undirected unweighted k-NN graph with per-node class labels.

    labels[i] is UNLABELED (-1) or a class index in [0, n_classes).
    node_to_pixel maps node index -> row-major pixel index (None when the
    graph was not built from an image).
    """

    indptr: np.ndarray
    indices: np.ndarray
    labels: np.ndarray
    k: int
    n_classes: int = 2
    lam: Optional[np.ndarray] = None
    node_to_pixel: Optional[np.ndarray] = None
    image_shape: Optional[tuple[int, int]] = None

    @property
    def n_nodes(self) -> int:
        return len(self.indptr) - 1

    @property
    def n_edges(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def degree(self, i: int) -> int:
        return int(self.indptr[i + 1] - self.indptr[i])

    def edge_array(self) -> np.ndarray:
        """All edges as an (E, 2) array with u < v."""
        u = np.repeat(np.arange(self.n_nodes), np.diff(self.indptr))
        v = self.indices
        keep = u < v
        return np.stack([u[keep], v[keep]], axis=1)


def distance(fm: np.ndarray, weights, i: int, j: int) -> float:
    """Euclidean distance between the weighted feature rows i and j."""
    fm = np.asarray(fm)
    w = validate_weights(weights, fm.shape[1])
    diff = w * (fm[i] - fm[j])
    return float(np.sqrt(np.dot(diff, diff)))


def _sq_dists(queries: np.ndarray, X: np.ndarray,
              query_ids: np.ndarray) -> np.ndarray:
    """Squared distances from each query row to every row of X; self = inf.

    Computed by explicit differences rather than the norms-plus-matmul
    identity: the two round differently, and neighbor ranking must break
    distance ties exactly like a direct pairwise computation does.
    """
    d = ((queries[:, None, :] - X[None, :, :]) ** 2).sum(axis=-1)
    d[np.arange(len(query_ids)), query_ids] = np.inf
    return d


def knn_lists(X: np.ndarray, k: int, query_ids: Optional[np.ndarray] = None) -> np.ndarray:
    """Indices of the k nearest rows for each query row (self excluded).

    Equidistant candidates are ranked by ascending index, so the result is
    deterministic. Returns a (n_queries, k) int array.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    n = len(X)
    if query_ids is None:
        query_ids = np.arange(n)
    if k < 1:
        raise InvalidParameterError("k must be >= 1")
    if k >= n:
        raise InvalidParameterError(f"k = {k} must be smaller than the node count {n}")

    out = np.empty((len(query_ids), k), dtype=np.int64)
    for start in range(0, len(query_ids), _QUERY_CHUNK):
        ids = query_ids[start:start + _QUERY_CHUNK]
        d = _sq_dists(X[ids], X, ids)
        if n <= _EXACT_SORT_MAX:
            out[start:start + len(ids)] = np.argsort(d, axis=1, kind="stable")[:, :k]
        else:
            cand = np.argpartition(d, k - 1, axis=1)[:, :k]
            for r in range(len(ids)):
                c = cand[r]
                order = np.lexsort((c, d[r, c]))
                out[start + r] = c[order]
    return out


def _csr_from_edges(n: int, edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """CSR adjacency (sorted neighbor lists) from unique undirected edges."""
    if len(edges) == 0:
        return np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int32)
    u = np.concatenate([edges[:, 0], edges[:, 1]])
    v = np.concatenate([edges[:, 1], edges[:, 0]])
    order = np.lexsort((v, u))
    u, v = u[order], v[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, u + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, v.astype(np.int32)


def build_graph_from_points(X: np.ndarray, labels: np.ndarray, k: int,
                            n_classes: int = 2) -> PixelGraph:
    """k-NN graph over arbitrary (already weighted) feature rows."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int8)
    n = len(X)
    if labels.shape != (n,):
        raise InvalidInputError("labels must have one entry per row of X")
    knn = knn_lists(X, k)
    u = np.repeat(np.arange(n), k)
    v = knn.reshape(-1)
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    edges = np.unique(np.stack([lo, hi], axis=1), axis=0)
    indptr, indices = _csr_from_edges(n, edges)
    return PixelGraph(indptr=indptr, indices=indices, labels=labels, k=k,
                      n_classes=n_classes)


def build_graph(fm: np.ndarray, pixel_labels: np.ndarray, k: int, weights) -> PixelGraph:
    """Build the pixel graph from a normalized feature matrix.

    pixel_labels is a flat per-pixel array: -2 for ignored pixels (excluded
    from the graph entirely), UNLABELED (-1), or a class index. fm must
    have one row per pixel; weights are applied here.
    """
    fm = np.asarray(fm, dtype=np.float64)
    pixel_labels = np.asarray(pixel_labels)
    if fm.shape[0] != pixel_labels.shape[0]:
        raise InvalidInputError("feature matrix and label map disagree on pixel count")
    node_to_pixel = np.flatnonzero(pixel_labels != IGNORED)
    n = len(node_to_pixel)
    if k >= n:
        raise InvalidParameterError(f"k = {k} must be smaller than the node count {n}")
    labels = pixel_labels[node_to_pixel].astype(np.int8)
    present = np.unique(labels[labels >= 0])
    if len(present) < 2:
        raise InvalidInputError("need labeled nodes of at least 2 classes")
    X = apply_weights(fm, weights)[node_to_pixel]
    g = build_graph_from_points(X, labels, k, n_classes=int(labels.max()) + 1)
    g.lam = np.asarray(weights, dtype=np.float64)
    g.node_to_pixel = node_to_pixel
    return g


def labeled_knn_edge_counts(fm: np.ndarray, pixel_labels: np.ndarray, k: int,
                            weights) -> tuple[int, int]:
    """(same-class, total) labeled-labeled edge counts without a full build.

    A labeled-labeled edge exists iff one endpoint lists the other in its
    own k-NN list, so only the labeled nodes' lists are needed. Produces
    the same counts as counting on build_graph's output.
    """
    fm = np.asarray(fm, dtype=np.float64)
    pixel_labels = np.asarray(pixel_labels)
    node_to_pixel = np.flatnonzero(pixel_labels != IGNORED)
    labels = pixel_labels[node_to_pixel].astype(np.int64)
    X = np.ascontiguousarray(apply_weights(fm, weights)[node_to_pixel])
    labeled_ids = np.flatnonzero(labels >= 0)
    knn = knn_lists(X, k, query_ids=labeled_ids)

    u = np.repeat(labeled_ids, k)
    v = knn.reshape(-1)
    keep = labels[v] >= 0
    u, v = u[keep], v[keep]
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    pairs = np.unique(np.stack([lo, hi], axis=1), axis=0)
    z_total = len(pairs)
    z_same = int(np.sum(labels[pairs[:, 0]] == labels[pairs[:, 1]]))
    return z_same, z_total


# --- serialization -----------------------------------------------------------

_CLASS_NAMES = {0: "background", 1: "foreground"}
_CLASS_CODES = {v: k for k, v in _CLASS_NAMES.items()}


def save_edgelist(g: PixelGraph, path) -> None:
    """Write the graph as text: header lines then one 'i j' pair (i < j)."""
    with open(path, "w") as f:
        f.write(f"# N {g.n_nodes}\n")
        f.write(f"# k {g.k}\n")
        if g.lam is not None:
            f.write("# lambda " + " ".join(repr(float(x)) for x in g.lam) + "\n")
        for i in range(g.n_nodes):
            if g.labels[i] >= 0:
                name = _CLASS_NAMES.get(int(g.labels[i]), str(int(g.labels[i])))
                f.write(f"# label {i} {name}\n")
        for u, v in g.edge_array():
            f.write(f"{u} {v}\n")


def load_edgelist(path) -> PixelGraph:
    """Read a graph written by save_edgelist."""
    n = None
    k = 0
    lam = None
    label_lines: list[tuple[int, int]] = []
    edges: list[tuple[int, int]] = []
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if not parts:
                    continue
                key = parts[0]
                if key == "N":
                    n = int(parts[1])
                elif key == "k":
                    k = int(parts[1])
                elif key == "lambda":
                    lam = np.array([float(x) for x in parts[1:]])
                elif key == "label":
                    node = int(parts[1])
                    cls = _CLASS_CODES.get(parts[2])
                    if cls is None:
                        cls = int(parts[2])
                    label_lines.append((node, cls))
                continue
            parts = line.split()
            if len(parts) != 2:
                raise FormatError(f"{path}:{lineno}: expected 'i j', got {line!r}")
            edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        raise FormatError(f"{path}: missing '# N <count>' header")
    labels = np.full(n, UNLABELED, dtype=np.int8)
    for node, cls in label_lines:
        labels[node] = cls
    arr = np.array(edges, dtype=np.int64).reshape(-1, 2)
    lo = np.minimum(arr[:, 0], arr[:, 1])
    hi = np.maximum(arr[:, 0], arr[:, 1])
    arr = np.unique(np.stack([lo, hi], axis=1), axis=0)
    indptr, indices = _csr_from_edges(n, arr)
    n_classes = max(2, int(labels.max()) + 1)
    return PixelGraph(indptr=indptr, indices=indices, labels=labels, k=k,
                      n_classes=n_classes, lam=lam)


def save_npz(g: PixelGraph, path) -> None:
    """Compact binary graph file."""
    payload = dict(indptr=g.indptr, indices=g.indices, labels=g.labels,
                   k=np.int64(g.k), n_classes=np.int64(g.n_classes))
    if g.lam is not None:
        payload["lam"] = g.lam
    if g.node_to_pixel is not None:
        payload["node_to_pixel"] = g.node_to_pixel
    if g.image_shape is not None:
        payload["image_shape"] = np.array(g.image_shape, dtype=np.int64)
    np.savez_compressed(path, **payload)


def load_npz(path) -> PixelGraph:
    with np.load(path) as z:
        return PixelGraph(
            indptr=z["indptr"], indices=z["indices"], labels=z["labels"],
            k=int(z["k"]), n_classes=int(z["n_classes"]),
            lam=z["lam"] if "lam" in z else None,
            node_to_pixel=z["node_to_pixel"] if "node_to_pixel" in z else None,
            image_shape=tuple(z["image_shape"]) if "image_shape" in z else None,
        )
