"""Per-pixel feature extraction.

Each pixel of an RGB image is described by 23 features: its grid position,
raw color channels, HSV components, excess-color components, and the mean
and standard deviation of each color/HSV channel over the pixel's
8-connected neighborhood (the pixel itself included; the neighborhood is
clipped at image borders, no wraparound).
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError

FEATURE_NAMES = (
    "row", "col",
    "R", "G", "B",
    "H", "S", "V",
    "ExR", "ExG", "ExB",
    "MR", "MG", "MB",
    "SDR", "SDG", "SDB",
    "MH", "MS", "MV",
    "SDH", "SDS", "SDV",
)

N_FEATURES = len(FEATURE_NAMES)


def validate_image(image: np.ndarray) -> np.ndarray:
    """Check that `image` is a (H, W, 3) array with H, W >= 1."""
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 3:
        raise InvalidInputError(f"expected (H, W, 3) RGB array, got shape {image.shape}")
    if image.shape[0] < 1 or image.shape[1] < 1:
        raise InvalidInputError("zero-sized image")
    return image


def validate_weights(weights, n_dims: int = N_FEATURES) -> np.ndarray:
    """Check a weight vector: entries in [0, 1], not all zero."""
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (n_dims,):
        raise InvalidInputError(f"weight vector must have {n_dims} entries, got shape {w.shape}")
    if np.any(w < 0.0) or np.any(w > 1.0):
        raise InvalidInputError("weights must lie in [0, 1]")
    if not np.any(w > 0.0):
        raise InvalidInputError("at least one weight must be positive")
    return w


def rgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    """Hexcone RGB -> HSV on float channels in [0, 1]; H in [0, 1)."""
    rgb = np.asarray(rgb, dtype=np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    v = rgb.max(axis=-1)
    c = v - rgb.min(axis=-1)
    s = np.where(v > 0.0, np.divide(c, v, out=np.zeros_like(v), where=v > 0.0), 0.0)
    safe_c = np.where(c > 0.0, c, 1.0)
    h = np.select(
        [c == 0.0, v == r, v == g],
        [0.0,
         ((g - b) / safe_c) % 6.0,
         (b - r) / safe_c + 2.0],
        default=(r - g) / safe_c + 4.0,
    ) / 6.0
    h = np.where(h >= 1.0, h - 1.0, h)
    return np.stack([h, s, v], axis=-1)


def _neighborhood_stats(channel: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean and population SD over the 3x3 window clipped to the image."""
    h, w = channel.shape
    # Shift by the global mean: variance is shift-invariant and this keeps
    # the s2/cnt - mean^2 form from cancelling catastrophically (a constant
    # channel yields an exact zero SD).
    shift = float(channel.mean())
    pad = np.zeros((h + 2, w + 2), dtype=np.float64)
    pad[1:-1, 1:-1] = channel - shift
    cnt_pad = np.zeros((h + 2, w + 2), dtype=np.float64)
    cnt_pad[1:-1, 1:-1] = 1.0

    s1 = np.zeros((h, w), dtype=np.float64)
    s2 = np.zeros((h, w), dtype=np.float64)
    cnt = np.zeros((h, w), dtype=np.float64)
    for dr in (0, 1, 2):
        for dc in (0, 1, 2):
            s1 += pad[dr:dr + h, dc:dc + w]
            s2 += pad[dr:dr + h, dc:dc + w] ** 2
            cnt += cnt_pad[dr:dr + h, dc:dc + w]
    mean = s1 / cnt
    var = np.maximum(s2 / cnt - mean ** 2, 0.0)
    return mean + shift, np.sqrt(var)


def extract_features(image: np.ndarray) -> np.ndarray:
    """Compute the raw (un-normalized) N x 23 feature matrix of an image.

    `image` is a (H, W, 3) uint8 (or float in [0, 255]) RGB array. Rows of
    the result follow row-major pixel order; columns follow FEATURE_NAMES.
    H, S, V and Ex* are computed on channels scaled to [0, 1]; row/col are
    0-based grid indices; R, G, B stay on their raw scale.
    """
    image = validate_image(image)
    h, w = image.shape[:2]
    raw = image.astype(np.float64)
    unit = raw / 255.0

    rows, cols = np.mgrid[0:h, 0:w].astype(np.float64)
    hsv = rgb_to_hsv(unit)
    r1, g1, b1 = unit[..., 0], unit[..., 1], unit[..., 2]
    ex = np.stack([2 * r1 - g1 - b1, 2 * g1 - r1 - b1, 2 * b1 - r1 - g1], axis=-1)

    planes = [rows, cols,
              raw[..., 0], raw[..., 1], raw[..., 2],
              hsv[..., 0], hsv[..., 1], hsv[..., 2],
              ex[..., 0], ex[..., 1], ex[..., 2]]
    for src in (raw[..., 0], raw[..., 1], raw[..., 2]):
        planes.append(_neighborhood_stats(src)[0])
    for src in (raw[..., 0], raw[..., 1], raw[..., 2]):
        planes.append(_neighborhood_stats(src)[1])
    for src in (hsv[..., 0], hsv[..., 1], hsv[..., 2]):
        planes.append(_neighborhood_stats(src)[0])
    for src in (hsv[..., 0], hsv[..., 1], hsv[..., 2]):
        planes.append(_neighborhood_stats(src)[1])

    return np.stack([p.reshape(-1) for p in planes], axis=1)


def normalize(fm: np.ndarray) -> np.ndarray:
    """Standardize each column to mean 0 / sample SD 1 (divisor n-1).

    Columns that are constant (SD 0, including the n = 1 case) become
    all-zero: a constant feature carries no information and zeroing it
    removes it from every distance.
    """
    fm = np.asarray(fm, dtype=np.float64)
    if fm.ndim != 2 or fm.shape[0] < 1:
        raise InvalidInputError("feature matrix must be a non-empty 2-D array")
    mean = fm.mean(axis=0)
    centered = fm - mean
    if fm.shape[0] > 1:
        sd = fm.std(axis=0, ddof=1)
    else:
        sd = np.zeros(fm.shape[1])
    out = np.zeros_like(centered)
    nz = sd > 0.0
    out[:, nz] = centered[:, nz] / sd[nz]
    return out


def apply_weights(fm: np.ndarray, weights) -> np.ndarray:
    """Scale each feature column by its weight."""
    fm = np.asarray(fm, dtype=np.float64)
    if fm.ndim != 2:
        raise InvalidInputError("feature matrix must be 2-D")
    w = validate_weights(weights, fm.shape[1])
    return fm * w


def features_to_csv(fm: np.ndarray, path) -> None:
    """Write a feature matrix as CSV with a FEATURE_NAMES header row."""
    np.savetxt(path, np.asarray(fm), delimiter=",", header=",".join(FEATURE_NAMES), comments="")
