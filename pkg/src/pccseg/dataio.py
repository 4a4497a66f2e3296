"""Image / trimap / ground-truth I/O and the segmentation error metric.

Trimap convention (GrabCut): 0 ignored background, 64 labeled background,
128 unlabeled region, 255 labeled foreground. Ground-truth images are 0
(background) / 255 (foreground) with a gray uncertainty contour that is
excluded from error computation.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import FormatError, InvalidInputError
from .graph import IGNORED, UNLABELED

TRIMAP_IGNORED = 0
TRIMAP_BACKGROUND = 64
TRIMAP_UNLABELED = 128
TRIMAP_FOREGROUND = 255

_TRIMAP_TO_LABEL = {
    TRIMAP_IGNORED: IGNORED,
    TRIMAP_BACKGROUND: 0,
    TRIMAP_UNLABELED: UNLABELED,
    TRIMAP_FOREGROUND: 1,
}

GT_UNCERTAIN = -1


@dataclass
class EvalReport:
    error_rate: float
    evaluated_pixel_count: int
    wrong_pixel_count: int
    true_background: int
    false_background: int
    true_foreground: int
    false_foreground: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    def to_text(self) -> str:
        return "\n".join(f"{k:<22} {v}" for k, v in asdict(self).items())


def load_image(path) -> np.ndarray:
    """8-bit RGB raster as (H, W, 3) uint8; grayscale is replicated."""
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"))


def load_trimap(path) -> np.ndarray:
    """Trimap raster -> flat per-pixel label array (graph convention)."""
    with Image.open(path) as im:
        raw = np.asarray(im.convert("L"))
    return trimap_to_labels(raw, name=str(path))


def trimap_to_labels(raw: np.ndarray, name: str = "trimap") -> np.ndarray:
    """Map trimap gray codes to {-2 ignored, -1 unlabeled, 0 bg, 1 fg}."""
    raw = np.asarray(raw)
    valid = np.isin(raw, list(_TRIMAP_TO_LABEL))
    if not valid.all():
        r, c = np.argwhere(~valid)[0]
        raise FormatError(
            f"{name}: unexpected trimap value {int(raw[r, c])} at pixel ({int(r)}, {int(c)})")
    out = np.full(raw.shape, UNLABELED, dtype=np.int8)
    for code, label in _TRIMAP_TO_LABEL.items():
        out[raw == code] = label
    return out.reshape(-1)


def load_gray(path) -> np.ndarray:
    """Raw 8-bit grayscale raster as a (H, W) uint8 array."""
    with Image.open(path) as im:
        return np.asarray(im.convert("L"))


def gt_to_labels(raw: np.ndarray) -> np.ndarray:
    """Ground-truth raster -> flat int8: 0 bg, 1 fg, -1 uncertain gray."""
    raw = np.asarray(raw)
    out = np.full(raw.shape, GT_UNCERTAIN, dtype=np.int8)
    out[raw == 0] = 0
    out[raw == 255] = 1
    return out.reshape(-1)


def load_ground_truth(path) -> np.ndarray:
    """Ground truth -> flat int8 array: 0 bg, 1 fg, -1 uncertain gray."""
    return gt_to_labels(load_gray(path))


def save_mask(mask: np.ndarray, path) -> None:
    """Write a (H, W) mask as 8-bit grayscale, values 0/255 only."""
    mask = np.asarray(mask)
    out = np.where(mask > 0, 255, 0).astype(np.uint8)
    Image.fromarray(out, mode="L").save(path)


def load_mask(path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("L"))


def error_rate(result_labels: np.ndarray, pixel_labels: np.ndarray,
               gt: np.ndarray) -> EvalReport:
    """Fraction of wrongly classified unlabeled pixels.

    Only trimap-unlabeled pixels count, and among those the ground-truth
    uncertainty contour is excluded.
    """
    result_labels = np.asarray(result_labels).reshape(-1)
    pixel_labels = np.asarray(pixel_labels).reshape(-1)
    gt = np.asarray(gt).reshape(-1)
    if not (len(result_labels) == len(pixel_labels) == len(gt)):
        raise InvalidInputError("result, trimap and ground truth disagree on geometry")
    evaluated = (pixel_labels == UNLABELED) & (gt != GT_UNCERTAIN)
    pred = result_labels[evaluated]
    truth = gt[evaluated]
    wrong = int(np.sum(pred != truth))
    n = int(evaluated.sum())
    return EvalReport(
        error_rate=wrong / n if n else 0.0,
        evaluated_pixel_count=n,
        wrong_pixel_count=wrong,
        true_background=int(np.sum((truth == 0) & (pred == 0))),
        false_background=int(np.sum((truth == 1) & (pred == 0))),
        true_foreground=int(np.sum((truth == 1) & (pred == 1))),
        false_foreground=int(np.sum((truth == 0) & (pred == 1))),
    )


def downscale(image: np.ndarray, trimap_raw: np.ndarray | None,
              gt_raw: np.ndarray | None, longest_side: int
              ) -> tuple[np.ndarray, np.ndarray | None, np.ndarray | None]:
    """Shrink an image triple so its longest side is `longest_side`.

    The image is area-averaged; trimap and ground truth use nearest
    neighbor so their code sets are preserved.
    """
    h, w = image.shape[:2]
    scale = longest_side / max(h, w)
    if scale >= 1.0:
        return image, trimap_raw, gt_raw
    nh, nw = max(1, round(h * scale)), max(1, round(w * scale))
    img = np.asarray(Image.fromarray(image).resize((nw, nh), Image.BOX))

    def _nearest(arr):
        if arr is None:
            return None
        return np.asarray(Image.fromarray(np.asarray(arr, dtype=np.uint8))
                          .resize((nw, nh), Image.NEAREST))

    return img, _nearest(trimap_raw), _nearest(gt_raw)


def find_triple(directory, name: str) -> tuple[Path, Path, Path | None]:
    """Locate <name>.(png|bmp|jpg), <name>-trimap.png, <name>-gt.png."""
    directory = Path(directory)
    image = None
    for ext in (".png", ".bmp", ".jpg", ".jpeg"):
        cand = directory / f"{name}{ext}"
        if cand.exists():
            image = cand
            break
    trimap = directory / f"{name}-trimap.png"
    gt = directory / f"{name}-gt.png"
    if image is None or not trimap.exists():
        raise InvalidInputError(f"dataset triple for {name!r} not found in {directory}")
    return image, trimap, gt if gt.exists() else None
