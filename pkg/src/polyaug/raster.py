"""Raster side: image warping, polygon rasterization, mask IoU, and the
mask-based oracle augmentation path.

Images are (H, W, C) uint8 arrays with 1 or 3 channels; binary masks are
(H, W) bool arrays. Both warping and rasterization sample at pixel centers
(i + 0.5, j + 0.5) so the polygon pipeline and the mask oracle agree at
instance boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from PIL import Image

from .errors import DimensionMismatch
from .geometry import as_polygon
from .labels import LabelFile
from .transforms import AffineAugmentation


def ensure_image(arr: np.ndarray) -> np.ndarray:
    """Validate an (H, W, C) uint8 image with 1 or 3 channels."""
    if arr.ndim != 3 or arr.shape[2] not in (1, 3):
        raise ValueError(f"image must be (H, W, 1|3), got shape {arr.shape}")
    if arr.dtype != np.uint8:
        raise ValueError(f"image must be uint8, got {arr.dtype}")
    return arr


def load_image(path) -> np.ndarray:
    """Read a PNG or JPEG file as (H, W, 1) grayscale or (H, W, 3) RGB."""
    with Image.open(path) as im:
        if im.mode == "L":
            return np.asarray(im, dtype=np.uint8)[:, :, None]
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def save_png(path, image: np.ndarray) -> None:
    image = ensure_image(image)
    if image.shape[2] == 1:
        Image.fromarray(image[:, :, 0], mode="L").save(path, format="PNG")
    else:
        Image.fromarray(image, mode="RGB").save(path, format="PNG")


def _source_coords(aug: AffineAugmentation,
                   dtype=np.float32) -> tuple[np.ndarray, np.ndarray]:
    """Source position of every destination pixel center, via the inverse map.

    float32 keeps j+0.5 grid arithmetic exact below 2**23, so axis-aligned
    maps (flips, crops, identity) stay byte-exact after sampling.
    """
    inv = aug.map.inverted()
    xs = np.arange(aug.out_width, dtype=dtype) + dtype(0.5)
    ys = np.arange(aug.out_height, dtype=dtype) + dtype(0.5)
    sx = dtype(inv.a) * xs[None, :] + dtype(inv.b) * ys[:, None] + dtype(inv.tx)
    sy = dtype(inv.c) * xs[None, :] + dtype(inv.d) * ys[:, None] + dtype(inv.ty)
    return sx, sy


@lru_cache(maxsize=8)
def _nearest_lookup(aug: AffineAugmentation) -> tuple[np.ndarray, np.ndarray]:
    """Flat source index per destination pixel plus the in-bounds mask, for
    nearest sampling of a raster of the augmentation's input size.

    Cached per augmentation; callers treat the arrays as read-only.
    """
    w, h = aug.in_width, aug.in_height
    sx, sy = _source_coords(aug)
    valid = (sx >= 0.0) & (sx < w) & (sy >= 0.0) & (sy < h)
    ix = np.clip(np.floor(sx), 0, w - 1).astype(np.intp)
    iy = np.clip(np.floor(sy), 0, h - 1).astype(np.intp)
    return iy * w + ix, valid


@lru_cache(maxsize=8)
def _bilinear_lookup(aug: AffineAugmentation):
    """Per-neighbor flat indices, blend weights and the in-bounds mask for
    bilinear sampling. Cached per augmentation; arrays are read-only."""
    w, h = aug.in_width, aug.in_height
    sx, sy = _source_coords(aug)
    # Pixel-center grid: the sample lands between the four centers at
    # (floor(gx), floor(gy)) .. (+1, +1) with fractional weights.
    gx = sx - np.float32(0.5)
    gy = sy - np.float32(0.5)
    x0 = np.floor(gx)
    y0 = np.floor(gy)
    fx = (gx - x0).ravel()[:, None]
    fy = (gy - y0).ravel()[:, None]
    x0c = np.clip(x0, 0, w - 1).astype(np.intp).ravel()
    x1c = np.clip(x0 + 1, 0, w - 1).astype(np.intp).ravel()
    y0c = np.clip(y0, 0, h - 1).astype(np.intp).ravel() * w
    y1c = np.clip(y0 + 1, 0, h - 1).astype(np.intp).ravel() * w
    weights = (
        (1.0 - fx) * (1.0 - fy),
        fx * (1.0 - fy),
        (1.0 - fx) * fy,
        fx * fy,
    )
    indices = (y0c + x0c, y0c + x1c, y1c + x0c, y1c + x1c)
    valid = (sx >= 0.0) & (sx <= w) & (sy >= 0.0) & (sy <= h)
    return indices, weights, valid


def _axis_index(scale: float, offset: float, out_n: int, src_n: int) -> np.ndarray | None:
    """Source indices along one axis when the inverse map is x -> scale*x +
    offset with scale +-1 and integer offset; None when any index would fall
    outside the source."""
    if scale == 1.0:
        start = offset
        idx = np.arange(out_n, dtype=np.intp) + np.intp(start)
    else:
        # floor(-(i+0.5) + offset) = offset - i - 1
        idx = np.intp(offset) - 1 - np.arange(out_n, dtype=np.intp)
    if idx[0] < 0 or idx[-1] < 0 or idx[0] >= src_n or idx[-1] >= src_n:
        return None
    return idx


def _axis_aligned_warp(src: np.ndarray, aug: AffineAugmentation) -> np.ndarray | None:
    """Exact warp for flip/crop/identity maps (and their compositions).

    Applicable when the inverse map has no shear/rotation, unit scales and
    integer translations: every destination center then lands exactly on a
    source center, so nearest and bilinear sampling both reduce to the same
    index permutation. Returns None when not applicable.
    """
    inv = aug.map.inverted()
    if inv.b != 0.0 or inv.c != 0.0 or abs(inv.a) != 1.0 or abs(inv.d) != 1.0:
        return None
    if not (float(inv.tx).is_integer() and float(inv.ty).is_integer()):
        return None
    cols = _axis_index(inv.a, inv.tx, aug.out_width, aug.in_width)
    rows = _axis_index(inv.d, inv.ty, aug.out_height, aug.in_height)
    if cols is None or rows is None:
        return None
    return src[rows[:, None], cols[None, :]]


def _warp_nearest(src: np.ndarray, aug: AffineAugmentation, fill: int) -> np.ndarray:
    flat, valid = _nearest_lookup(aug)
    out = src.reshape(-1, src.shape[2]).take(flat.ravel(), axis=0)
    out = out.reshape(aug.out_height, aug.out_width, src.shape[2])
    out[~valid] = fill
    return out


def _warp_bilinear(src: np.ndarray, aug: AffineAugmentation, fill: int) -> np.ndarray:
    channels = src.shape[2]
    indices, weights, valid = _bilinear_lookup(aug)
    srcf = src.reshape(-1, channels).astype(np.float32)
    val = srcf.take(indices[0], axis=0)
    val *= weights[0]
    tmp = np.empty_like(val)
    for idx, weight in zip(indices[1:], weights[1:]):
        np.take(srcf, idx, axis=0, out=tmp)
        tmp *= weight
        val += tmp

    np.clip(val, 0.0, 255.0, out=val)
    val += 0.5  # truncation below rounds half up; exact samples unaffected
    out = val.astype(np.uint8).reshape(aug.out_height, aug.out_width, channels)
    out[~valid] = fill
    return out


def warp_image(src: np.ndarray, aug: AffineAugmentation,
               interpolation: str = "bilinear", fill: int = 0) -> np.ndarray:
    """Warp an image onto the augmentation's output canvas.

    Each destination pixel is sampled at the inverse-mapped source location;
    samples falling outside the source take ``fill``.
    """
    src = ensure_image(src)
    if src.shape[:2] != (aug.in_height, aug.in_width):
        raise DimensionMismatch(
            f"image is {src.shape[1]}x{src.shape[0]} but the augmentation "
            f"expects {aug.in_width}x{aug.in_height}")
    if interpolation not in ("nearest", "bilinear"):
        raise ValueError(f"unknown interpolation {interpolation!r}")

    fast = _axis_aligned_warp(src, aug)
    if fast is not None:
        return fast
    if interpolation == "nearest":
        return _warp_nearest(src, aug, fill)
    return _warp_bilinear(src, aug, fill)


def rasterize_polygon(p, w: int, h: int) -> np.ndarray:
    """Scanline even-odd fill: pixel (i, j) is set iff its center
    (i + 0.5, j + 0.5) lies inside the polygon (pixel coordinates)."""
    p = as_polygon(p)
    ys = np.arange(h, dtype=np.float64) + 0.5

    x1 = p[:, 0]
    y1 = p[:, 1]
    x2 = np.roll(x1, -1)
    y2 = np.roll(y1, -1)
    ylo = np.minimum(y1, y2)
    yhi = np.maximum(y1, y2)

    # Half-open span [ylo, yhi) counts each vertex crossing exactly once.
    active = (ys[:, None] >= ylo[None, :]) & (ys[:, None] < yhi[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (ys[:, None] - y1[None, :]) / (y2 - y1)[None, :]
        cross = x1[None, :] + t * (x2 - x1)[None, :]
    cross[~active] = np.inf
    cross.sort(axis=1)
    counts = active.sum(axis=1)

    diff = np.zeros((h, w + 1), dtype=np.int32)
    rows = np.arange(h)
    for k in range(0, p.shape[0] - 1, 2):
        has_pair = counts > k + 1
        if not has_pair.any():
            break
        xs_start = cross[has_pair, k]
        xs_end = cross[has_pair, k + 1]
        # center i+0.5 in [start, end) -> i in [ceil(start-0.5), ceil(end-0.5))
        i0 = np.clip(np.ceil(xs_start - 0.5), 0, w).astype(np.int64)
        i1 = np.clip(np.ceil(xs_end - 0.5), 0, w).astype(np.int64)
        nonempty = i1 > i0
        r = rows[has_pair][nonempty]
        np.add.at(diff, (r, i0[nonempty]), 1)
        np.add.at(diff, (r, i1[nonempty]), -1)

    return np.cumsum(diff[:, :w], axis=1) > 0


def mask_iou(a: np.ndarray, b: np.ndarray) -> float:
    """Intersection over union of two binary masks; 1.0 when both are empty."""
    if a.shape != b.shape:
        raise DimensionMismatch(f"mask shapes differ: {a.shape} vs {b.shape}")
    union = int(np.count_nonzero(a | b))
    if union == 0:
        return 1.0
    return int(np.count_nonzero(a & b)) / union


@dataclass
class OracleOutcome:
    """Result of the conventional mask-path augmentation."""

    image: np.ndarray
    kept_ids: list[int]
    kept_masks: list[np.ndarray]
    dismissed: list[tuple[int, float]]


def oracle_augment(image: np.ndarray, lf: LabelFile, aug: AffineAugmentation,
                   threshold: float) -> OracleOutcome:
    """Conventional method: rasterize each polygon to a full-frame mask, warp
    every mask with nearest sampling, keep a mask iff

        warped set-pixel count / (|det| * original set-pixel count) >= threshold

    (|det| keeps the ratio comparable to the polygon path under scaling;
    an empty original mask gives ratio 0).
    """
    image = ensure_image(image)
    warped_image = warp_image(image, aug, interpolation="bilinear", fill=0)
    flat, valid = _nearest_lookup(aug)
    scale = np.array([aug.in_width, aug.in_height], dtype=np.float64)
    abs_det = abs(aug.map.det)

    kept_ids: list[int] = []
    kept_masks: list[np.ndarray] = []
    dismissed: list[tuple[int, float]] = []
    for instance_id, ann in enumerate(lf):
        mask = rasterize_polygon(ann.vertices * scale, aug.in_width, aug.in_height)
        warped = mask.take(flat) & valid
        original_count = int(np.count_nonzero(mask))
        warped_count = int(np.count_nonzero(warped))
        ratio = warped_count / (abs_det * original_count) if original_count else 0.0
        if ratio >= threshold:
            kept_ids.append(instance_id)
            kept_masks.append(warped)
        else:
            dismissed.append((instance_id, ratio))
    return OracleOutcome(warped_image, kept_ids, kept_masks, dismissed)


def annotation_bytes(lf: LabelFile) -> int:
    """Storage cost of polygon annotations: 16 bytes per vertex (two float64
    coordinates) plus 8 per instance."""
    return sum(2 * ann.vertices.shape[0] * 8 + 8 for ann in lf)


def mask_bytes(masks) -> int:
    """Storage cost of mask annotations at 1 byte per pixel."""
    return sum(m.shape[0] * m.shape[1] for m in masks)
