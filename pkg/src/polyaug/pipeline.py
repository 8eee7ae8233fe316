"""Keypoint-based polygon augmentation.

Each polygon vertex becomes an identified keypoint carrying its instance id,
class id, pre-transform area and vertex index. Keypoints are transformed
independently, reassembled into polygons, clipped to the output frame, and
filtered by retained visible area:

    retention_ratio = area(clip(T(P))) / area(T(P))        (pixel units)

An instance is kept iff its clipped polygon exists and the ratio is >= the
threshold (boundary equality keeps).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInstance, DimensionMismatch
from .geometry import AffineMap, Rect, clip_to_rect, polygon_area
from .labels import LabelFile, PolygonAnnotation
from .raster import ensure_image, warp_image
from .transforms import AffineAugmentation


@dataclass(frozen=True)
class IdentifiedKeypoint:
    """One polygon vertex, individually transformable but reassemblable."""

    x: float
    y: float
    instance_id: int
    class_id: int
    original_area: float
    vertex_index: int


def format_keypoint_name(kp: IdentifiedKeypoint) -> str:
    """Debug rendering of a keypoint's identity as ``id_class_area``."""
    return f"{kp.instance_id}_{kp.class_id}_{kp.original_area:.6}"


@dataclass
class KeypointSet:
    """Flattened keypoints of all instances, plus the pixel frame they live in."""

    keypoints: list[IdentifiedKeypoint]
    image_width: int
    image_height: int

    def __len__(self) -> int:
        return len(self.keypoints)


@dataclass
class AugmentationOutcome:
    """Partition of input instances into kept (as output-normalized
    annotations) and dismissed (with their retention ratios)."""

    kept: list[PolygonAnnotation] = field(default_factory=list)
    kept_ids: list[int] = field(default_factory=list)
    kept_ratios: list[float] = field(default_factory=list)
    dismissed: list[tuple[int, float]] = field(default_factory=list)

    @property
    def n_input(self) -> int:
        return len(self.kept) + len(self.dismissed)


def yolo_to_keypoints(lf: LabelFile, width: int, height: int) -> KeypointSet:
    """Encode normalized annotations as pixel-space identified keypoints.

    original_area is computed on the normalized vertices (squared normalized
    units). Raises DegenerateInstance for zero-area polygons.
    """
    if width < 1 or height < 1:
        raise ValueError("frame dimensions must be >= 1")
    keypoints = []
    for instance_id, ann in enumerate(lf):
        area = polygon_area(ann.vertices)
        if area == 0.0:
            raise DegenerateInstance(instance_id)
        for vertex_index, (x, y) in enumerate(ann.vertices):
            keypoints.append(IdentifiedKeypoint(
                x=float(x) * width,
                y=float(y) * height,
                instance_id=instance_id,
                class_id=ann.class_id,
                original_area=area,
                vertex_index=vertex_index,
            ))
    return KeypointSet(keypoints, width, height)


def transform_keypoints(ks: KeypointSet, m: AffineMap,
                        out_width: int, out_height: int) -> KeypointSet:
    """Map every keypoint independently; identities are untouched."""
    moved = [
        IdentifiedKeypoint(
            x=m.a * kp.x + m.b * kp.y + m.tx,
            y=m.c * kp.x + m.d * kp.y + m.ty,
            instance_id=kp.instance_id,
            class_id=kp.class_id,
            original_area=kp.original_area,
            vertex_index=kp.vertex_index,
        )
        for kp in ks.keypoints
    ]
    return KeypointSet(moved, out_width, out_height)


def _group_instances(ks: KeypointSet) -> dict[int, list[IdentifiedKeypoint]]:
    groups: dict[int, list[IdentifiedKeypoint]] = {}
    for kp in ks.keypoints:
        groups.setdefault(kp.instance_id, []).append(kp)
    for instance_id, group in groups.items():
        group.sort(key=lambda kp: kp.vertex_index)
        indices = [kp.vertex_index for kp in group]
        if indices != list(range(len(group))):
            raise ValueError(
                f"instance {instance_id} has vertex indices {indices}, "
                f"expected 0..{len(group) - 1}")
        if len({(kp.class_id, kp.original_area) for kp in group}) != 1:
            raise ValueError(f"instance {instance_id} mixes class or area tags")
    return groups


def keypoints_to_yolo(ks: KeypointSet, out_width: int, out_height: int,
                      threshold: float) -> AugmentationOutcome:
    """Reassemble post-transform keypoints into polygons, clip to the output
    frame, and threshold-filter by retained visible area.

    Kept polygons are the clipped vertices normalized by the output size;
    instances fully outside the frame (or degenerate) land in ``dismissed``
    with ratio 0.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    frame = Rect(0.0, 0.0, float(out_width), float(out_height))
    outcome = AugmentationOutcome()
    groups = _group_instances(ks)
    for instance_id in sorted(groups):
        group = groups[instance_id]
        polygon = np.array([(kp.x, kp.y) for kp in group], dtype=np.float64)
        full_area = polygon_area(polygon)
        clipped = clip_to_rect(polygon, frame) if full_area > 0.0 else None
        if clipped is None:
            outcome.dismissed.append((instance_id, 0.0))
            continue
        ratio = min(1.0, polygon_area(clipped) / full_area)
        if ratio < threshold:
            outcome.dismissed.append((instance_id, ratio))
            continue
        normalized = clipped / np.array([out_width, out_height], dtype=np.float64)
        np.clip(normalized, 0.0, 1.0, out=normalized)
        outcome.kept.append(PolygonAnnotation(group[0].class_id, normalized))
        outcome.kept_ids.append(instance_id)
        outcome.kept_ratios.append(ratio)
    return outcome


def augment_pair(image: np.ndarray, lf: LabelFile, aug: AffineAugmentation,
                 threshold: float, interpolation: str = "bilinear",
                 fill: int = 0) -> tuple[np.ndarray, AugmentationOutcome]:
    """Warp an image and its polygon annotations with one augmentation.

    The outcome's instance ids refer to positions in the input label file,
    in input order.
    """
    image = ensure_image(image)
    if image.shape[:2] != (aug.in_height, aug.in_width):
        raise DimensionMismatch(
            f"image is {image.shape[1]}x{image.shape[0]} but the augmentation "
            f"expects {aug.in_width}x{aug.in_height}")
    warped = warp_image(image, aug, interpolation=interpolation, fill=fill)
    encoded = yolo_to_keypoints(lf, aug.in_width, aug.in_height)
    moved = transform_keypoints(encoded, aug.map, aug.out_width, aug.out_height)
    outcome = keypoints_to_yolo(moved, aug.out_width, aug.out_height, threshold)
    return warped, outcome
