"""Desk-scale time/space comparison of the polygon pipeline vs the mask oracle.

Both paths run single-threaded over the same pre-loaded in-memory dataset so
wall times compare the augmentation paths themselves, not disk or codec work.
Peak transient allocation is measured with tracemalloc in a separate untimed
pass (tracing slows allocation and would pollute the timings).
"""

from __future__ import annotations

import json
import random
import statistics
import time
import tracemalloc
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .labels import LabelFile, PolygonAnnotation
from .pipeline import augment_pair
from .raster import annotation_bytes, oracle_augment, rasterize_polygon
from .transforms import TransformSpec, build_augmentation


@dataclass(frozen=True)
class SyntheticDatasetSpec:
    """Deterministic stand-in for a real segmentation dataset."""

    n_images: int
    instances_per_image: int
    vertices_per_instance: int
    image_size: int
    seed: int = 0

    def __post_init__(self):
        if min(self.n_images, self.instances_per_image, self.image_size) < 1:
            raise ValueError("dataset spec fields must be positive")
        if self.vertices_per_instance < 3:
            raise ValueError("instances need at least 3 vertices")


@dataclass
class SyntheticDataset:
    """Pre-loaded images and labels; index i pairs images[i] with labels[i]."""

    images: list[np.ndarray]
    labels: list[LabelFile]
    spec: SyntheticDatasetSpec

    def __len__(self) -> int:
        return len(self.images)

    @property
    def stems(self) -> list[str]:
        return [f"synthetic_{i:04d}" for i in range(len(self.images))]

    @property
    def n_instances(self) -> int:
        return sum(len(lf) for lf in self.labels)

    @property
    def mean_vertices(self) -> float:
        counts = [ann.vertices.shape[0] for lf in self.labels for ann in lf]
        return float(np.mean(counts)) if counts else 0.0


def _convex_polygon(rng: np.random.Generator, size: int, n_vertices: int) -> np.ndarray:
    """Random convex-ish polygon: sorted angles on a random ellipse, strictly
    inside the frame. Retries until the polygon has a healthy area."""
    while True:
        rx = rng.uniform(0.06 * size, 0.16 * size)
        ry = rng.uniform(0.06 * size, 0.16 * size)
        cx = rng.uniform(rx + 1.0, size - rx - 1.0)
        cy = rng.uniform(ry + 1.0, size - ry - 1.0)
        angles = np.sort(rng.uniform(0.0, 2.0 * np.pi, n_vertices))
        pts = np.stack([cx + rx * np.cos(angles), cy + ry * np.sin(angles)], axis=1)
        # Reject angle clusterings that collapse the polygon.
        area = 0.5 * abs(np.sum(pts[:, 0] * np.roll(pts[:, 1], -1)
                                - np.roll(pts[:, 0], -1) * pts[:, 1]))
        if area >= 0.15 * np.pi * rx * ry:
            return pts


def generate_synthetic(spec: SyntheticDatasetSpec) -> SyntheticDataset:
    """Flat-color images with tinted polygon regions; deterministic per seed."""
    rng = np.random.default_rng(spec.seed)
    size = spec.image_size
    images: list[np.ndarray] = []
    labels: list[LabelFile] = []
    for _ in range(spec.n_images):
        image = np.full((size, size, 3),
                        rng.integers(16, 240, size=3, dtype=np.uint8)[None, None, :])
        annotations = []
        for _ in range(spec.instances_per_image):
            pts = _convex_polygon(rng, size, spec.vertices_per_instance)
            mask = rasterize_polygon(pts, size, size)
            image[mask] = rng.integers(16, 240, size=3, dtype=np.uint8)
            annotations.append(PolygonAnnotation(
                class_id=int(rng.integers(0, 3)),
                vertices=pts / size,
            ))
        images.append(image)
        labels.append(LabelFile(annotations))
    return SyntheticDataset(images, labels, spec)


@dataclass
class PathStats:
    """One augmentation path's measurements over the whole dataset."""

    wall_time_s: float
    wall_times_s: list[float]
    annotation_bytes: int
    peak_transient_bytes: int
    kept_instances: int


@dataclass
class BenchReport:
    polygon: PathStats
    mask: PathStats
    n_images: int
    n_instances: int
    mean_vertices: float
    image_size: int
    transform: str
    threshold: float
    repeats: int

    def to_dict(self) -> dict:
        def stats(s: PathStats) -> dict:
            return {
                "wall_time_s": s.wall_time_s,
                "wall_times_s": s.wall_times_s,
                "annotation_bytes": s.annotation_bytes,
                "peak_transient_bytes": s.peak_transient_bytes,
                "kept_instances": s.kept_instances,
            }

        return {
            "dataset": {
                "n_images": self.n_images,
                "n_instances": self.n_instances,
                "mean_vertices": self.mean_vertices,
                "image_size": self.image_size,
            },
            "transform": self.transform,
            "threshold": self.threshold,
            "repeats": self.repeats,
            "polygon": stats(self.polygon),
            "mask": stats(self.mask),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def format_table(self) -> str:
        header = f"{'path':<8} {'wall_time_s':>12} {'annotation_bytes':>17} {'peak_bytes':>12} {'kept':>6}"
        rows = []
        for name, s in (("polygon", self.polygon), ("mask", self.mask)):
            rows.append(f"{name:<8} {s.wall_time_s:>12.4f} "
                        f"{s.annotation_bytes:>17d} {s.peak_transient_bytes:>12d} "
                        f"{s.kept_instances:>6d}")
        footer = (
            f"dataset: {self.n_images} images, {self.n_instances} instances, "
            f"{self.mean_vertices:.1f} mean vertices, "
            f"{self.image_size}x{self.image_size}\n"
            f"transform: {self.transform}  threshold: {self.threshold}  "
            f"(wall_time_s is the median of {self.repeats} runs)"
        )
        return "\n".join([header, *rows, footer])


def _timed(fn: Callable[[], int], repeats: int) -> tuple[list[float], int]:
    """Run fn `repeats` times; return per-run wall times and its result."""
    times = []
    result = 0
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return times, result


def _peak_bytes(fn: Callable[[], int]) -> int:
    tracemalloc.start()
    try:
        fn()
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()
    return peak


def run_bench(dataset: SyntheticDataset, transform: Sequence[TransformSpec],
              threshold: float = 0.0, repeats: int = 3) -> BenchReport:
    """Run the polygon pipeline, then the mask oracle, over every pair.

    Image decode is excluded by construction (the dataset is in memory);
    both paths share one pre-built augmentation.
    """
    if len(dataset) == 0:
        raise ValueError("dataset is empty")
    size = dataset.spec.image_size
    aug = build_augmentation(transform, size, size, random.Random(dataset.spec.seed))

    def polygon_path() -> int:
        kept = 0
        for image, lf in zip(dataset.images, dataset.labels):
            _, outcome = augment_pair(image, lf, aug, threshold)
            kept += len(outcome.kept)
        return kept

    def mask_path() -> int:
        kept = 0
        for image, lf in zip(dataset.images, dataset.labels):
            outcome = oracle_augment(image, lf, aug, threshold)
            kept += len(outcome.kept_masks)
        return kept

    poly_times, poly_kept = _timed(polygon_path, repeats)
    mask_times, mask_kept = _timed(mask_path, repeats)

    poly_stats = PathStats(
        wall_time_s=statistics.median(poly_times),
        wall_times_s=poly_times,
        annotation_bytes=sum(annotation_bytes(lf) for lf in dataset.labels),
        peak_transient_bytes=_peak_bytes(polygon_path),
        kept_instances=poly_kept,
    )
    mask_stats = PathStats(
        wall_time_s=statistics.median(mask_times),
        wall_times_s=mask_times,
        # One full-frame mask per input instance, 1 byte per pixel.
        annotation_bytes=dataset.n_instances * size * size,
        peak_transient_bytes=_peak_bytes(mask_path),
        kept_instances=mask_kept,
    )
    return BenchReport(
        polygon=poly_stats,
        mask=mask_stats,
        n_images=dataset.spec.n_images,
        n_instances=dataset.n_instances,
        mean_vertices=dataset.mean_vertices,
        image_size=size,
        transform=" ".join(t.describe() for t in transform) or "identity",
        threshold=threshold,
        repeats=repeats,
    )
