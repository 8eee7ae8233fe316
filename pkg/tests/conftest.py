"""Shared test helpers: random geometry, point-in-polygon oracle, CLI runner."""

import numpy as np
import pytest

from polyaug import LabelFile, PolygonAnnotation


def random_convex_polygon(rng, n_vertices, center, rx, ry):
    """Convex polygon from sorted angles on an ellipse (test-side generator,
    independent of the package's synthetic dataset code)."""
    angles = np.sort(rng.uniform(0.0, 2.0 * np.pi, n_vertices))
    cx, cy = center
    return np.stack([cx + rx * np.cos(angles), cy + ry * np.sin(angles)], axis=1)


def points_in_polygon(points, polygon):
    """Even-odd ray-cast membership test, vectorized over points.

    Independent oracle: shares no code with the package's shoelace area,
    clipping or rasterization paths.
    """
    x = points[:, 0]
    y = points[:, 1]
    inside = np.zeros(len(points), dtype=bool)
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        spans = (y1 <= y) != (y2 <= y)
        if not spans.any():
            continue
        x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= spans & (x < x_cross)
    return inside


def monte_carlo_area(polygon, n_samples, seed):
    """Area estimate by uniform sampling over the bounding box."""
    rng = np.random.default_rng(seed)
    polygon = np.asarray(polygon, dtype=np.float64)
    lo = polygon.min(axis=0)
    hi = polygon.max(axis=0)
    pts = rng.uniform(lo, hi, size=(n_samples, 2))
    frac = points_in_polygon(pts, polygon).mean()
    return frac * (hi[0] - lo[0]) * (hi[1] - lo[1])


def random_label_file(rng, n_instances, max_vertices=12):
    """Random strictly-valid normalized label file."""
    annotations = []
    for _ in range(n_instances):
        n = int(rng.integers(3, max_vertices + 1))
        poly = random_convex_polygon(
            rng, n,
            center=rng.uniform(0.3, 0.7, size=2),
            rx=rng.uniform(0.05, 0.25),
            ry=rng.uniform(0.05, 0.25),
        )
        annotations.append(PolygonAnnotation(int(rng.integers(0, 5)), np.clip(poly, 0.0, 1.0)))
    return LabelFile(annotations)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
