"""Pure computational-geometry kernel: areas, affine maps, rect clipping, bboxes.

Polygons are float64 arrays of shape (N, 2) with N >= 3; the functions here
never care whether coordinates are pixels or normalized units, only that a
single polygon does not mix the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Tolerance used only to classify a vertex as lying on a clip edge.
CLIP_EDGE_EPS = 1e-12


def as_polygon(vertices) -> np.ndarray:
    """Validate and convert vertices to a float64 (N, 2) polygon array."""
    p = np.asarray(vertices, dtype=np.float64)
    if p.ndim != 2 or p.shape[1] != 2:
        raise ValueError(f"polygon must have shape (N, 2), got {p.shape}")
    if p.shape[0] < 3:
        raise ValueError(f"polygon needs at least 3 vertices, got {p.shape[0]}")
    if not np.all(np.isfinite(p)):
        raise ValueError("polygon contains non-finite coordinates")
    return p


def signed_area(p: np.ndarray) -> float:
    """Signed shoelace area (positive for counter-clockwise vertex order)."""
    x = p[:, 0]
    y = p[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polygon_area(p) -> float:
    """Absolute shoelace area of a polygon. Degenerate inputs give 0."""
    return abs(signed_area(as_polygon(p)))


@dataclass(frozen=True)
class AffineMap:
    """2x3 affine transform [[a, b, tx], [c, d, ty]] mapping (x, y) ->
    (a*x + b*y + tx, c*x + d*y + ty)."""

    a: float
    b: float
    c: float
    d: float
    tx: float = 0.0
    ty: float = 0.0

    @classmethod
    def identity(cls) -> "AffineMap":
        return cls(1.0, 0.0, 0.0, 1.0, 0.0, 0.0)

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def apply(self, x: float, y: float) -> tuple[float, float]:
        return (self.a * x + self.b * y + self.tx,
                self.c * x + self.d * y + self.ty)

    def transform(self, points: np.ndarray) -> np.ndarray:
        """Map an (N, 2) point array, preserving count and order."""
        pts = np.asarray(points, dtype=np.float64)
        out = np.empty_like(pts)
        out[:, 0] = self.a * pts[:, 0] + self.b * pts[:, 1] + self.tx
        out[:, 1] = self.c * pts[:, 0] + self.d * pts[:, 1] + self.ty
        return out

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """Map equal to applying ``inner`` first, then ``self``."""
        return AffineMap(
            a=self.a * inner.a + self.b * inner.c,
            b=self.a * inner.b + self.b * inner.d,
            c=self.c * inner.a + self.d * inner.c,
            d=self.c * inner.b + self.d * inner.d,
            tx=self.a * inner.tx + self.b * inner.ty + self.tx,
            ty=self.c * inner.tx + self.d * inner.ty + self.ty,
        )

    def inverted(self) -> "AffineMap":
        det = self.det
        if det == 0.0:
            raise ZeroDivisionError("affine map is singular")
        return AffineMap(
            a=self.d / det,
            b=-self.b / det,
            c=-self.c / det,
            d=self.a / det,
            tx=(self.b * self.ty - self.d * self.tx) / det,
            ty=(self.c * self.tx - self.a * self.ty) / det,
        )


def apply_affine(m: AffineMap, p) -> np.ndarray:
    """Map every vertex of a polygon independently."""
    return m.transform(as_polygon(p))


@dataclass(frozen=True)
class Rect:
    """Non-degenerate axis-aligned rectangle (x0, y0) .. (x1, y1)."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not (math.isfinite(self.x0) and math.isfinite(self.y0)
                and math.isfinite(self.x1) and math.isfinite(self.y1)):
            raise ValueError("rect coordinates must be finite")
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError(f"degenerate rect {self!r}")

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0


def polygon_bbox(p) -> Rect:
    """Tight axis-aligned bounds. Raises ValueError for degenerate extents."""
    p = as_polygon(p)
    return Rect(float(p[:, 0].min()), float(p[:, 1].min()),
                float(p[:, 0].max()), float(p[:, 1].max()))


def _clip_halfplane(points, coord, bound, keep_below):
    """One Sutherland-Hodgman pass against coord <= bound (or >= when
    keep_below is False). Intersection points are snapped exactly onto the
    clip line; vertices within CLIP_EDGE_EPS of it count as inside."""
    out = []
    n = len(points)
    if n == 0:
        return out

    def inside(pt):
        if keep_below:
            return pt[coord] <= bound + CLIP_EDGE_EPS
        return pt[coord] >= bound - CLIP_EDGE_EPS

    def intersect(s, e):
        t = (bound - s[coord]) / (e[coord] - s[coord])
        other = s[1 - coord] + t * (e[1 - coord] - s[1 - coord])
        return (bound, other) if coord == 0 else (other, bound)

    s = points[-1]
    s_in = inside(s)
    for e in points:
        e_in = inside(e)
        if e_in:
            if not s_in:
                out.append(intersect(s, e))
            out.append(e)
        elif s_in:
            out.append(intersect(s, e))
        s, s_in = e, e_in
    return out


def clip_to_rect(p, r: Rect) -> np.ndarray | None:
    """Sutherland-Hodgman clip of a polygon against a rectangle.

    Returns None when the clipped region is empty, has fewer than 3
    vertices, or has zero area. Zero-width bridges produced by clipping
    non-convex polygons are kept (they contribute no area).
    """
    pts = [(float(x), float(y)) for x, y in as_polygon(p)]
    for coord, bound, keep_below in ((0, r.x0, False), (0, r.x1, True),
                                     (1, r.y0, False), (1, r.y1, True)):
        pts = _clip_halfplane(pts, coord, bound, keep_below)
        if not pts:
            return None
    if len(pts) < 3:
        return None
    clipped = np.array(pts, dtype=np.float64)
    if abs(signed_area(clipped)) == 0.0:
        return None
    return clipped
