import math

import numpy as np
import pytest

from polyaug import AffineMap, Rect, apply_affine, clip_to_rect, polygon_area, polygon_bbox
from polyaug.geometry import as_polygon, signed_area

from conftest import monte_carlo_area, random_convex_polygon


class TestPolygonArea:
    def test_axis_aligned_square(self):
        assert polygon_area([(0, 0), (0.5, 0), (0.5, 0.5), (0, 0.5)]) == pytest.approx(0.25)

    def test_collinear_degenerate(self):
        assert polygon_area([(0, 0), (1, 1), (2, 2)]) == 0.0

    def test_orientation_invariance(self, rng):
        for _ in range(20):
            poly = random_convex_polygon(rng, int(rng.integers(3, 12)),
                                         rng.uniform(-5, 5, 2), 2.0, 3.0)
            assert polygon_area(poly[::-1]) == pytest.approx(polygon_area(poly), rel=1e-12)

    def test_random_decagon_vs_monte_carlo(self):
        rng = np.random.default_rng(42)
        decagon = random_convex_polygon(rng, 10, (3.0, -1.0), 2.5, 1.5)
        estimate = monte_carlo_area(decagon, n_samples=1_000_000, seed=7)
        assert polygon_area(decagon) == pytest.approx(estimate, rel=1e-2)

    def test_100_random_convex_vs_monte_carlo(self):
        rng = np.random.default_rng(99)
        for i in range(100):
            poly = random_convex_polygon(rng, int(rng.integers(4, 16)),
                                         rng.uniform(-10, 10, 2),
                                         rng.uniform(1, 4), rng.uniform(1, 4))
            area = polygon_area(poly)
            estimate = monte_carlo_area(poly, n_samples=50_000, seed=1000 + i)
            assert abs(area - estimate) / area < 2e-2

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            polygon_area([(0, 0), (1, 1)])
        with pytest.raises(ValueError):
            polygon_area([(0, 0), (1, np.nan), (2, 0)])


class TestAffine:
    def test_vertical_flip_point(self):
        flip = AffineMap(1, 0, 0, -1, 0, 100)
        out = apply_affine(flip, [(10, 30), (0, 0), (50, 50)])
        np.testing.assert_allclose(out, [(10, 70), (0, 100), (50, 50)])

    def test_rotate_90_about_center(self):
        theta = math.pi / 2
        rot = AffineMap(math.cos(theta), -math.sin(theta),
                        math.sin(theta), math.cos(theta),
                        tx=50 - math.cos(theta) * 50 + math.sin(theta) * 50,
                        ty=50 - math.sin(theta) * 50 - math.cos(theta) * 50)
        x, y = rot.apply(75, 50)
        assert (x, y) == pytest.approx((50, 75), abs=1e-9)

    def test_shear_preserves_area(self):
        shear = AffineMap(1, 0.5, 0, 1)
        square = [(0, 0), (1, 0), (1, 1), (0, 1)]
        assert polygon_area(apply_affine(shear, square)) == pytest.approx(1.0)
        assert shear.det == pytest.approx(1.0)

    def test_area_law(self, rng):
        for _ in range(50):
            m = AffineMap(*rng.uniform(-2, 2, 6))
            if abs(m.det) < 1e-3:
                continue
            poly = random_convex_polygon(rng, int(rng.integers(3, 10)),
                                         rng.uniform(-3, 3, 2), 1.5, 2.5)
            got = polygon_area(apply_affine(m, poly))
            expected = abs(m.det) * polygon_area(poly)
            assert got == pytest.approx(expected, rel=1e-9)

    def test_vertex_count_and_order_preserved(self, rng):
        poly = random_convex_polygon(rng, 7, (0, 0), 1, 1)
        m = AffineMap(2, 0, 0, 3, 1, -1)
        out = apply_affine(m, poly)
        assert out.shape == poly.shape
        np.testing.assert_allclose(out[:, 0], 2 * poly[:, 0] + 1)
        np.testing.assert_allclose(out[:, 1], 3 * poly[:, 1] - 1)

    def test_inverse_round_trip(self, rng):
        m = AffineMap(0.3, -1.2, 0.8, 0.5, 4.0, -2.0)
        pts = rng.uniform(-10, 10, (100, 2))
        back = m.inverted().transform(m.transform(pts))
        np.testing.assert_allclose(back, pts, atol=1e-9)

    def test_compose_matches_sequential(self, rng):
        f = AffineMap(0.5, 0.1, -0.2, 1.5, 3.0, 1.0)
        g = AffineMap(-1.0, 0.0, 0.4, 0.9, -5.0, 2.0)
        pts = rng.uniform(-10, 10, (50, 2))
        np.testing.assert_allclose(
            g.compose(f).transform(pts), g.transform(f.transform(pts)), atol=1e-9)


class TestClip:
    def test_symmetric_overlap(self):
        square = [(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)]
        clipped = clip_to_rect(square, Rect(0, 0, 1, 1))
        assert clipped is not None
        assert polygon_area(clipped) == pytest.approx(0.25)

    def test_fully_inside_is_identity(self):
        tri = [(0.2, 0.2), (0.8, 0.3), (0.5, 0.9)]
        clipped = clip_to_rect(tri, Rect(0, 0, 1, 1))
        np.testing.assert_allclose(clipped, tri)

    def test_fully_outside_is_absent(self):
        tri = [(2, 2), (3, 2), (2.5, 3)]
        assert clip_to_rect(tri, Rect(0, 0, 1, 1)) is None

    def test_idempotence(self, rng):
        r = Rect(0, 0, 10, 8)
        for _ in range(50):
            poly = random_convex_polygon(rng, int(rng.integers(3, 12)),
                                         rng.uniform(-2, 12, 2), 4.0, 3.0)
            once = clip_to_rect(poly, r)
            if once is None:
                continue
            twice = clip_to_rect(once, r)
            assert twice is not None
            np.testing.assert_allclose(twice, once, atol=1e-9)

    def test_area_bound(self, rng):
        r = Rect(0, 0, 10, 8)
        for _ in range(50):
            poly = random_convex_polygon(rng, int(rng.integers(3, 12)),
                                         rng.uniform(-2, 12, 2), 5.0, 4.0)
            clipped = clip_to_rect(poly, r)
            if clipped is None:
                continue
            bound = min(polygon_area(poly), r.width * r.height)
            assert polygon_area(clipped) <= bound + 1e-9

    def test_clip_result_within_rect(self, rng):
        r = Rect(0, 0, 7, 5)
        for _ in range(50):
            poly = random_convex_polygon(rng, 8, rng.uniform(-3, 10, 2), 4.0, 4.0)
            clipped = clip_to_rect(poly, r)
            if clipped is None:
                continue
            assert clipped[:, 0].min() >= r.x0 - 1e-9
            assert clipped[:, 0].max() <= r.x1 + 1e-9
            assert clipped[:, 1].min() >= r.y0 - 1e-9
            assert clipped[:, 1].max() <= r.y1 + 1e-9


class TestBbox:
    def test_triangle(self):
        assert polygon_bbox([(0, 0), (2, 0), (1, 1)]) == Rect(0, 0, 2, 1)

    def test_degenerate_extent_rejected(self):
        # Repeated-vertex strip has zero width; the Rect invariant refuses it.
        with pytest.raises(ValueError):
            polygon_bbox([(1, 0), (1, 2), (1, 5)])

    def test_random_polygons_direct_scan(self, rng):
        for _ in range(30):
            poly = rng.uniform(-100, 100, (int(rng.integers(3, 20)), 2))
            box = polygon_bbox(poly)
            xs = sorted(p[0] for p in poly)
            ys = sorted(p[1] for p in poly)
            assert (box.x0, box.y0, box.x1, box.y1) == (xs[0], ys[0], xs[-1], ys[-1])


def test_signed_area_sign_convention():
    ccw = [(0, 0), (1, 0), (1, 1), (0, 1)]
    assert signed_area(as_polygon(ccw)) == pytest.approx(1.0)
    assert signed_area(as_polygon(ccw[::-1])) == pytest.approx(-1.0)
