import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csflab.geometry import (DiscreteCurve, compute_frame, hausdorff_distance,
                             resample, self_intersects, signed_area,
                             spline_length, turning_angle)


def circle_points(n=128, r=1.0, ccw=True):
    th = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    if not ccw:
        th = th[::-1]
    return r * np.column_stack([np.cos(th), np.sin(th)])


class TestDiscreteCurve:
    def test_minimum_point_count(self):
        with pytest.raises(ValueError):
            DiscreteCurve(circle_points(6), closed=True)

    def test_orientation_normalized_to_ccw(self):
        cw = DiscreteCurve(circle_points(ccw=False), closed=True)
        assert signed_area(cw.points) > 0.0

    def test_points_are_write_protected(self):
        c = DiscreteCurve(circle_points(), closed=True)
        with pytest.raises(ValueError):
            c.points[0, 0] = 99.0

    def test_json_round_trip(self):
        c = DiscreteCurve(circle_points(), closed=True, time=-0.25)
        c2 = DiscreteCurve.from_json(json.loads(json.dumps(c.to_json())))
        assert c2.closed and c2.time == -0.25
        np.testing.assert_allclose(c2.points, c.points)

    def test_repeated_points_rejected(self):
        pts = circle_points()
        pts[3] = pts[2]
        with pytest.raises(ValueError):
            DiscreteCurve(pts, closed=True)


class TestFrame:
    def test_circle_curvature_exact(self):
        # the three-point (Menger) estimate is exact on a circle
        for r in (0.5, 1.0, 3.0):
            c = DiscreteCurve(circle_points(r=r), closed=True)
            fr = compute_frame(c)
            np.testing.assert_allclose(fr.kappa, 1.0 / r, rtol=1e-12)

    def test_normals_point_inward_on_ccw_circle(self):
        c = DiscreteCurve(circle_points(), closed=True)
        fr = compute_frame(c)
        # inward normal of the unit circle at p is -p
        np.testing.assert_allclose(fr.normals, -c.points, atol=1e-3)

    def test_kappa_s_vanishes_on_circle(self):
        fr = compute_frame(DiscreteCurve(circle_points(), closed=True))
        assert np.abs(fr.kappa_s).max() < 1e-10

    def test_frame_is_orthonormal(self):
        c = DiscreteCurve(circle_points(97), closed=True)
        fr = compute_frame(c)
        np.testing.assert_allclose(
            np.linalg.norm(fr.tangents, axis=1), 1.0, atol=1e-12)
        dots = np.einsum("ij,ij->i", fr.tangents, fr.normals)
        np.testing.assert_allclose(dots, 0.0, atol=1e-12)

    @given(st.floats(-np.pi, np.pi))
    @settings(max_examples=25, deadline=None)
    def test_curvature_rotation_invariant(self, angle):
        base = circle_points(64) * [1.0, 0.6]        # ellipse
        R = np.array([[np.cos(angle), -np.sin(angle)],
                      [np.sin(angle), np.cos(angle)]])
        k0 = compute_frame(DiscreteCurve(base, True)).kappa
        k1 = compute_frame(DiscreteCurve(base @ R.T, True)).kappa
        np.testing.assert_allclose(np.sort(k0), np.sort(k1), atol=1e-9)


class TestResample:
    def test_uniform_spacing(self):
        c = DiscreteCurve(circle_points(100) * [1.0, 0.5], closed=True)
        r = resample(c, 64)
        e = r.edge_lengths()
        # equal arc increments leave a curvature-dependent chord-length
        # variation of order (kappa * h)^2 / 24; anything beyond that
        # indicates a spacing bug
        assert e.std() / e.mean() < 5e-3

    def test_idempotent(self):
        c = DiscreteCurve(circle_points(100) * [1.0, 0.5], closed=True)
        r1 = resample(c, 64)
        r2 = resample(r1, 64)
        assert hausdorff_distance(r1, r2) < 1e-9

    def test_open_endpoints_pinned(self):
        x = np.linspace(0.0, 1.0, 40)
        c = DiscreteCurve(np.column_stack([x, x ** 2]), closed=False)
        r = resample(c, 25)
        np.testing.assert_allclose(r.points[0], c.points[0], atol=1e-14)
        np.testing.assert_allclose(r.points[-1], c.points[-1], atol=1e-14)

    def test_length_preserved(self):
        c = DiscreteCurve(circle_points(200), closed=True)
        r = resample(c, 128)
        assert abs(spline_length(r) - spline_length(c)) < 1e-5


class TestMeasures:
    def test_full_loop_turning_angle(self):
        c = DiscreteCurve(circle_points(), closed=True)
        assert abs(turning_angle(c, 0, 0) - 2.0 * np.pi) < 1e-12

    def test_half_loop_turning_angle(self):
        c = DiscreteCurve(circle_points(128), closed=True)
        assert abs(turning_angle(c, 0, 64) - np.pi) < 0.05

    def test_signed_area_circle(self):
        a = signed_area(circle_points(512, r=2.0))
        assert abs(a - np.pi * 4.0) < 1e-3

    def test_self_intersection_detected(self):
        a = np.column_stack([np.linspace(-1, 1, 32), np.zeros(32)])
        b = np.column_stack([np.zeros(32), np.linspace(-1, 1, 32)])
        assert self_intersects(DiscreteCurve(np.vstack([a, b]), False))
        assert not self_intersects(DiscreteCurve(circle_points(), True))

    def test_hausdorff_between_circles(self):
        c1 = DiscreteCurve(circle_points(512, r=1.0), True)
        c2 = DiscreteCurve(circle_points(512, r=1.1), True)
        assert abs(hausdorff_distance(c1, c2) - 0.1) < 1e-3
