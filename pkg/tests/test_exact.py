import numpy as np
import pytest

from csflab import exact
from csflab.errors import OutOfDomain
from csflab.geometry import compute_frame


class TestCircle:
    def test_radius_law(self):
        for t in (-0.5, -2.0):
            c = exact.sample(exact.circle(), t, 128)
            radii = np.linalg.norm(c.points, axis=1)
            np.testing.assert_allclose(radii, np.sqrt(-2.0 * t), rtol=1e-12)

    def test_out_of_domain(self):
        with pytest.raises(OutOfDomain):
            exact.sample(exact.circle(), 0.0, 64)

    def test_flow_residual(self):
        res = exact.flow_residual(exact.circle(), -0.5, 1e-5, 128)
        assert res < 1e-4


class TestLine:
    def test_static_and_straight(self):
        fam = exact.line(angle=0.3, offset=1.0)
        c = exact.sample(fam, -1.0, 64)
        fr = compute_frame(c)
        assert np.abs(fr.kappa).max() < 1e-10
        c2 = exact.sample(fam, 5.0, 64)
        np.testing.assert_allclose(c.points, c2.points)


class TestGrimReaper:
    def test_profile(self):
        c = exact.sample(exact.grim_reaper(), 0.0, 101)
        x, y = c.points[:, 0], c.points[:, 1]
        np.testing.assert_allclose(y, -np.log(np.cos(x)), atol=1e-12)

    def test_unit_upward_translation(self):
        c0 = exact.sample(exact.grim_reaper(), 0.0, 64)
        c1 = exact.sample(exact.grim_reaper(), 0.7, 64)
        np.testing.assert_allclose(c1.points - c0.points,
                                   [[0.0, 0.7]] * 64, atol=1e-12)

    def test_curvature_is_cos_x(self):
        c = exact.sample(exact.grim_reaper(window=1.0), 0.0, 512)
        fr = compute_frame(c)
        np.testing.assert_allclose(fr.kappa, np.cos(c.points[:, 0]),
                                   atol=1e-5)

    def test_flow_residual(self):
        res = exact.flow_residual(exact.grim_reaper(), 0.0, 1e-5, 256)
        assert res < 1e-3


class TestPaperClip:
    def test_extent_at_t_minus5(self):
        c = exact.sample(exact.paper_clip(), -5.0, 1024)
        # closed-form inversion of the implicit locus
        assert abs(np.abs(c.points[:, 0]).max() - 1.5641) < 2e-4
        assert abs(np.abs(c.points[:, 1]).max() - 5.6931) < 2e-4

    def test_on_locus(self):
        t = -3.0
        c = exact.sample(exact.paper_clip(), t, 512)
        x, y = c.points[:, 0], c.points[:, 1]
        np.testing.assert_allclose(np.cos(x), np.exp(t) * np.cosh(y),
                                   atol=1e-12)

    def test_convex(self):
        for t in (-2.0, -5.0, -10.0):
            c = exact.sample(exact.paper_clip(), t, 512)
            fr = compute_frame(c)
            assert fr.kappa.min() > 0.0

    def test_curvature_closed_form(self):
        # differentiating the implicit locus twice gives
        # kappa = cos(x) / sqrt(1 - e^{2t})
        t = -4.0
        c = exact.sample(exact.paper_clip(), t, 1024)
        fr = compute_frame(c)
        ref = np.cos(c.points[:, 0]) / np.sqrt(1.0 - np.exp(2.0 * t))
        np.testing.assert_allclose(fr.kappa, ref, atol=2e-4)

    def test_approaches_two_translators(self):
        t = -10.0
        c = exact.sample(exact.paper_clip(), t, 4096)
        upper = c.points[c.points[:, 1] > 0]
        sel = np.abs(upper[:, 0]) <= 1.0
        x, y = upper[sel, 0], upper[sel, 1]
        assert np.abs(y - (-t + np.log(2.0 * np.cos(x)))).max() < 1e-3

    def test_out_of_domain(self):
        with pytest.raises(OutOfDomain):
            exact.sample(exact.paper_clip(), 0.0, 64)

    def test_flow_residual(self):
        res = exact.flow_residual(exact.paper_clip(), -3.0, 1e-4, 512)
        assert res < 1e-2

    def test_very_negative_time_stable(self):
        t = float(-np.exp(8.0))
        c = exact.sample(exact.paper_clip(), t, 512)
        assert np.all(np.isfinite(c.points))
        assert abs(np.abs(c.points[:, 1]).max() -
                   (-t + np.log(2.0))) < 1e-2
