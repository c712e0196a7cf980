import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csflab import exact, flow, gaussian
from csflab.errors import HypothesisViolated, TruncationWarning
from csflab.geometry import DiscreteCurve

ENTROPY_CIRCLE = float(np.sqrt(2.0 * np.pi / np.e))


def long_line(n=1024, half=50.0, offset=0.0):
    s = np.linspace(-half, half, n)
    return DiscreteCurve(np.column_stack([s, np.full_like(s, offset)]),
                         closed=False)


class TestGaussianLength:
    def test_line_through_center_is_one(self):
        # closed form: a full line integrates the kernel to exactly 1
        for lam in (0.1, 1.0, 25.0):
            v = gaussian.gaussian_length(long_line(), (0.0, 0.0), lam)
            assert abs(v - 1.0) < 1e-9

    def test_circle_optimal_scale(self):
        c = exact.sample(exact.circle(), -0.5, 512)     # radius 1
        # F for a radius-R circle peaks at lam = R^2 / 2 with the
        # self-shrinker value
        v = gaussian.gaussian_length(c, (0.0, 0.0), 0.5)
        assert abs(v - ENTROPY_CIRCLE) < 1e-4

    def test_circle_large_scale_value(self):
        # radius-1 circle at lam = 100: closed form
        # 2*pi / sqrt(4*pi*100) * e^{-1/400}
        c = exact.sample(exact.circle(), -0.5, 2048)
        v = gaussian.gaussian_length(c, (0.0, 0.0), 100.0)
        ref = 2.0 * np.pi / np.sqrt(400.0 * np.pi) * np.exp(-1.0 / 400.0)
        assert abs(v - ref) < 1e-6

    @given(st.floats(-np.pi, np.pi))
    @settings(max_examples=20, deadline=None)
    def test_rotation_invariance(self, angle):
        pts = exact.sample(exact.paper_clip(), -2.0, 256).points
        R = np.array([[np.cos(angle), -np.sin(angle)],
                      [np.sin(angle), np.cos(angle)]])
        v0 = gaussian.gaussian_length(DiscreteCurve(pts, True), (0, 0), 0.7)
        v1 = gaussian.gaussian_length(DiscreteCurve(pts @ R.T, True),
                                      (0, 0), 0.7)
        assert abs(v0 - v1) < 1e-10

    def test_positive_scale_required(self):
        with pytest.raises(ValueError):
            gaussian.gaussian_length(long_line(64), (0, 0), 0.0)


class TestEntropy:
    def test_line(self):
        with pytest.warns(TruncationWarning):
            rep = gaussian.entropy(long_line())
        assert abs(rep.value - 1.0) < 1e-2

    def test_circle(self):
        rep = gaussian.entropy(exact.sample(exact.circle(), -0.5, 512))
        assert abs(rep.value - ENTROPY_CIRCLE) < 5e-3

    def test_entropy_dominates_pointwise_values(self):
        c = exact.sample(exact.paper_clip(), -2.0, 256)
        rep = gaussian.entropy(c)
        for lam in (0.3, 1.0, 3.0):
            for x0 in ((0.0, 0.0), (0.5, 0.2)):
                assert rep.value >= gaussian.gaussian_length(c, x0, lam) - 1e-9


class TestTheta:
    def test_line_is_one(self):
        traj = flow.exact_trajectory(exact.line(half_length=50.0),
                                     np.linspace(-2.0, 0.0, 5), 1024)
        for r in (0.5, 1.0):
            assert abs(gaussian.theta(traj, (0.0, 0.0, 0.0), r) - 1.0) < 1e-6

    def test_circle_extinction_center_constant(self, circle_traj):
        vals = [gaussian.theta(circle_traj, (0.0, 0.0, 0.0), r)
                for r in (0.3, 0.6, 0.9)]
        np.testing.assert_allclose(vals, ENTROPY_CIRCLE, atol=1e-3)

    def test_regular_point_limit(self, circle_traj):
        v = gaussian.theta(circle_traj, (1.0, 0.0, -0.5), 0.05)
        assert abs(v - 1.0) < 1e-2


@pytest.fixture(scope="module")
def line_traj():
    return flow.exact_trajectory(exact.line(half_length=50.0),
                                 np.linspace(-2.0, 0.0, 5), 1024)


class TestThetaLocalized:

    def test_line_within_sandwich(self, line_traj):
        v = gaussian.theta_localized(line_traj, (0.0, 0.0, 0.0), 10.0, 1.0)
        assert 0.95 <= v <= 1.05

    def test_two_parallel_lines_additive(self):
        s = np.linspace(-50.0, 50.0, 1024)
        up = np.column_stack([s, np.full_like(s, 5e-4)])
        down = np.column_stack([s[::-1], np.full_like(s, -5e-4)])
        c = DiscreteCurve(np.vstack([up, down]), closed=True)
        frames = [flow.FlowState(DiscreteCurve(c.points, True, t), t)
                  for t in (-2.0, 0.0)]
        traj = flow.FlowTrajectory(frames, [], {})
        v = gaussian.theta_localized(traj, (0.0, 0.0, 0.0), 10.0, 1.0)
        assert abs(v - 2.0) < 0.1

    def test_monotone_in_sigma(self, line_traj):
        vals = [gaussian.theta_localized(line_traj, (0.0, 0.0, 0.0), 10.0, s)
                for s in (0.4, 0.7, 1.0, 1.3)]
        assert np.min(np.diff(vals)) >= -1e-6


class TestMonotonicity:
    def test_rescaled_circle_constant(self):
        taus = np.linspace(-2.0, 0.0, 11)
        traj = flow.exact_trajectory(exact.circle(), taus, 512,
                                     rescaled=True)
        rep = gaussian.monotonicity_report(traj, tolerance=1e-5)
        assert rep.passed
        np.testing.assert_allclose(rep.values, ENTROPY_CIRCLE, atol=1e-4)

    def test_rescaled_ellipse_decreasing(self):
        th = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
        pts = np.column_stack([2.0 * np.cos(th), 1.0 * np.sin(th)])
        st = flow.FlowState(DiscreteCurve(pts, True, 0.0), 0.0, "rescaled")
        traj = flow.evolve(st, 0.5, flow.EvolveControls(dt_max=1e-3))
        rep = gaussian.monotonicity_report(traj, tolerance=1e-4)
        assert rep.passed
        assert rep.values[-1] < rep.values[0]


class TestLemmaSandwich:
    def test_diameter_line(self):
        r = 100.0
        s = np.linspace(-r, r, 2001)
        c = DiscreteCurve(np.column_stack([s, np.zeros_like(s)]), False)
        v, lo, hi = gaussian.lemma_a1_check(0.01, 0.0, r, c)
        assert lo <= v <= hi and abs(v - 1.0) < 1e-4

    def test_shifted_chord(self):
        r, d0 = 100.0, 0.05
        half = np.sqrt(r * r - d0 * d0)
        s = np.linspace(-half, half, 2001)
        c = DiscreteCurve(np.column_stack([s, np.full_like(s, d0)]), False)
        v, lo, hi = gaussian.lemma_a1_check(0.01, 0.0, r, c)
        assert lo <= v <= hi and v <= 1.0

    def test_parameter_gate(self):
        c = DiscreteCurve(np.column_stack([np.linspace(-100, 100, 201),
                                           np.zeros(201)]), False)
        with pytest.raises(HypothesisViolated):
            gaussian.lemma_a1_check(0.2, 0.0, 100.0, c)     # a too large
        with pytest.raises(HypothesisViolated):
            gaussian.lemma_a1_check(0.01, 0.0, 5.0, c)      # r too small

    def test_curvature_gate(self):
        r = 100.0
        th = np.linspace(-0.8, 0.8, 2001)
        rad = r / 0.7                       # kappa = 0.7 / r, above b / r
        pts = np.column_stack([rad * np.sin(th), rad * (1 - np.cos(th))])
        pts = pts * (r / np.linalg.norm(pts[-1]))
        with pytest.raises(HypothesisViolated):
            gaussian.lemma_a1_check(0.01, 0.001, r, DiscreteCurve(pts, False))
