import numpy as np
import pytest

from csflab import critical, exact, flow
from csflab.errors import (BoundaryViolated, DegenerateProfile,
                           DegenerateVertexSet, ZeroCurvature)
from csflab.geometry import DiscreteCurve


class TestZeroCounting:
    def test_simple_crossings(self):
        x = np.linspace(0.0, 2.0 * np.pi, 256, endpoint=False)
        c, multiple = critical.count_zeros(np.sin(3.0 * x), "periodic")
        assert c == 6 and not multiple

    def test_plateau_counts_once(self):
        v = np.concatenate([np.ones(10), np.zeros(5), -np.ones(10)])
        evts = critical.find_crossings(v, periodic=False, tol=1e-12)
        assert len(evts) == 1
        assert evts[0].direction == -1 and evts[0].multiple

    def test_same_sign_touch_flagged(self):
        v = np.concatenate([np.ones(10), np.zeros(5), np.ones(10)])
        evts = critical.find_crossings(v, periodic=False, tol=1e-12)
        assert len(evts) == 1 and evts[0].direction == 0

    def test_identically_zero_degenerate(self):
        with pytest.raises(DegenerateProfile):
            critical.find_crossings(np.zeros(32), periodic=True)

    def test_nonvanishing_boundary_enforced(self):
        v = np.concatenate([[0.0], np.ones(10)])
        with pytest.raises(BoundaryViolated):
            critical.count_zeros(v, "nonvanishing")

    def test_heat_profile_four_to_two(self):
        x = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
        counts = []
        for t in (0.0, 0.5):
            u = np.exp(-t) * np.sin(x) + np.exp(-4 * t) * np.sin(2 * x)
            counts.append(critical.count_zeros(u, "periodic")[0])
        assert counts == [4, 2]


class TestDistanceCritical:
    def test_clip_counts(self, clip_curve):
        rep = critical.detect_critical(
            critical.distance_profile(clip_curve, (0.0, 0.0)))
        assert len(rep.knuckles) == 2
        assert len(rep.tips) == 2
        assert len(rep.fingers) == 2

    def test_centered_circle_degenerate(self, circle_curve):
        with pytest.raises(DegenerateProfile):
            critical.detect_critical(
                critical.distance_profile(circle_curve, (0.0, 0.0)))

    def test_offcenter_circle_one_tip_one_knuckle(self, circle_curve):
        rep = critical.detect_critical(
            critical.distance_profile(circle_curve, (0.3, 0.0)))
        assert len(rep.tips) == 1 and len(rep.knuckles) == 1

    def test_finger_area_half_disc(self, circle_curve):
        rep = critical.detect_critical(
            critical.distance_profile(circle_curve, (0.0, -5.0)))
        # chord through the two knuckle-side points spans the circle; for
        # a far-away center, knuckle and tip are antipodal, so no finger
        # with exactly one tip between adjacent knuckles may exist
        assert len(rep.tips) == 1

    def test_rescaled_finger_area_near_pi(self, clip_rescaled_traj):
        st = clip_rescaled_traj.frames[0]
        rep = critical.detect_critical(
            critical.distance_profile(st.curve, (0.0, 0.0)))
        a = critical.finger_region_area(st.curve, rep.fingers[0])
        assert abs(a - np.pi) < 0.15


class TestVertices:
    def test_clip_vertex_counts(self, clip_curve):
        rep = critical.detect_vertices(clip_curve)
        assert len(rep.sharp) == 2
        assert len(rep.flat) == 2
        assert len(rep.inflections) == 0
        assert rep.bumpy

    def test_circle_degenerate(self, circle_curve):
        with pytest.raises(DegenerateVertexSet):
            critical.detect_vertices(circle_curve)

    def test_ellipse_four_vertices(self):
        th = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
        c = DiscreteCurve(np.column_stack([2 * np.cos(th), np.sin(th)]),
                          True)
        rep = critical.detect_vertices(c)
        assert len(rep.sharp) == 2 and len(rep.flat) == 2

    def test_edges_partition_closed_curve(self, clip_curve):
        rep = critical.detect_vertices(clip_curve)
        assert len(rep.edges) == len(rep.sharp)


class TestClassifyCenter:
    def test_osculating_trichotomy(self):
        th = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
        c = DiscreteCurve(np.column_stack([2 * np.cos(th), np.sin(th)]),
                          True)
        v = critical.detect_vertices(c).sharp[0]
        assert critical.classify_center(c, v, 2.0) == "local_max"
        assert critical.classify_center(c, v, 0.5) == "local_min"
        assert critical.classify_center(c, v, 1.0,
                                        tol=1e-2) == "osculating_degenerate"

    def test_zero_curvature_guard(self):
        s = np.linspace(-1.0, 1.0, 64)
        line = DiscreteCurve(np.column_stack([s, np.zeros_like(s)]), False)
        with pytest.raises(ZeroCurvature):
            critical.classify_center(line, 32, 1.0)


class TestTracking:
    def test_tip_paths_alive_on_all_frames(self, clip_rescaled_traj):
        ps = critical.track_paths(clip_rescaled_traj, "tip")
        full = ps.alive_on_all(len(clip_rescaled_traj.frames))
        assert len(full) == 2

    def test_knuckle_monotonicity(self, clip_rescaled_traj):
        ps = critical.track_paths(clip_rescaled_traj, "knuckle")
        reports = critical.extremum_path_check(clip_rescaled_traj, ps)
        assert all(r.phi_monotone for r in reports)

    def test_zero_count_never_increases(self):
        th = np.linspace(0.0, 2.0 * np.pi, 256, endpoint=False)
        r = 1.0 + 0.1 * np.cos(3.0 * th)
        pts = np.column_stack([r * np.cos(th), r * np.sin(th)])
        st = flow.FlowState(DiscreteCurve(pts, True, 0.0), 0.0)
        traj = flow.evolve(st, 0.15,
                           flow.EvolveControls(dt_max=5e-4, frame_stride=40))
        zs = critical.zero_monotonicity_check(traj, "kappa_s")
        assert not zs.violations
        assert zs.counts[0] == 6
