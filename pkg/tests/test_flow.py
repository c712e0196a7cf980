import numpy as np
import pytest

from csflab import critical, exact, flow
from csflab.errors import OutOfDomain, OutOfWindow
from csflab.geometry import DiscreteCurve, hausdorff_distance


class TestStepping:
    def test_circle_radius_law_short_run(self):
        start = flow.FlowState(exact.sample(exact.circle(), -0.5, 256), -0.5)
        traj = flow.evolve(start, 0.2,
                           flow.EvolveControls(dt_max=5e-4, frame_stride=50))
        for st in traj.frames:
            r_exact = np.sqrt(-2.0 * st.time)
            radii = np.linalg.norm(st.curve.points, axis=1)
            assert np.abs(radii / r_exact - 1.0).max() < 1e-3

    def test_rescaled_sqrt2_circle_is_stationary(self):
        c = DiscreteCurve(np.sqrt(2.0) * exact.sample(
            exact.circle(), -0.5, 256).points, True, 0.0)
        st = flow.FlowState(c, 0.0, "rescaled")
        traj = flow.evolve(st, 0.5, flow.EvolveControls(dt_max=1e-3))
        radii = np.linalg.norm(traj.frames[-1].curve.points, axis=1)
        np.testing.assert_allclose(radii, np.sqrt(2.0), atol=1e-6)

    def test_step_dt_validation(self):
        st = flow.FlowState(exact.sample(exact.circle(), -0.5, 64), -0.5)
        with pytest.raises(ValueError):
            flow.step(st, -1.0)
        with pytest.raises(ValueError):
            flow.evolve(st, 0.0)

    def test_near_singular_stop(self):
        st = flow.FlowState(exact.sample(exact.circle(), -0.01, 128), -0.01)
        traj = flow.evolve(st, 1.0, flow.EvolveControls(dt_max=1e-4,
                                                        kappa_cap=50.0))
        assert traj.stop_reason == "near_singular"
        assert traj.times[-1] < 0.0


class TestRescaling:
    def test_rescale_frame_clock(self):
        t = float(-np.exp(3.0))
        c = exact.sample(exact.paper_clip(), t, 256)
        st = flow.rescale_frame(flow.FlowState(c, t))
        assert abs(st.time - (-3.0)) < 1e-12
        np.testing.assert_allclose(st.curve.points,
                                   c.points * (-t) ** -0.5)

    def test_rescale_requires_negative_time(self):
        c = exact.sample(exact.grim_reaper(), 1.0, 64)
        with pytest.raises(OutOfDomain):
            flow.rescale_frame(flow.FlowState(c, 1.0))


class TestTrajectory:
    def test_save_load_round_trip(self, clip_rescaled_traj, tmp_path):
        p = tmp_path / "t.jsonl"
        clip_rescaled_traj.save(p)
        t2 = flow.FlowTrajectory.load(p)
        assert len(t2.frames) == len(clip_rescaled_traj.frames)
        assert t2.mode == "rescaled"
        np.testing.assert_allclose(t2.frames[-1].curve.points,
                                   clip_rescaled_traj.frames[-1].curve.points)

    def test_frame_at_interpolates(self, circle_traj):
        c = circle_traj.frame_at(-0.5)
        radii = np.linalg.norm(c.points, axis=1)
        np.testing.assert_allclose(radii, 1.0, atol=1e-3)

    def test_frame_at_out_of_window(self, circle_traj):
        with pytest.raises(OutOfWindow):
            circle_traj.frame_at(-2.0)

    def test_exact_trajectory_matches_family(self):
        traj = flow.exact_trajectory(exact.circle(), [-1.0, -0.5], 128)
        ref = exact.sample(exact.circle(), -0.5, 128)
        assert hausdorff_distance(traj.frames[-1].curve, ref) < 1e-12


class TestAlignment:
    def test_axis_aligned_reads_zero(self, clip_rescaled_traj):
        ks = critical.track_paths(clip_rescaled_traj, "knuckle")
        path = ks.alive_on_all(len(clip_rescaled_traj.frames))[0]
        al = flow.align_rotation(clip_rescaled_traj, path)
        assert max(abs(a.angle) for a in al) < 1e-3

    def test_rigid_pre_rotation_recovered(self, clip_rescaled_traj):
        th = 0.3
        R = np.array([[np.cos(th), -np.sin(th)],
                      [np.sin(th), np.cos(th)]])
        frames = [flow.FlowState(
            DiscreteCurve(st.curve.points @ R.T, True, st.time),
            st.time, "rescaled") for st in clip_rescaled_traj.frames]
        traj = flow.FlowTrajectory(frames, [], {})
        ks = critical.track_paths(traj, "knuckle")
        al = flow.align_rotation(traj, ks.alive_on_all(len(frames))[0])
        assert all(abs(a.angle - th) < 1e-3 for a in al)
