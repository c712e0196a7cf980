"""Time integration of curve-shortening flow and its rescaled version.

Physical mode moves points with normal speed kappa; rescaled mode uses
kappa + <x, n>/2, whose equilibrium is the circle of radius sqrt(2).
Steps are explicit midpoint (RK2) with a CFL cap on dt, followed by a
uniform arc-length remesh; tangential motion is dropped entirely and the
remesh restores the spacing.

The rescaled clock is tau = -log(-t); a physical frame at t < 0 maps to a
rescaled frame at tau with points multiplied by (-t)^{-1/2}.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import OutOfDomain, OutOfWindow, PathBroken, StepRejected
from .geometry import DiscreteCurve, compute_frame, resample, self_intersects

MODES = ("physical", "rescaled")


@dataclass(frozen=True)
class FlowState:
    """One curve at one time, tagged with the evolution law in force."""

    curve: DiscreteCurve
    time: float
    mode: str = "physical"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


@dataclass
class EvolveControls:
    """Step-size, remesh, and logging knobs for evolve()."""

    dt_max: float = 1e-3
    n_points: int | None = None     # None = keep the input count
    cfl: float = 0.25               # dt <= cfl * h_min^2
    kappa_dt_cap: float = 0.5       # reject steps with kappa_max * dt above
    max_retries: int = 20
    kappa_cap: float = 1e6          # stop with reason near_singular above
    frame_stride: int = 10          # record every k-th accepted step
    resample_oversample: int = 4
    resample_iters: int = 1


@dataclass
class FlowTrajectory:
    """Time-ordered frames plus the per-step log that produced them."""

    frames: list[FlowState]
    step_log: list[dict] = field(default_factory=list)
    controls: dict = field(default_factory=dict)
    stop_reason: str = "horizon"

    @property
    def mode(self) -> str:
        return self.frames[0].mode

    @property
    def times(self) -> np.ndarray:
        return np.array([f.time for f in self.frames])

    def frame_at(self, time: float) -> DiscreteCurve:
        """Curve at an arbitrary time, linearly interpolated between the
        two adjacent stored frames (same point count required)."""
        ts = self.times
        if time < ts[0] - 1e-12 or time > ts[-1] + 1e-12:
            raise OutOfWindow(f"time {time} outside [{ts[0]}, {ts[-1]}]")
        k = int(np.searchsorted(ts, time))
        if k == 0:
            return self.frames[0].curve
        a, b = self.frames[k - 1], self.frames[k]
        if b.time == a.time:
            return b.curve
        w = (time - a.time) / (b.time - a.time)
        pts = (1.0 - w) * a.curve.points + w * b.curve.points
        return DiscreteCurve(pts, a.curve.closed, time)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            header = {"record": "header", "mode": self.mode,
                      "controls": self.controls,
                      "stop_reason": self.stop_reason,
                      "step_log": self.step_log}
            fh.write(json.dumps(header) + "\n")
            for f in self.frames:
                rec = {"record": "frame", "time": float(f.time)}
                rec.update(f.curve.to_json())
                fh.write(json.dumps(rec) + "\n")

    @staticmethod
    def load(path) -> "FlowTrajectory":
        frames, header = [], {}
        with open(path) as fh:
            for line in fh:
                rec = json.loads(line)
                if rec.get("record") == "header":
                    header = rec
                else:
                    curve = DiscreteCurve(np.array(rec["points"]),
                                          bool(rec["closed"]), rec["time"])
                    frames.append(FlowState(curve, rec["time"],
                                            header.get("mode", "physical")))
        return FlowTrajectory(frames, header.get("step_log", []),
                              header.get("controls", {}),
                              header.get("stop_reason", "horizon"))


def _normal_speed(points: np.ndarray, kappa: np.ndarray,
                  normals: np.ndarray, mode: str) -> np.ndarray:
    if mode == "physical":
        return kappa
    return kappa + 0.5 * np.einsum("ij,ij->i", points, normals)


def _try_step(state: FlowState, dt_max: float,
              controls: EvolveControls) -> tuple[FlowState, dict]:
    curve = state.curve
    n_out = controls.n_points or curve.n
    fr = compute_frame(curve)
    h_min = float(curve.edge_lengths().min())
    dt = min(dt_max, controls.cfl * h_min * h_min)
    kmax0 = float(np.abs(fr.kappa).max())
    retries = 0
    while retries <= controls.max_retries:
        if kmax0 * dt > controls.kappa_dt_cap:
            dt *= 0.5
            retries += 1
            continue
        v0 = _normal_speed(curve.points, fr.kappa, fr.normals, state.mode)
        mid_pts = curve.points + 0.5 * dt * v0[:, None] * fr.normals
        mid = DiscreteCurve(mid_pts, curve.closed)
        fm = compute_frame(mid)
        if float(np.abs(fm.kappa).max()) * dt > controls.kappa_dt_cap:
            dt *= 0.5
            retries += 1
            continue
        v1 = _normal_speed(mid.points, fm.kappa, fm.normals, state.mode)
        new_pts = curve.points + dt * v1[:, None] * fm.normals
        new_curve = DiscreteCurve(new_pts, curve.closed, state.time + dt)
        if self_intersects(new_curve):
            dt *= 0.5
            retries += 1
            continue
        new_curve = resample(new_curve, n_out,
                             oversample=controls.resample_oversample,
                             max_iter=controls.resample_iters)
        info = {"dt": dt, "cfl_dt": controls.cfl * h_min * h_min,
                "kappa_max": kmax0, "retries": retries, "n": n_out}
        return FlowState(new_curve, state.time + dt, state.mode), info
    raise StepRejected(
        f"no stable embedded step found after {controls.max_retries} halvings")


def step(state: FlowState, dt_max: float,
         controls: EvolveControls | None = None) -> FlowState:
    """One explicit midpoint step with CFL cap, rejection, and remesh."""
    if dt_max <= 0.0:
        raise ValueError("dt_max must be positive")
    return _try_step(state, dt_max, controls or EvolveControls())[0]


def evolve(state: FlowState, horizon: float,
           controls: EvolveControls | None = None) -> FlowTrajectory:
    """Advance the flow by `horizon` time units, logging every step.

    Stops early with stop_reason "near_singular" when the maximum
    curvature exceeds controls.kappa_cap.
    """
    if horizon <= 0.0:
        raise ValueError("horizon must be positive")
    c = controls or EvolveControls()
    target = state.time + horizon
    eps = 1e-12 * max(abs(target), 1.0)
    frames = [state]
    log: list[dict] = []
    reason = "horizon"
    k = 0
    while state.time < target - eps:
        fr = compute_frame(state.curve)
        if float(np.abs(fr.kappa).max()) > c.kappa_cap:
            reason = "near_singular"
            break
        dt_allow = min(c.dt_max, target - state.time)
        state, info = _try_step(state, dt_allow, c)
        log.append(info)
        k += 1
        if k % c.frame_stride == 0 or state.time >= target - eps:
            frames.append(state)
    if frames[-1] is not state:
        frames.append(state)
    return FlowTrajectory(frames, log, asdict(c), reason)


def rescale_frame(state: FlowState) -> FlowState:
    """Map a physical frame at t < 0 to the rescaled frame at
    tau = -log(-t), with points multiplied by (-t)^{-1/2}."""
    if state.mode != "physical":
        raise ValueError("rescale_frame expects a physical-mode state")
    if state.time >= 0.0:
        raise OutOfDomain("rescaling is defined for t < 0 only")
    tau = -np.log(-state.time)
    scale = (-state.time) ** -0.5
    curve = DiscreteCurve(state.curve.points * scale,
                          state.curve.closed, tau)
    return FlowState(curve, float(tau), "rescaled")


def exact_trajectory(family, times, n: int,
                     rescaled: bool = False, **sample_kwargs) -> FlowTrajectory:
    """Trajectory built from closed-form samples instead of stepping.

    With rescaled=True, `times` are tau values; each frame is the exact
    curve at t = -exp(-tau) mapped through the rescaling.
    """
    from .exact import sample

    frames = []
    for tv in times:
        if rescaled:
            t_phys = -float(np.exp(-tv))
            st = rescale_frame(FlowState(
                sample(family, t_phys, n, **sample_kwargs), t_phys))
        else:
            st = FlowState(sample(family, float(tv), n, **sample_kwargs),
                           float(tv))
        frames.append(st)
    mode = "rescaled" if rescaled else "physical"
    return FlowTrajectory(frames, [], {"source": "exact", "n": n,
                                       "family": family.kind, "mode": mode})


@dataclass(frozen=True)
class RotationAlignment:
    """Per-frame rotation correction read off a tracked knuckle."""

    tau: float
    angle: float            # deviation from the nearest quarter turn
    source_knuckle: int     # path id or vertex index provenance
    tangent_angle: float = 0.0

    def matrix(self) -> np.ndarray:
        """Rotation sending the knuckle tangent to (1, 0)."""
        c, s = np.cos(-self.tangent_angle), np.sin(-self.tangent_angle)
        return np.array([[c, -s], [s, c]])


def align_rotation(traj: FlowTrajectory, knuckle_path,
                   path_id: int = 0) -> list[RotationAlignment]:
    """Unit-tangent angle at a tracked knuckle, one entry per frame.

    knuckle_path maps frame index -> vertex index (a dict, or an object
    with a frame_map attribute).  Angles are unwrapped continuously in
    tau and reported relative to the nearest quarter-turn baseline of the
    first frame, so an axis-aligned configuration reads zero and a rigid
    pre-rotation by theta reads theta.
    """
    frame_map = getattr(knuckle_path, "frame_map", knuckle_path)
    raw = []
    for k, st in enumerate(traj.frames):
        if k not in frame_map:
            raise PathBroken(f"knuckle path missing on frame {k}")
        idx = frame_map[k]
        fr = compute_frame(st.curve)
        tvec = fr.tangents[idx]
        raw.append(np.arctan2(tvec[1], tvec[0]))
    raw = np.unwrap(np.array(raw))
    base = np.round(raw[0] / (np.pi / 2)) * (np.pi / 2)
    dev = raw - base
    out = []
    for st, d, r in zip(traj.frames, dev, raw):
        a = float((d + np.pi) % (2 * np.pi) - np.pi)
        out.append(RotationAlignment(float(st.time), a, path_id, float(r)))
    return out
