"""Asymptotic-shape diagnostics: fitting translating solitons at sharp
vertices, curvature bounds along vertex paths, tail decay, graphical
radius, and the combined structural check.

The canonical comparison soliton is the width-pi, unit-speed translator
whose zero-time slice is y = -log cos x with tip at the origin.  By arc
length sigma from the tip it is x = gd(sigma) (the Gudermannian),
tangent angle = x, curvature = sech(sigma); comparisons are made in this
arc-length parameterization, which is rigid-motion invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import savgol_filter

from .errors import (OrientationAmbiguous, PathBroken, WindowTooSmall,
                     ZeroCurvature)
from .geometry import DiscreteCurve, compute_frame
from .critical import detect_critical, distance_profile, detect_vertices


def _gd(sigma):
    """Gudermannian: tangent angle of the canonical translator at arc
    length sigma from the tip."""
    return 2.0 * np.arctan(np.tanh(0.5 * np.asarray(sigma, dtype=float)))


def _gd_inv(x):
    return np.arctanh(np.sin(np.asarray(x, dtype=float)))


def reaper_by_arclength(sigma):
    """Position, unit tangent, and curvature of y = -log cos x at arc
    length sigma from the tip (signed, increasing with x)."""
    x = _gd(sigma)
    y = -np.log(np.cos(x))
    tang = np.column_stack([np.cos(x), np.sin(x)])
    kappa = 1.0 / np.cosh(sigma)
    return np.column_stack([x, y]), tang, kappa


def _local_arc_samples(curve: DiscreteCurve, i: int, half_len: float):
    """Vertex-centered window of (relative arc length, points, tangents,
    kappa, kappa_s) covering |s - s_i| <= half_len, unwrapped for closed
    curves."""
    fr = compute_frame(curve)
    n = curve.n
    s = fr.arclengths
    total = curve.length()
    if curve.closed:
        idx = [(i + off) % n for off in range(-(n // 2), n // 2 + 1)]
        rel = []
        for off in range(-(n // 2), n // 2 + 1):
            j = (i + off) % n
            d = s[j] - s[i]
            if off < 0 and d > 0:
                d -= total
            if off > 0 and d < 0:
                d += total
            rel.append(d)
        rel = np.array(rel)
    else:
        idx = list(range(n))
        rel = s - s[i]
    idx = np.array(idx)
    keep = np.abs(rel) <= half_len
    order = np.argsort(rel[keep])
    sel = idx[keep][order]
    return (rel[keep][order], curve.points[sel], fr.tangents[sel],
            fr.kappa[sel], fr.kappa_s[sel])


@dataclass(frozen=True)
class GrimFit:
    vertex: tuple[float, float, float]     # (x, y, t)
    scale: float
    c2_distance: float
    window: float
    extras: dict = field(default_factory=dict)


def _fit_frame(curve: DiscreteCurve, i: int, scale: float,
               window: float) -> dict:
    """Position/tangent/curvature discrepancies of one frame against the
    canonical translator, after alignment and parabolic rescaling."""
    fr = compute_frame(curve)
    kap_v = fr.kappa[i]
    if abs(kap_v) < 1e-12:
        raise OrientationAmbiguous("vertex curvature vanishes")
    x_cap = min(window, 1.4)
    sig_max = float(_gd_inv(x_cap))
    rel, pts, tang, kap, _ = _local_arc_samples(curve, i,
                                                sig_max * scale * 1.05)
    # align: vertex to origin, tangent to (1,0), opening side up
    th = np.arctan2(fr.tangents[i][1], fr.tangents[i][0])
    c, s = np.cos(-th), np.sin(-th)
    R = np.array([[c, -s], [s, c]])
    q = (pts - curve.points[i]) @ R.T
    tq = tang @ R.T
    sgn_k = np.sign(kap_v)
    # rotated vertex normal is (0, +-1); the translator opens toward +y
    if sgn_k * (R @ np.array([-fr.tangents[i][1], fr.tangents[i][0]]))[1] < 0:
        q = -q        # rotate by pi
        tq = -tq
    # traversal direction: arc length should increase with x near the tip
    sig = rel / scale
    if np.interp(0.1 * sig_max, sig, q[:, 0]) < 0:
        sig = -sig[::-1]
        q = q[::-1]
        tq = -tq[::-1]
        kap = kap[::-1]
    q = q / scale
    chi = kap * scale * sgn_k
    mask = np.abs(sig) <= sig_max
    if mask.sum() < 8:
        raise WindowTooSmall("too few samples in the comparison window")
    ref_p, ref_t, ref_k = reaper_by_arclength(sig[mask])
    d0 = float(np.max(np.linalg.norm(q[mask] - ref_p, axis=1)))
    d1 = float(np.max(np.linalg.norm(tq[mask] - ref_t, axis=1)))
    d2 = float(np.max(np.abs(chi[mask] - ref_k)))
    return {"c0": d0, "c1": d1, "c2": d2, "max": max(d0, d1, d2)}


def grim_fit(traj, vertex, scale: float, window: float = 1.4) -> GrimFit:
    """C^2 discrepancy between the flow near a sharp vertex and the
    canonical translator at the given scale.

    vertex = (x, y, t).  The zero-time slice is compared at t, and the
    same comparison is repeated over the parabolic slab
    [t - scale^2 * min(window^2, 4), t] with the translator shifted by
    its unit-speed law; c2_distance is the max discrepancy over the slab.
    """
    if scale <= 0.0:
        raise ValueError("scale must be positive")
    x_v, y_v, t_v = vertex
    depth = scale * scale * min(window * window, 4.0)
    ts = traj.times
    t_lo = max(float(ts[0]), t_v - depth)
    # snap the slab to stored frames: interpolated frames have no point
    # correspondence guarantee, so comparisons use real frames only
    in_slab = [float(t) for t in ts if t_lo - 1e-12 <= t <= t_v + 1e-12]
    if not in_slab:
        in_slab = [float(ts[np.argmin(np.abs(ts - t_v))])]
    if len(in_slab) > 5:
        pick = np.unique(np.linspace(0, len(in_slab) - 1, 5).astype(int))
        in_slab = [in_slab[k] for k in pick]
    slab = np.array(in_slab)
    target = np.array([x_v, y_v])
    worst = {"c0": 0.0, "c1": 0.0, "c2": 0.0, "max": 0.0}
    per_time = []
    # walk backward in time from the given vertex so the nearest-point
    # tracking follows the vertex through the slab
    for t in slab[::-1]:
        k = int(np.argmin(np.abs(ts - t)))
        curve = traj.frames[k].curve
        i = int(np.argmin(np.linalg.norm(curve.points - target, axis=1)))
        fr = compute_frame(curve)
        # refine to the local |kappa| maximum within a few samples
        n = curve.n
        hood = [(i + o) % n if curve.closed else min(max(i + o, 0), n - 1)
                for o in range(-8, 9)]
        i = hood[int(np.argmax(np.abs(fr.kappa[hood])))]
        target = curve.points[i]
        # the translator's shape is time-invariant in arc-length form, so
        # every slice compares against the same reference
        res = _fit_frame(curve, i, scale, window)
        per_time.append((float(t), res["max"]))
        for k in worst:
            worst[k] = max(worst[k], res[k])
    return GrimFit((x_v, y_v, t_v), scale, worst["max"], window,
                   extras={"components": worst, "slab": per_time})


@dataclass(frozen=True)
class VertexOdeReport:
    taus: np.ndarray
    chi: np.ndarray
    ode_ok: bool
    ode_max_violation: float
    lower_bound: float            # min |chi| over the later half
    monotone_ok: bool             # |chi| non-decreasing in -tau


def vertex_ode_check(traj, path, slack: float = 0.05,
                     smooth_width: int = 5) -> VertexOdeReport:
    """Rescaled vertex curvature chi(tau) along a sharp-vertex path:
    checks the decay inequality d chi/d tau <= -chi/2 + chi^3 wherever
    0 < chi < 1/sqrt(2), the lower bound over the later half, and
    monotone growth toward more negative tau."""
    frame_map = getattr(path, "frame_map", path)
    taus, chi = [], []
    for k, st in enumerate(traj.frames):
        if k not in frame_map:
            raise PathBroken(f"vertex path missing on frame {k}")
        fr = compute_frame(st.curve)
        taus.append(st.time)
        chi.append(abs(fr.kappa[frame_map[k]]))
    taus = np.array(taus)
    chi = np.array(chi)
    if len(chi) >= smooth_width:
        chi_s = savgol_filter(chi, smooth_width, 2)
    else:
        chi_s = chi
    dchi = np.gradient(chi_s, taus)
    thresh = 1.0 / np.sqrt(2.0)
    viol = 0.0
    for c, d in zip(chi_s, dchi):
        if 0.0 < c < thresh:
            viol = max(viol, d - (-0.5 * c + c ** 3))
    half = len(chi) // 2
    lower = float(chi[:max(half, 1)].min())   # later half in -tau = early tau
    dmono = np.diff(chi_s)                    # tau increasing
    monotone = bool(np.all(dmono <= slack * np.maximum(chi_s[:-1], 1.0)))
    return VertexOdeReport(taus, chi, viol <= slack, float(viol),
                           lower, monotone)


def tip_relations_check(curve: DiscreteCurve, vertex: int, lam: float,
                        window: float = 1.3) -> tuple[float, float, float]:
    """Scale-normalized residuals of the translator tip identities
      kappa   =  cos(theta) / lam
      kappa_s = -kappa sqrt(lam^-2 - kappa^2)
      kappa_ss= -2 kappa^3 + kappa / lam^2
    with theta the turning angle from the vertex; sup over |theta| <=
    min(window, 1.4), weighted by lam, lam^2, lam^3 respectively."""
    fr = compute_frame(curve)
    if abs(fr.kappa[vertex]) < 1e-12:
        raise ZeroCurvature("tip relations need nonzero vertex curvature")
    sgn = np.sign(fr.kappa[vertex])
    half = min(window, 1.4)
    # generous arc-length window, then restrict by turning angle
    rel, _, _, kap, kap_s = _local_arc_samples(
        curve, vertex, float(_gd_inv(half)) * lam * 1.2)
    kap = kap * sgn
    kap_s = kap_s * sgn
    # theta(s) = integral of kappa from the vertex
    theta = np.concatenate([[0.0], np.cumsum(
        0.5 * (kap[1:] + kap[:-1]) * np.diff(rel))])
    theta -= float(np.interp(0.0, rel, theta))
    mask = np.abs(theta) <= half
    kap_ss = np.gradient(kap_s, rel)
    lam2 = 1.0 / (lam * lam)
    root = np.sqrt(np.maximum(lam2 - kap ** 2, 0.0))
    r0 = float(np.max(np.abs(kap - np.cos(theta) / lam)[mask]) * lam)
    # the signed identity holds on the side where |kappa| decreases with s;
    # compare magnitudes so one residual covers both arms
    r1 = float(np.max(np.abs(np.abs(kap_s) - kap * root)[mask]) * lam * lam)
    r2 = float(np.max(np.abs(kap_ss + 2.0 * kap ** 3 - lam2 * kap)[mask])
               * lam ** 3)
    return r0, r1, r2


@dataclass(frozen=True)
class TailReport:
    frame_index: int
    monotone: bool
    max_violation: float
    sup_kappa_x: float


def tail_decay_check(traj, x0=(0.0, 0.0),
                     slack: float = 1e-6) -> list[TailReport]:
    """Per frame and per tail: |kappa| must be non-increasing along the
    tail moving away from the curve's interior; also reports sup |kappa|
    * |x| as a boundedness surrogate.  Closed curves yield no entries."""
    out = []
    for k, st in enumerate(traj.frames):
        curve = st.curve
        if curve.closed:
            continue
        fr = compute_frame(curve)
        rep = detect_critical(distance_profile(curve, x0, fr))
        for knuckle, end in rep.tails:
            idx = (list(range(knuckle, end + 1)) if end > knuckle
                   else list(range(knuckle, end - 1, -1)))
            ak = np.abs(fr.kappa[idx])
            d = np.diff(ak)
            viol = float(max(0.0, d.max())) if len(d) else 0.0
            xs = np.linalg.norm(curve.points[idx] -
                                np.asarray(x0, dtype=float), axis=1)
            out.append(TailReport(k, viol <= slack, viol,
                                  float(np.max(ak * xs))))
    return out


# --- graphical radius ------------------------------------------------------

from .errors import SheetCountMismatch  # noqa: E402  (grouped with use)


@dataclass(frozen=True)
class GraphicalRadiusReport:
    tau: float
    rho: float
    rho_hat: float
    m: int
    sheet_norms: dict
    bounds_ok: bool
    details: dict = field(default_factory=dict)


def _sheet_heights(points_rot: np.ndarray, closed: bool,
                   xi: np.ndarray, m: int) -> np.ndarray:
    """Heights of the m sheets of a rotated curve above the axis points
    xi, sorted top to bottom; raises SheetCountMismatch on any line that
    does not cross exactly m times."""
    a = points_rot
    b = np.roll(a, -1, axis=0) if closed else a[1:]
    a2 = a if closed else a[:-1]
    x0, x1 = a2[:, 0], b[:, 0]
    out = np.empty((len(xi), m))
    for j, x in enumerate(xi):
        lo = np.minimum(x0, x1)
        hi = np.maximum(x0, x1)
        hit = (lo <= x) & (x < hi)
        if hit.sum() != m:
            raise SheetCountMismatch(
                f"vertical line x={x:.3f} meets the curve "
                f"{int(hit.sum())} times, expected {m}")
        t = (x - x0[hit]) / (x1[hit] - x0[hit])
        u = a2[hit, 1] + t * (b[hit, 1] - a2[hit, 1])
        out[j] = np.sort(u)[::-1]
    return out


def graphical_radius(curve: DiscreteCurve, S: np.ndarray, eps: float = 0.05,
                     m: int = 2, grid_h: float = 0.02) -> GraphicalRadiusReport:
    """Graphical radius of a rescaled frame after rotation S.

    rho is defined by rho^{-4} = max over sheets of the C^2([-1,1]) norm
    of the sheet height u^i; the report checks, with rho_hat =
    min(rho, axis extent):
      |u^i(y)|    <= (|y| + 2)^2 rho^{-4}   on |y| <= rho_hat
      |u^i_y(y)|  <= eps                     on |y| <= rho_hat
      |u^i_yy(y)| <= 5 eps / rho_hat         on |y| <= rho_hat / 2
    """
    pts = curve.points @ S.T
    extent = float(np.abs(pts[:, 0]).max())

    xi1 = np.arange(-1.0, 1.0 + grid_h / 2, grid_h)
    u1 = _sheet_heights(pts, curve.closed, xi1, m)
    du1 = np.gradient(u1, xi1, axis=0)
    ddu1 = np.gradient(du1, xi1, axis=0)
    c2 = max(float(np.abs(u1).max()), float(np.abs(du1).max()),
             float(np.abs(ddu1).max()))
    rho = c2 ** -0.25 if c2 > 0 else np.inf
    rho_hat = min(rho, extent)

    xi = np.arange(-rho_hat, rho_hat + grid_h / 2, grid_h)
    xi = np.clip(xi, -rho_hat, rho_hat)
    u = _sheet_heights(pts, curve.closed, xi, m)
    du = np.gradient(u, xi, axis=0)
    ddu = np.gradient(du, xi, axis=0)
    bound_u = ((np.abs(xi) + 2.0) ** 2 * c2)[:, None]
    ok_u = bool(np.all(np.abs(u) <= bound_u + 1e-12))
    ok_du = bool(np.all(np.abs(du) <= eps + 1e-12))
    half = np.abs(xi) <= rho_hat / 2 + 1e-12
    ok_ddu = bool(np.all(np.abs(ddu[half]) <= 5.0 * eps / rho_hat + 1e-12))
    norms = {"u": float(np.abs(u).max()), "u_y": float(np.abs(du).max()),
             "u_yy": float(np.abs(ddu[half]).max()) if half.any() else 0.0}
    return GraphicalRadiusReport(
        curve.time if curve.time is not None else np.nan,
        float(rho), float(rho_hat), m, norms,
        ok_u and ok_du and ok_ddu,
        {"ok_u": ok_u, "ok_u_y": ok_du, "ok_u_yy": ok_ddu,
         "rho_c2": c2, "extent": extent})


def regularity_scale(traj, X, r_min: float = 1e-3,
                     iters: int = 40) -> float:
    """Largest r such that on B(x, r) x (t - r^2, t] every sampled point
    of the flow inside the ball has |kappa| <= 1/r and, for open curves,
    the endpoints stay outside the ball.  Found by bisection; capped by
    the trajectory's own time window."""
    x, y, t = X
    center = np.array([x, y])
    ts = traj.times
    if t < ts[0] or t > ts[-1] + 1e-12:
        raise WindowTooSmall("query time outside the trajectory")
    r_cap = np.sqrt(max(t - float(ts[0]), 0.0))
    if r_cap <= r_min:
        raise WindowTooSmall("no room before the query time")

    def admissible(r: float) -> bool:
        span = [k for k in range(len(ts)) if t - r * r < ts[k] <= t + 1e-12]
        if not span:
            return True
        for k in span:
            c = traj.frames[k].curve
            fr = compute_frame(c)
            d = np.linalg.norm(c.points - center, axis=1)
            if not c.closed and (d[0] < r or d[-1] < r):
                return False
            inside = d < r
            if inside.any() and np.abs(fr.kappa[inside]).max() > 1.0 / r:
                return False
        return True

    lo, hi = r_min, r_cap
    if not admissible(lo):
        return lo
    if admissible(hi):
        return hi
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if admissible(mid):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class TromboneFrame:
    tau: float
    bumpy: bool
    one_sharp_per_finger: bool
    same_sign: bool
    angle_ok: bool
    fit_ok: bool

    @property
    def all_ok(self) -> bool:
        return (self.bumpy and self.one_sharp_per_finger and
                self.same_sign and self.angle_ok and self.fit_ok)


def trombone_check(traj, eps: float = 0.2, x0=(0.0, 0.0),
                   fit_threshold: float | None = None) -> list[TromboneFrame]:
    """Per-frame structural booleans on a rescaled trajectory: bumpiness,
    one sharp vertex per finger, matching curvature signs at tips and
    vertices, knuckle-to-knuckle turning angle within eps of pi, and a
    translator fit below threshold at every sharp vertex."""
    from .geometry import turning_angle

    thr = eps / 20.0 if fit_threshold is None else fit_threshold
    out = []
    for st in traj.frames:
        curve = st.curve
        fr = compute_frame(curve)
        crit = detect_critical(distance_profile(curve, x0, fr))
        try:
            vrep = detect_vertices(curve)
            bumpy = vrep.bumpy
        except Exception:
            vrep = None
            bumpy = False
        one_per, same_sign, angle_ok, fit_ok = False, False, False, False
        if vrep is not None and crit.fingers:
            per = []
            n = curve.n
            for (i, j, tip) in crit.fingers:
                span = (j - i) % n or n
                inside = [v for v in vrep.sharp if 0 < (v - i) % n < span]
                per.append(len(inside) == 1)
                if inside:
                    same_sign = (np.sign(fr.kappa[tip]) ==
                                 np.sign(fr.kappa[inside[0]]))
            one_per = all(per)
            angles = [abs(turning_angle(curve, i, j))
                      for (i, j, _tip) in crit.fingers]
            angle_ok = all(abs(a - np.pi) < eps for a in angles)
            fits = []
            for v in vrep.sharp:
                lam = 1.0 / abs(fr.kappa[v])
                res = _fit_frame(curve, v, lam, 1.2)
                fits.append(res["max"])
            fit_ok = all(f < thr for f in fits)
        out.append(TromboneFrame(float(st.time), bool(bumpy), one_per,
                                 bool(same_sign), angle_ok, fit_ok))
    return out
