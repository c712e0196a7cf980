"""Closed-form curve-shortening-flow solutions used as oracles.

Families:
  circle       shrinking circle of radius sqrt(-2t), extinction at t = 0
  line         static line (angle + offset), sampled as a long segment
  grim_reaper  y = t - log cos x on |x| < pi/2, width pi, unit upward speed
  paper_clip   Angenent oval, implicit locus cos x = e^t cosh y, t < 0

Paper-clip evaluation is done in the log domain so very negative times
(t ~ -e^8 and beyond) stay accurate: the sides are straight to machine
precision there, which is a property of the solution, not an artifact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import OutOfDomain
from .geometry import DiscreteCurve, compute_frame, polyline_distance

KINDS = ("circle", "line", "grim_reaper", "paper_clip")


@dataclass(frozen=True)
class ExactFamily:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown family {self.kind!r}")


def circle(extinction: float = 0.0) -> ExactFamily:
    return ExactFamily("circle", {"extinction": extinction})


def line(angle: float = 0.0, offset: float = 0.0,
         half_length: float = 50.0) -> ExactFamily:
    return ExactFamily("line", {"angle": angle, "offset": offset,
                                "half_length": half_length})


def grim_reaper(window: float = 1.2) -> ExactFamily:
    if not 0.0 < window < np.pi / 2:
        raise ValueError("grim reaper window must lie in (0, pi/2)")
    return ExactFamily("grim_reaper", {"window": window})


def paper_clip() -> ExactFamily:
    return ExactFamily("paper_clip", {})


def _logcosh(y):
    y = np.abs(y)
    return y + np.log1p(np.exp(-2.0 * y)) - np.log(2.0)


def _paper_clip_quarter(t: float, n_dense: int) -> np.ndarray:
    """Dense quarter of the clip from the knuckle (x=X, y=0) to the tip
    (x=0, y=Ymax), first quadrant, ordered by increasing y."""
    # y_max solves log cos 0 = t + logcosh(y);  exact arccosh(e^{-t}) form
    # rewritten to avoid overflow.
    if -t > 30.0:
        y_max = -t + np.log1p(np.sqrt(-np.expm1(2.0 * t)))
    else:
        y_max = np.arccosh(np.exp(-t))

    # Side part, parameterized by y where |dy/dx| >= 1 (tan x * coth y >= 1),
    # i.e. up to the point with x = pi/4 near the tip.  Curvature along the
    # side decays like exp(y - y_cut), so concentrate samples in the last
    # ten units below the cut and leave the straight remainder coarse.
    l_cut = np.log(np.cos(np.pi / 4.0)) - t          # = -t - 0.3466
    y_cut = float(_inv_logcosh(l_cut))
    m_side = max(16, int(0.85 * n_dense))
    y_bend = max(y_cut - 10.0, 0.0)
    if y_bend > 0.0:
        m_straight = max(8, m_side // 4)
        m_bend = m_side - m_straight
        y_side = np.concatenate([
            np.linspace(0.0, y_bend, m_straight, endpoint=False),
            np.linspace(y_bend, y_cut, m_bend, endpoint=False),
        ])
    else:
        y_side = np.linspace(0.0, y_cut, m_side, endpoint=False)
    arg = t + _logcosh(y_side)
    x_side = np.arccos(np.exp(arg))

    # Tip cap, parameterized by x in [pi/4, 0].
    m_cap = n_dense - m_side
    x_cap = np.linspace(np.pi / 4.0, 0.0, m_cap)
    l_cap = np.log(np.cos(x_cap)) - t
    y_cap = _inv_logcosh(l_cap)

    xs = np.concatenate([x_side, x_cap])
    ys = np.concatenate([y_side, y_cap])
    ys[-1] = y_max
    return np.column_stack([xs, ys])


def _inv_logcosh(l):
    """Solve logcosh(y) = l for y >= 0; l = log cosh y."""
    l = np.asarray(l, dtype=float)
    # cosh y = e^l  ->  y = arccosh(e^l); stable branch for large l.
    small = l < 20.0
    y = np.empty_like(l)
    y[small] = np.arccosh(np.exp(np.minimum(l[small], 700.0)))
    big = ~small
    y[big] = l[big] + np.log1p(np.sqrt(-np.expm1(-2.0 * l[big])))
    return y


def _adaptive_indices(points: np.ndarray, n: int, closed: bool,
                      theta_per_edge: float = 0.04) -> np.ndarray:
    """Target positions mixing uniform arc length with turning-angle density.

    Returns cumulative target measure values used to pick n points from a
    dense polyline so that both edge length and per-edge turning stay small.
    """
    seg = np.diff(points, axis=0)
    elen = np.linalg.norm(seg, axis=1)
    ang = np.arctan2(seg[:, 1], seg[:, 0])
    dang = np.abs(np.diff(np.unwrap(ang)))
    turn = np.concatenate([[0.0], dang, [0.0]])[: len(elen)]
    total_len = elen.sum()
    total_turn = turn.sum()
    n_turn = min(n // 2, int(total_turn / theta_per_edge) + 1)
    n_len = n - n_turn
    density = elen * (n_len / total_len) + turn * (n_turn / max(total_turn, 1e-30))
    cum = np.concatenate([[0.0], np.cumsum(density)])
    if closed:
        targets = np.linspace(0.0, cum[-1], n, endpoint=False)
    else:
        targets = np.linspace(0.0, cum[-1], n)
    idx = np.interp(targets, cum, np.arange(len(cum), dtype=float))
    return idx


def _pick(points: np.ndarray, idx: np.ndarray) -> np.ndarray:
    i0 = np.clip(idx.astype(int), 0, len(points) - 2)
    frac = idx - i0
    return points[i0] * (1.0 - frac)[:, None] + points[i0 + 1] * frac[:, None]


def _project_clip(pts: np.ndarray, t: float) -> np.ndarray:
    """Snap chord-interpolated points back onto cos x = e^t cosh y.

    Where the locus is steep in y, move x onto the locus; where it is flat
    (tip caps), move y.  Keeps the exact tips/knuckles fixed.
    """
    x = pts[:, 0].copy()
    y = pts[:, 1].copy()
    sx = np.sign(x)
    sy = np.sign(y)
    ax = np.abs(x)
    ay = np.abs(y)
    with np.errstate(over="ignore"):
        steep = np.abs(np.tan(np.minimum(ax, np.pi / 2 - 1e-12))
                       / np.tanh(np.maximum(ay, 1e-300))) >= 1.0
    ax_new = np.arccos(np.clip(np.exp(t + _logcosh(ay[steep])), -1.0, 1.0))
    ax[steep] = ax_new
    flat = ~steep
    l_flat = np.log(np.cos(ax[flat])) - t
    ay[flat] = _inv_logcosh(l_flat)
    sx[sx == 0.0] = 1.0
    sy[sy == 0.0] = 1.0
    return np.column_stack([sx * ax, sy * ay])


def sample(family: ExactFamily, t: float, n: int,
           spacing: str | None = None,
           theta_per_edge: float = 0.04) -> DiscreteCurve:
    """n-point curve on the exact locus at time t.

    spacing: "uniform" (arc length) or "adaptive" (extra points where the
    curve turns; default for the paper clip, whose tips are much finer than
    its overall extent at very negative times).  theta_per_edge sets the
    turning-angle budget per edge in adaptive mode; smaller values resolve
    the tips more finely at the cost of side resolution.
    """
    if n < 8:
        raise ValueError("n must be at least 8")
    kind = family.kind
    p = family.params

    if kind == "circle":
        t0 = p.get("extinction", 0.0)
        if t >= t0:
            raise OutOfDomain("circle exists only for t < extinction time")
        r = np.sqrt(-2.0 * (t - t0))
        th = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        pts = r * np.column_stack([np.cos(th), np.sin(th)])
        return DiscreteCurve(pts, closed=True, time=t)

    if kind == "line":
        ang, off, hl = p["angle"], p["offset"], p["half_length"]
        u = np.array([np.cos(ang), np.sin(ang)])
        nvec = np.array([-np.sin(ang), np.cos(ang)])
        s = np.linspace(-hl, hl, n)
        pts = s[:, None] * u[None, :] + off * nvec[None, :]
        return DiscreteCurve(pts, closed=False, time=t)

    if kind == "grim_reaper":
        w = p["window"]
        x = np.linspace(-w, w, n)
        y = t - np.log(np.cos(x))
        return DiscreteCurve(np.column_stack([x, y]), closed=False, time=t)

    if kind == "paper_clip":
        if t >= 0.0:
            raise OutOfDomain("paper clip exists only for t < 0")
        n_dense = max(8 * n, 20000)
        quarter = _paper_clip_quarter(t, n_dense)
        # right quarter up to the tip, then mirrored left quarter back down
        upper = np.vstack([quarter, (quarter[::-1] * [-1.0, 1.0])[1:]])
        full = np.vstack([upper, (upper[::-1] * [1.0, -1.0])[1:-1]])
        mode = spacing or "adaptive"
        if mode == "adaptive":
            idx = _adaptive_indices(full, n, closed=True,
                                    theta_per_edge=theta_per_edge)
        else:
            elen = np.linalg.norm(np.diff(full, axis=0), axis=1)
            cum = np.concatenate([[0.0], np.cumsum(elen)])
            targets = np.linspace(0.0, cum[-1], n, endpoint=False)
            idx = np.interp(targets, cum, np.arange(len(cum), dtype=float))
        pts = _project_clip(_pick(full, idx), t)
        return DiscreteCurve(pts, closed=True, time=t)

    raise ValueError(kind)


def time_domain(family: ExactFamily) -> tuple[float, float]:
    if family.kind == "circle":
        return (-np.inf, family.params.get("extinction", 0.0))
    if family.kind == "paper_clip":
        return (-np.inf, 0.0)
    return (-np.inf, np.inf)


def flow_residual(family: ExactFamily, t: float, dt: float, n: int) -> float:
    """Max |v_n - kappa| measured by differencing two nearby exact samples.

    Independent check that the family solves the flow: normal displacement
    rate from closest-point projection of sample(t) onto sample(t+dt),
    compared with the curvature of sample(t).
    """
    lo, hi = time_domain(family)
    if not (lo < t and t + dt < hi):
        raise OutOfDomain("time step leaves the family's domain")
    c0 = sample(family, t, n)
    c1 = sample(family, t + dt, 8 * n)
    fr = compute_frame(c0)
    disp = _closest_point_displacement(c0.points, c1)
    v_n = np.einsum("ij,ij->i", disp, fr.normals) / dt
    interior = slice(None) if c0.closed else slice(2, -2)
    return float(np.max(np.abs(v_n[interior] - fr.kappa[interior])))


def _closest_point_displacement(points: np.ndarray,
                                target: DiscreteCurve) -> np.ndarray:
    """Vector from each point to its closest point on a spline-densified
    copy of the target curve."""
    from .geometry import _spline

    sp, utot = _spline(target)
    uu = np.linspace(0.0, utot, 16 * target.n + 1)
    dense = sp(uu)
    tree = cKDTree(dense)
    _, k = tree.query(points)
    best = dense[k] - points
    bestd = np.einsum("ij,ij->i", best, best)
    m = len(dense)
    for lo, hi in ((np.maximum(k - 1, 0), np.minimum(k, m - 1)),
                   (np.minimum(k, m - 1), np.minimum(k + 1, m - 1))):
        a = dense[lo]
        d = dense[hi] - a
        dd = np.einsum("ij,ij->i", d, d)
        w = points - a
        s = np.clip(np.einsum("ij,ij->i", w, d) / np.maximum(dd, 1e-300),
                    0.0, 1.0)
        proj = a + s[:, None] * d
        cand = proj - points
        candd = np.einsum("ij,ij->i", cand, cand)
        better = candd < bestd
        best[better] = cand[better]
        bestd[better] = candd[better]
    return best
