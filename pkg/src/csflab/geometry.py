"""Discrete planar curves: frames, curvature, resampling, intersection tests.

A curve is an ordered polyline, closed (S^1) or open (segment of R).
Closed curves are normalized to counterclockwise orientation on load, so the
unit normal n = J t (J = quarter turn) points into the enclosed region and a
counterclockwise circle has positive curvature.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from shapely.geometry import LineString

from .errors import DegenerateSpacing


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must have shape (n, 2)")
    return pts


def signed_area(points: np.ndarray) -> float:
    """Shoelace area of a closed polyline (positive = counterclockwise)."""
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


@dataclass(frozen=True)
class DiscreteCurve:
    """Ordered polyline with topology flag and optional creation time."""

    points: np.ndarray
    closed: bool
    time: float | None = None

    def __post_init__(self):
        pts = _as_points(self.points)
        if len(pts) < 8:
            raise ValueError("a curve needs at least 8 points")
        nxt = np.roll(pts, -1, axis=0) if self.closed else pts[1:]
        cur = pts if self.closed else pts[:-1]
        edge = np.linalg.norm(nxt - cur, axis=1)
        if np.any(edge <= 0.0):
            raise ValueError("consecutive points must be distinct")
        if self.closed and signed_area(pts) < 0.0:
            pts = pts[::-1].copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return len(self.points)

    def edge_vectors(self) -> np.ndarray:
        if self.closed:
            return np.roll(self.points, -1, axis=0) - self.points
        return np.diff(self.points, axis=0)

    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(self.edge_vectors(), axis=1)

    def length(self) -> float:
        return float(self.edge_lengths().sum())

    def diameter(self) -> float:
        lo = self.points.min(axis=0)
        hi = self.points.max(axis=0)
        return float(np.linalg.norm(hi - lo))

    def with_points(self, points, time=None) -> "DiscreteCurve":
        return DiscreteCurve(points, self.closed,
                             self.time if time is None else time)

    def to_json(self) -> dict:
        return {
            "closed": bool(self.closed),
            "points": [[float(x), float(y)] for x, y in self.points],
            "time": None if self.time is None else float(self.time),
        }

    @staticmethod
    def from_json(obj: dict) -> "DiscreteCurve":
        return DiscreteCurve(np.array(obj["points"], dtype=float),
                             bool(obj["closed"]), obj.get("time"))


def save_curve(curve: DiscreteCurve, path) -> None:
    with open(path, "w") as fh:
        json.dump(curve.to_json(), fh)


def load_curve(path) -> DiscreteCurve:
    with open(path) as fh:
        return DiscreteCurve.from_json(json.load(fh))


@dataclass(frozen=True)
class FrameData:
    """Per-vertex arc length, unit frame, and curvature of a curve."""

    arclengths: np.ndarray
    tangents: np.ndarray
    normals: np.ndarray
    kappa: np.ndarray
    kappa_s: np.ndarray


def _menger_kappa(prev: np.ndarray, cur: np.ndarray, nxt: np.ndarray) -> np.ndarray:
    """Signed circumscribed-circle curvature of point triples.

    Positive where the polyline turns counterclockwise; collinear triples
    give exactly zero.
    """
    a = cur - prev
    b = nxt - cur
    c = nxt - prev
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    la = np.linalg.norm(a, axis=1)
    lb = np.linalg.norm(b, axis=1)
    lc = np.linalg.norm(c, axis=1)
    return 2.0 * cross / (la * lb * lc)


def compute_frame(curve: DiscreteCurve) -> FrameData:
    """Arc length, unit tangent/normal, signed curvature, and kappa_s.

    Curvature uses the Menger formula on point triples; kappa_s uses
    centered differences in arc length (one-sided at open endpoints).
    """
    pts = curve.points
    n = len(pts)
    elen = curve.edge_lengths()
    if np.any(elen < 1e-12 * curve.diameter()):
        raise DegenerateSpacing("edge length below 1e-12 of curve diameter")

    if curve.closed:
        s = np.concatenate([[0.0], np.cumsum(elen)[:-1]])
        prev = np.roll(pts, 1, axis=0)
        nxt = np.roll(pts, -1, axis=0)
        chord = nxt - prev
        tangents = chord / np.linalg.norm(chord, axis=1)[:, None]
        kappa = _menger_kappa(prev, pts, nxt)
    else:
        s = np.concatenate([[0.0], np.cumsum(elen)])
        tangents = np.empty_like(pts)
        chord = pts[2:] - pts[:-2]
        tangents[1:-1] = chord / np.linalg.norm(chord, axis=1)[:, None]
        tangents[0] = (pts[1] - pts[0]) / elen[0]
        tangents[-1] = (pts[-1] - pts[-2]) / elen[-1]
        kappa = np.empty(n)
        kappa[1:-1] = _menger_kappa(pts[:-2], pts[1:-1], pts[2:])
        # quadratic extrapolation in arc length (one-sided second order)
        kappa[0] = _extrapolate(s[1:4], kappa[1:4], s[0])
        kappa[-1] = _extrapolate(s[-4:-1], kappa[-4:-1], s[-1])

    normals = np.column_stack([-tangents[:, 1], tangents[:, 0]])

    if curve.closed:
        s_ext = np.concatenate([[s[0] - elen[-1]], s, [s[-1] + elen[-1] + 0.0]])
        s_ext[-1] = s[-1] + elen[-1]
        k_ext = np.concatenate([[kappa[-1]], kappa, [kappa[0]]])
        kappa_s = ((k_ext[2:] - k_ext[:-2]) / (s_ext[2:] - s_ext[:-2]))
    else:
        kappa_s = np.gradient(kappa, s)

    return FrameData(s, tangents, normals, kappa, kappa_s)


def _extrapolate(xs, ys, x0) -> float:
    """Quadratic extrapolation through three samples."""
    coef = np.polyfit(xs, ys, 2)
    return float(np.polyval(coef, x0))


def _spline(curve: DiscreteCurve):
    pts = curve.points
    if curve.closed:
        pts = np.vstack([pts, pts[:1]])
        chord = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        u = np.concatenate([[0.0], np.cumsum(chord)])
        return CubicSpline(u, pts, bc_type="periodic"), u[-1]
    chord = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    u = np.concatenate([[0.0], np.cumsum(chord)])
    return CubicSpline(u, pts), u[-1]


def spline_length(curve: DiscreteCurve, oversample: int = 16) -> float:
    """Arc length of the interpolating cubic spline (dense chordal sum)."""
    sp, utot = _spline(curve)
    uu = np.linspace(0.0, utot, oversample * curve.n + 1)
    dense = sp(uu)
    return float(np.linalg.norm(np.diff(dense, axis=0), axis=1).sum())


def resample(curve: DiscreteCurve, n: int, oversample: int = 16,
             max_iter: int = 8, tol: float = 1e-10) -> DiscreteCurve:
    """Redistribute to n points at uniform arc-length spacing.

    Fits a cubic spline through the points (periodic for closed curves),
    measures arc length on a dense subdivision, and places points at equal
    arc increments.  Iterates the procedure to its fixed point so the
    operation is idempotent; open-curve endpoints are kept exactly.
    """
    if n < 8:
        raise ValueError("n must be at least 8")
    out = curve
    scale = max(curve.diameter(), 1e-30)
    for _ in range(max_iter):
        sp, utot = _spline(out)
        uu = np.linspace(0.0, utot, oversample * max(out.n, n) + 1)
        dense = sp(uu)
        seg = np.linalg.norm(np.diff(dense, axis=0), axis=1)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        total = cum[-1]
        if out.closed:
            targets = np.linspace(0.0, total, n, endpoint=False)
        else:
            targets = np.linspace(0.0, total, n)
        u_new = np.interp(targets, cum, uu)
        pts = sp(u_new)
        if not out.closed:
            pts[0] = curve.points[0]
            pts[-1] = curve.points[-1]
        moved = np.inf
        if len(pts) == out.n:
            moved = float(np.max(np.linalg.norm(pts - out.points, axis=1)))
        out = DiscreteCurve(pts, curve.closed, curve.time)
        if moved < tol * scale:
            break
    return out


def turning_angle(curve: DiscreteCurve, i: int, j: int) -> float:
    """Integral of curvature over the arc from vertex i to vertex j.

    Computed as the sum of signed exterior angles between consecutive edges,
    which is exact for polylines.  For closed curves the arc follows the
    curve orientation; i == j means the full loop (2*pi for a convex curve).
    """
    pts = curve.points
    n = len(pts)
    ev = curve.edge_vectors()

    def ext_angle(e0, e1):
        return float(np.arctan2(e0[0] * e1[1] - e0[1] * e1[0],
                                e0[0] * e1[0] + e0[1] * e1[1]))

    if curve.closed:
        ks = [(i + off) % n for off in range(1, (j - i) % n or n)] \
            if (j - i) % n or i == j else []
        if i == j:
            ks = [(i + off) % n for off in range(1, n + 1)]
        total = 0.0
        for k in ks:
            total += ext_angle(ev[(k - 1) % n], ev[k % n])
        return total
    if not (0 <= i <= j < n):
        raise ValueError("need 0 <= i <= j < n for open curves")
    total = 0.0
    for k in range(i + 1, j):
        total += ext_angle(ev[k - 1], ev[k])
    return total


def self_intersects(curve: DiscreteCurve) -> bool:
    """True iff any two non-adjacent segments cross.

    Segments sharing a vertex never count as crossing.
    """
    pts = curve.points
    if curve.closed:
        ring = np.vstack([pts, pts[:1]])
        return not LineString(ring).is_simple
    return not LineString(pts).is_simple


def polyline_distance(points: np.ndarray, other: DiscreteCurve) -> np.ndarray:
    """Distance from each query point to the other curve's polyline."""
    a = other.points
    b = np.roll(a, -1, axis=0) if other.closed else a[1:]
    a = a if other.closed else a[:-1]
    d = b - a
    dd = np.einsum("ij,ij->i", d, d)
    best = np.full(len(points), np.inf)
    chunk = max(1, int(4e6 // max(len(a), 1)))
    for lo in range(0, len(points), chunk):
        p = points[lo:lo + chunk]
        w = p[:, None, :] - a[None, :, :]
        t = np.clip(np.einsum("pij,ij->pi", w, d) / dd, 0.0, 1.0)
        proj = a[None, :, :] + t[:, :, None] * d[None, :, :]
        dist = np.linalg.norm(p[:, None, :] - proj, axis=2)
        best[lo:lo + chunk] = dist.min(axis=1)
    return best


def hausdorff_distance(c1: DiscreteCurve, c2: DiscreteCurve) -> float:
    """Symmetric Hausdorff distance between two polylines."""
    d12 = polyline_distance(c1.points, c2).max()
    d21 = polyline_distance(c2.points, c1).max()
    return float(max(d12, d21))
