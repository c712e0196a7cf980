"""Critical points of the squared-distance function and of curvature.

Zero detection is hysteresis-based: samples with |value| below a noise
tolerance are treated as exact zeros, and a run of zeros between samples
of opposite sign counts as a single simple crossing at the run's center.
This matters for very elongated curves whose straight stretches carry
values that underflow to zero: a flat side between two bends is one flat
vertex, not a forest of spurious zeros.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from shapely.geometry import LineString

from .errors import (AmbiguousMatch, BoundaryViolated, DegenerateProfile,
                     DegenerateVertexSet, SelfCrossingChord, ZeroCurvature)
from .geometry import DiscreteCurve, FrameData, compute_frame


@dataclass(frozen=True)
class DistanceProfile:
    """Squared-distance function phi = |g - x0|^2 + 2t and its arc-length
    derivatives along one curve."""

    x0: tuple[float, float]
    phi: np.ndarray
    phi_s: np.ndarray
    phi_ss: np.ndarray
    curve: DiscreteCurve
    frame: FrameData


def distance_profile(curve: DiscreteCurve, x0,
                     frame: FrameData | None = None) -> DistanceProfile:
    fr = frame or compute_frame(curve)
    t = curve.time or 0.0
    rel = curve.points - np.asarray(x0, dtype=float)
    phi = np.einsum("ij,ij->i", rel, rel) + 2.0 * t
    phi_s = 2.0 * np.einsum("ij,ij->i", rel, fr.tangents)
    phi_ss = 2.0 + 2.0 * fr.kappa * np.einsum("ij,ij->i", rel, fr.normals)
    return DistanceProfile((float(x0[0]), float(x0[1])),
                           phi, phi_s, phi_ss, curve, fr)


# --- zero / crossing machinery -------------------------------------------

@dataclass(frozen=True)
class Crossing:
    index: int          # sample index nearest the zero
    direction: int      # +1 up-crossing, -1 down-crossing, 0 touch
    multiple: bool      # plateau of >= 2 near-zero samples, or a touch


def _sign_partition(vals: np.ndarray, tol: float) -> np.ndarray:
    return np.where(vals > tol, 1, np.where(vals < -tol, -1, 0))


def find_crossings(vals: np.ndarray, periodic: bool,
                   tol: float | None = None) -> list[Crossing]:
    """Zeros of a sampled function with plateau hysteresis.

    Between consecutive strictly signed samples: opposite signs give one
    crossing located at the near-zero run's center (multiple if the run
    has >= 2 zero samples); equal signs across a nonempty zero run give a
    touch event flagged multiple.  Raises DegenerateProfile if no sample
    has a strict sign.
    """
    vals = np.asarray(vals, dtype=float)
    n = len(vals)
    if tol is None:
        tol = 1e-9 * float(np.max(np.abs(vals)) or 1.0)
    sgn = _sign_partition(vals, tol)
    nz = np.nonzero(sgn)[0]
    if len(nz) == 0:
        raise DegenerateProfile("function vanishes identically within tol")
    out: list[Crossing] = []
    pairs = []
    for a, b in zip(nz[:-1], nz[1:]):
        pairs.append((int(a), int(b), False))
    if periodic:
        pairs.append((int(nz[-1]), int(nz[0]) + n, True))
    for a, b, wraps in pairs:
        gap = b - a - 1
        if sgn[a % n] != sgn[b % n]:
            mid = (a + b) // 2 if gap > 0 else (a if abs(vals[a % n]) <
                                                abs(vals[b % n]) else b)
            out.append(Crossing(mid % n, int(sgn[b % n]), gap >= 2))
        elif gap > 0:
            out.append(Crossing(((a + b) // 2) % n, 0, True))
    return out


def count_zeros(samples, boundary: str = "periodic",
                tol: float | None = None) -> tuple[int, bool]:
    """Number of sign changes of a sampled function and a flag for any
    non-simple (plateau or touching) zero."""
    vals = np.asarray(samples, dtype=float)
    if tol is None:
        tol = 1e-9 * float(np.max(np.abs(vals)) or 1.0)
    if boundary == "nonvanishing":
        if abs(vals[0]) <= tol or abs(vals[-1]) <= tol:
            raise BoundaryViolated("endpoint value vanishes")
        periodic = False
    elif boundary == "periodic":
        periodic = True
    else:
        raise ValueError("boundary must be 'periodic' or 'nonvanishing'")
    try:
        evts = find_crossings(vals, periodic, tol)
    except DegenerateProfile:
        return 0, True
    count = sum(1 for e in evts if e.direction != 0)
    multiple = any(e.multiple or e.direction == 0 for e in evts)
    return count, multiple


# --- distance critical points --------------------------------------------

@dataclass(frozen=True)
class CriticalReport:
    x0: tuple[float, float]
    tips: list[int]
    knuckles: list[int]
    fingers: list[tuple[int, int, int]]      # (knuckle, knuckle, tip)
    tails: list[tuple[int, int]]             # (knuckle, end index)
    multiplicity: dict = field(default_factory=dict)  # index -> simple|multiple


def detect_critical(profile: DistanceProfile,
                    multiple_tol: float = 1e-4) -> CriticalReport:
    """Tips (local maxima of phi) and knuckles (local minima) from sign
    crossings of phi_s, assembled into fingers and tails.

    A critical point is flagged multiple if |phi_ss| there falls below
    multiple_tol (phi_ss is dimensionless, = 2 on flat stretches)."""
    curve = profile.curve
    # phi_s = 2 <g - x0, t> is bounded by twice the max distance to x0;
    # use that as the noise scale so a centered circle reads as degenerate.
    rel = curve.points - np.asarray(profile.x0)
    scale = 2.0 * float(np.linalg.norm(rel, axis=1).max() or 1.0)
    evts = find_crossings(profile.phi_s, periodic=curve.closed,
                          tol=1e-9 * scale)
    tips, knuckles, mult = [], [], {}
    for e in evts:
        if e.direction == 0:
            mult[e.index] = "multiple"
            continue
        kind_multiple = abs(profile.phi_ss[e.index]) < multiple_tol
        mult[e.index] = "multiple" if kind_multiple else "simple"
        (knuckles if e.direction > 0 else tips).append(e.index)

    fingers: list[tuple[int, int, int]] = []
    tails: list[tuple[int, int]] = []
    if curve.closed and knuckles:
        n = curve.n
        ks = sorted(knuckles)
        for i, k in enumerate(ks):
            k2 = ks[(i + 1) % len(ks)]
            span = (k2 - k) % n or n
            inside = [t for t in tips if 0 < (t - k) % n < span]
            if len(inside) == 1:
                fingers.append((k, k2, inside[0]))
    elif not curve.closed and knuckles:
        ks = sorted(knuckles)
        tails.append((ks[0], 0))
        tails.append((ks[-1], curve.n - 1))
        for i in range(len(ks) - 1):
            inside = [t for t in tips if ks[i] < t < ks[i + 1]]
            if len(inside) == 1:
                fingers.append((ks[i], ks[i + 1], inside[0]))
    return CriticalReport(profile.x0, sorted(tips), sorted(knuckles),
                          fingers, tails, mult)


def finger_region_area(curve: DiscreteCurve,
                       finger: tuple[int, int, int]) -> float:
    """Area enclosed by a finger arc and the chord joining its knuckles."""
    i, j, _tip = finger
    pts = curve.points
    n = curve.n
    if curve.closed:
        span = (j - i) % n or n
        idx = [(i + k) % n for k in range(span + 1)]
    else:
        idx = list(range(i, j + 1))
    arc = pts[idx]
    ring = np.vstack([arc, arc[:1]])
    if not LineString(ring).is_simple:
        raise SelfCrossingChord("chord between knuckles crosses the arc")
    x, y = arc[:, 0], arc[:, 1]
    area = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
    return float(abs(area))


# --- curvature critical points -------------------------------------------

@dataclass(frozen=True)
class VertexReport:
    sharp: list[int]
    flat: list[int]
    inflections: list[int]
    edges: list[tuple[int, int]]     # maximal arcs between sharp vertices
    bumpy: bool


def detect_vertices(curve: DiscreteCurve, tol: float = 1e-6,
                    frame: FrameData | None = None) -> VertexReport:
    """Sharp/flat vertices from crossings of kappa_s, inflections from
    crossings of kappa.  Raises DegenerateVertexSet when kappa_s vanishes
    identically (circles and lines have no isolated vertices)."""
    fr = frame or compute_frame(curve)
    k, ks = fr.kappa, fr.kappa_s
    k_scale = float(np.max(np.abs(k)) or 1.0)
    ks_scale = float(np.max(np.abs(ks)) or 1.0)
    if ks_scale < tol * max(k_scale, 1.0):
        raise DegenerateVertexSet("kappa_s vanishes identically")

    try:
        ks_evts = find_crossings(ks, curve.closed, tol * ks_scale)
    except DegenerateProfile:
        raise DegenerateVertexSet("kappa_s vanishes identically")
    # Plateau hysteresis: an opposite-sign zero run is one simple crossing
    # (straight stretches underflow to zero on elongated curves); only a
    # same-sign touch marks a genuinely non-simple zero.
    sharp, flat, simple = [], [], True
    for e in ks_evts:
        if e.direction == 0:
            simple = False
            continue
        # |kappa| rises then falls at a sharp vertex: d|k|/ds crosses down
        d_abs = e.direction * np.sign(k[e.index]) if k[e.index] != 0 else e.direction
        (flat if d_abs > 0 else sharp).append(e.index)

    try:
        k_evts = find_crossings(k, curve.closed, tol * k_scale)
        inflections = [e.index for e in k_evts if e.direction != 0]
    except DegenerateProfile:
        inflections = []    # kappa ~ 0 everywhere: a line; handled above

    edges = []
    if sharp:
        ss = sorted(sharp)
        if curve.closed:
            for i, a in enumerate(ss):
                edges.append((a, ss[(i + 1) % len(ss)]))
        else:
            edges.append((0, ss[0]))
            for a, b in zip(ss[:-1], ss[1:]):
                edges.append((a, b))
            edges.append((ss[-1], curve.n - 1))
    return VertexReport(sorted(sharp), sorted(flat), sorted(inflections),
                        edges, simple)


# --- trajectory-level checks ---------------------------------------------

def _field_values(state, field_name: str, x0) -> np.ndarray:
    fr = compute_frame(state.curve)
    if field_name == "kappa":
        return fr.kappa
    if field_name == "kappa_s":
        return fr.kappa_s
    if field_name == "phi_s":
        if x0 is None:
            raise ValueError("phi_s needs a center x0")
        return distance_profile(state.curve, x0, fr).phi_s
    raise ValueError(f"unknown field {field_name!r}")


@dataclass(frozen=True)
class ZeroCountSeries:
    times: np.ndarray
    counts: list[int]
    multiple_frames: list[int]
    violations: list[int]           # frame indices where the count rose


def zero_monotonicity_check(traj, field_name: str, x0=None,
                            tol: float | None = None) -> ZeroCountSeries:
    """Zero counts of a field over a trajectory and any forward increase."""
    counts, multi = [], []
    for k, st in enumerate(traj.frames):
        vals = _field_values(st, field_name, x0)
        boundary = "periodic" if st.curve.closed else "nonvanishing"
        c, m = count_zeros(vals, boundary, tol)
        counts.append(c)
        if m:
            multi.append(k)
    violations = [k for k in range(1, len(counts))
                  if counts[k] > counts[k - 1]]
    return ZeroCountSeries(traj.times, counts, multi, violations)


@dataclass
class Path:
    id: int
    kind: str
    frame_map: dict[int, int]

    @property
    def birth(self) -> int:
        return min(self.frame_map)

    @property
    def death(self) -> int:
        return max(self.frame_map)


@dataclass
class PathSet:
    kind: str
    paths: list[Path]

    def alive_on_all(self, n_frames: int) -> list[Path]:
        return [p for p in self.paths if len(p.frame_map) == n_frames]


_DETECTOR_KINDS = ("tip", "knuckle", "sharp", "flat", "inflection")


def _detect_indices(state, kind: str, x0) -> list[int]:
    if kind in ("tip", "knuckle"):
        rep = detect_critical(distance_profile(state.curve, x0))
        return rep.tips if kind == "tip" else rep.knuckles
    rep = detect_vertices(state.curve)
    return {"sharp": rep.sharp, "flat": rep.flat,
            "inflection": rep.inflections}[kind]


def track_paths(traj, kind: str, x0=None,
                gate_fraction: float = 0.1) -> PathSet:
    """Match per-frame critical points into paths by arc-length fraction.

    A detection on frame k+1 continues the path whose previous position
    (as a fraction of total length) is nearest, if within gate_fraction;
    otherwise it starts a new path.  Ties within 1e-9 raise AmbiguousMatch.
    """
    if kind not in _DETECTOR_KINDS:
        raise ValueError(f"kind must be one of {_DETECTOR_KINDS}")
    if x0 is None:
        x0 = (0.0, 0.0)
    paths: list[Path] = []
    open_paths: list[tuple[Path, float]] = []
    for k, st in enumerate(traj.frames):
        idxs = _detect_indices(st, kind, x0)
        fr = compute_frame(st.curve)
        total = st.curve.length()
        fracs = [fr.arclengths[i] / total for i in idxs]
        closed = st.curve.closed

        def dist(f1, f2):
            d = abs(f1 - f2)
            return min(d, 1.0 - d) if closed else d

        next_open: list[tuple[Path, float]] = []
        used = set()
        for i, f in sorted(zip(idxs, fracs), key=lambda p: p[1]):
            best, best_d = None, np.inf
            for pth, pf in open_paths:
                if id(pth) in used:
                    continue
                d = dist(f, pf)
                if abs(d - best_d) < 1e-9 and best is not None:
                    raise AmbiguousMatch(
                        f"two paths tie for detection at frame {k}")
                if d < best_d:
                    best, best_d = pth, d
            if best is not None and best_d <= gate_fraction:
                best.frame_map[k] = i
                used.add(id(best))
                next_open.append((best, f))
            else:
                p = Path(len(paths), kind, {k: i})
                paths.append(p)
                next_open.append((p, f))
        open_paths = next_open
    return PathSet(kind, paths)


@dataclass(frozen=True)
class ExtremumPathReport:
    path_id: int
    kind: str
    phi_monotone: bool
    scaled_norm_increasing: bool | None   # knuckle paths on t < 0 only
    max_violation: float


def extremum_path_check(traj, pathset: PathSet,
                        slack: float = 1e-6) -> list[ExtremumPathReport]:
    """Monotonicity of phi along tip/knuckle paths, and of (-t)^{-1}|g|^2
    along knuckle paths when physical time is negative."""
    out = []
    for p in pathset.paths:
        frames = sorted(p.frame_map)
        phis, scaled = [], []
        for k in frames:
            st = traj.frames[k]
            i = p.frame_map[k]
            prof = distance_profile(st.curve, (0.0, 0.0))
            phis.append(prof.phi[i])
            if st.time is not None and st.time < 0.0:
                scaled.append(np.sum(st.curve.points[i] ** 2) / (-st.time))
        phis = np.array(phis)
        d = np.diff(phis)
        if p.kind == "knuckle":
            mono = bool(np.all(d >= -slack))
            viol = float(max(0.0, -d.min())) if len(d) else 0.0
        else:
            mono = bool(np.all(d <= slack))
            viol = float(max(0.0, d.max())) if len(d) else 0.0
        inc = None
        if p.kind == "knuckle" and len(scaled) == len(frames):
            ds = np.diff(np.array(scaled))
            inc = bool(np.all(ds >= -slack))
        out.append(ExtremumPathReport(p.id, p.kind, mono, inc, viol))
    return out


def classify_center(curve: DiscreteCurve, s0: int, beta: float,
                    tol: float = 1e-8) -> str:
    """Class of the squared-distance function at vertex s0 for the probe
    center on the normal line at signed multiple beta of the curvature
    radius: beta > 1 gives a local maximum, beta < 1 a local minimum,
    beta = 1 (the osculating center) is degenerate."""
    fr = compute_frame(curve)
    kap = fr.kappa[s0]
    if abs(kap) < 1e-12 and beta != 0.0:
        raise ZeroCurvature("vertex has vanishing curvature")
    x0 = curve.points[s0] + (beta / kap) * fr.normals[s0]
    prof = distance_profile(curve, x0, fr)
    pss = prof.phi_ss[s0]
    if abs(pss) < tol:
        return "osculating_degenerate"
    return "local_max" if pss < 0.0 else "local_min"
