"""Gaussian L2 machinery on graph sheets of rescaled frames.

Functions live on a uniform grid [-Y, Y] and are paired with the weight
(4 pi)^{-1/2} e^{-y^2/4}; the drift operator D = d^2/dy^2 - (y/2) d/dy
+ 1/2 has eigenfunctions 1 (eigenvalue +1/2), y (0), and
2^{-3/2}(y^2 - 2) (-1/2) in this pairing, and everything below the
neutral mode decays with gap at least 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.stats import linregress

from .errors import GridMismatch, NonPositiveValue, SheetCountMismatch


def make_grid(Y: float = 12.0, h: float = 1e-2) -> np.ndarray:
    n = int(round(2 * Y / h))
    if n % 2 == 1:
        n += 1          # even interval count for Simpson
    return np.linspace(-Y, Y, n + 1)


@dataclass(frozen=True)
class Sampled:
    """A function sampled on a uniform grid."""

    y: np.ndarray
    vals: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        v = np.asarray(self.vals, dtype=float)
        if y.shape != v.shape:
            raise GridMismatch("grid and values have different lengths")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "vals", v)


def _common_grid(f: Sampled, g: Sampled) -> np.ndarray:
    if f.y.shape != g.y.shape or not np.allclose(f.y, g.y, atol=1e-12):
        raise GridMismatch("functions are sampled on different grids")
    return f.y


def weight(y: np.ndarray) -> np.ndarray:
    return (4.0 * np.pi) ** -0.5 * np.exp(-y * y / 4.0)


def inner_H(f: Sampled, g: Sampled) -> float:
    """Gaussian-weighted L2 pairing by composite Simpson quadrature."""
    y = _common_grid(f, g)
    return float(simpson(f.vals * g.vals * weight(y), x=y))


def norm_H(f: Sampled) -> float:
    return float(np.sqrt(max(inner_H(f, f), 0.0)))


def phi1(y: np.ndarray) -> np.ndarray:
    return np.ones_like(y)


def phi2(y: np.ndarray) -> np.ndarray:
    return y / np.sqrt(2.0)


def phi3(y: np.ndarray) -> np.ndarray:
    return 2.0 ** -1.5 * (y * y - 2.0)


def _d1(vals: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.gradient(vals, y)


def L_apply(f: Sampled) -> Sampled:
    """Drift operator f'' - (y/2) f' + f/2 with centered differences."""
    y = f.y
    fy = _d1(f.vals, y)
    fyy = _d1(fy, y)
    return Sampled(y, fyy - 0.5 * y * fy + 0.5 * f.vals)


def cutoff_eta(s):
    """C^2 plateau cutoff: 1 on |s| <= 1, 0 on |s| >= 2, quintic
    smoothstep in between (max |eta'| = 1.875)."""
    s = np.abs(np.asarray(s, dtype=float))
    u = np.clip(s - 1.0, 0.0, 1.0)
    step = u ** 3 * (10.0 - 15.0 * u + 6.0 * u * u)
    out = 1.0 - step
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class SheetProfile:
    """One graph sheet u^i(y) of a rescaled frame, with derivatives and
    the cutoff radius used for spectral work."""

    tau: float
    sheet: int
    y: np.ndarray
    u: np.ndarray
    u_y: np.ndarray
    u_yy: np.ndarray
    r: float

    def hat(self) -> Sampled:
        """u * eta(y / r): the compactly supported working function."""
        return Sampled(self.y, self.u * cutoff_eta(self.y / self.r))


@dataclass(frozen=True)
class SpectralProjection:
    a: float            # unstable coefficient <u_hat, phi1>
    b: float            # neutral coefficient  <u_hat, phi2>
    stable_norm: float  # ||u_hat - a phi1 - b phi2||
    grad_norm: float    # ||d/dy u_hat||


def project(profile: SheetProfile) -> SpectralProjection:
    uh = profile.hat()
    y = uh.y
    a = inner_H(uh, Sampled(y, phi1(y)))
    b = inner_H(uh, Sampled(y, phi2(y)))
    rem = Sampled(y, uh.vals - a * phi1(y) - b * phi2(y))
    grad = Sampled(y, _d1(uh.vals, y))
    return SpectralProjection(float(a), float(b), norm_H(rem), norm_H(grad))


@dataclass(frozen=True)
class FlowErrorReport:
    E: Sampled
    norm_E: float
    norm_P_plus_P0: float       # ||P+ E|| + ||P0 E||
    grad_sq: float              # ||u_hat_y||^2 at the midpoint
    tail: float                 # r^{-3/2} e^{-r^2/8}
    fitted_K: float


def flow_error(p1: SheetProfile, p2: SheetProfile,
               dtau: float) -> FlowErrorReport:
    """Residual of the linearized sheet evolution between two frames:
    E = (u_hat_2 - u_hat_1)/dtau - L applied to the midpoint."""
    if p1.y.shape != p2.y.shape or not np.allclose(p1.y, p2.y, atol=1e-12):
        raise GridMismatch("sheet profiles on different grids")
    if p1.r != p2.r:
        raise GridMismatch("sheet profiles carry different cutoff radii")
    u1, u2 = p1.hat(), p2.hat()
    mid = Sampled(p1.y, 0.5 * (u1.vals + u2.vals))
    E = Sampled(p1.y, (u2.vals - u1.vals) / dtau - L_apply(mid).vals)
    y = p1.y
    a = inner_H(E, Sampled(y, phi1(y)))
    b = inner_H(E, Sampled(y, phi2(y)))
    lhs = abs(a) + abs(b)
    grad_sq = norm_H(Sampled(y, _d1(mid.vals, y))) ** 2
    tail = p1.r ** -1.5 * np.exp(-p1.r ** 2 / 8.0)
    rhs = grad_sq + tail
    return FlowErrorReport(E, norm_H(E), float(lhs), float(grad_sq),
                           float(tail), float(lhs / rhs) if rhs > 0 else 0.0)


def rotation_refine(profiles: list[SheetProfile]) -> float:
    """Realignment angle read off the neutral coefficient of the top
    sheet: a residual tilt of slope m contributes b = m sqrt(2), so
    theta = arctan(b / sqrt(2)) removes it."""
    if not profiles:
        return 0.0
    proj = project(profiles[0])
    return float(np.arctan(proj.b / np.sqrt(2.0)))


def decay_fit(taus, values) -> tuple[float, float]:
    """Least-squares exponential-decay fit: slope of log(value) against
    tau and the r^2 of the fit.  Positive slope means the values shrink
    as tau decreases."""
    taus = np.asarray(taus, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(taus) < 6:
        raise ValueError("need at least 6 samples for a decay fit")
    if np.any(values <= 0.0):
        raise NonPositiveValue("decay fit requires positive values")
    if np.allclose(values, values[0], rtol=1e-12, atol=0.0):
        return 0.0, 1.0
    res = linregress(taus, np.log(values))
    return float(res.slope), float(res.rvalue ** 2)


def extract_sheets(curve, S: np.ndarray, m: int = 2, r: float = 4.0,
                   Y: float = 8.0, h: float = 1e-2) -> list[SheetProfile]:
    """Graph sheets of a rotated frame over the uniform grid [-Y, Y],
    ordered top to bottom, with finite-difference derivatives."""
    from .asymptotics import _sheet_heights

    pts = curve.points @ S.T
    y = make_grid(Y, h)
    heights = _sheet_heights(pts, curve.closed, y, m)
    out = []
    tau = curve.time if curve.time is not None else np.nan
    for i in range(m):
        u = heights[:, i]
        uy = _d1(u, y)
        uyy = _d1(uy, y)
        out.append(SheetProfile(float(tau), i, y, u, uy, uyy, r))
    return out


def sheet_c2_norm(profile: SheetProfile, R: float = 3.0) -> float:
    """max over |y| <= R of |u|, |u_y|, |u_yy|."""
    mask = np.abs(profile.y) <= R + 1e-12
    return float(max(np.abs(profile.u[mask]).max(),
                     np.abs(profile.u_y[mask]).max(),
                     np.abs(profile.u_yy[mask]).max()))


# convenience: reusable eigenfunction/identity diagnostics ------------------

def eigen_residuals(Y: float = 12.0, h: float = 1e-2) -> dict:
    """Residual norms ||D phi_i - lambda_i phi_i|| and the pairwise
    orthonormality defects of the first three modes."""
    y = make_grid(Y, h)
    phis = [Sampled(y, phi1(y)), Sampled(y, phi2(y)), Sampled(y, phi3(y))]
    lams = [0.5, 0.0, -0.5]
    out = {}
    for i, (p, lam) in enumerate(zip(phis, lams), start=1):
        res = Sampled(y, L_apply(p).vals - lam * p.vals)
        # one-sided stencils at the two grid ends are first order; the
        # weight there is ~1e-16, but exclude them anyway
        trim = Sampled(y[2:-2], res.vals[2:-2])
        out[f"eig{i}"] = norm_H(Sampled(y, np.concatenate(
            [[0.0, 0.0], trim.vals, [0.0, 0.0]])))
    for i in range(3):
        for j in range(3):
            out[f"gram{i+1}{j+1}"] = inner_H(phis[i], phis[j])
    return out
