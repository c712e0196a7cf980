"""csflab: a numerical laboratory for curve-shortening flow.

Submodules:
  geometry     discrete curves, frames, curvature, resampling
  exact        closed-form solutions (circle, line, grim reaper, paper clip)
  flow         explicit time stepping, trajectories, rescaling
  gaussian     Gaussian weighted length, entropy, density ratios
  critical     critical points of distance and curvature, path tracking
  asymptotics  grim-reaper fitting, vertex bounds, graphical radius
  spectral     Gaussian L2 machinery: projections, cutoff, decay fits
  cli          command-line front end and the verify suite
"""

from .geometry import DiscreteCurve, FrameData, compute_frame, resample

__all__ = ["DiscreteCurve", "FrameData", "compute_frame", "resample"]
__version__ = "0.1.0"
