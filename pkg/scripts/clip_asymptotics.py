#!/usr/bin/env python3
"""Asymptotic diagnostics of the rescaled oval over a tau window.

Emits clip_asymptotics.csv with one row per frame:
    tau, chi (rescaled vertex curvature), rho_hat (graphical radius),
    finger_area, F (Gaussian weighted length at the origin)
These are the series behind the vertex-bound, graphical-radius, and
finger-area acceptance criteria; rerun with a wider window or higher n
to study convergence.
"""

import csv
import pathlib

import numpy as np

from csflab import asymptotics, critical, exact, flow, gaussian
from csflab.geometry import compute_frame

TAUS = np.linspace(-9.0, -4.0, 26)
N = 1024


def main():
    traj = flow.exact_trajectory(exact.paper_clip(), TAUS, N, rescaled=True)
    knuckles = critical.track_paths(traj, "knuckle")
    align = flow.align_rotation(
        traj, knuckles.alive_on_all(len(traj.frames))[0])

    rows = []
    for k, st in enumerate(traj.frames):
        fr = compute_frame(st.curve)
        vrep = critical.detect_vertices(st.curve)
        chi = max(abs(fr.kappa[v]) for v in vrep.sharp)
        rad = asymptotics.graphical_radius(st.curve, align[k].matrix())
        crit = critical.detect_critical(
            critical.distance_profile(st.curve, (0.0, 0.0)))
        area = critical.finger_region_area(st.curve, crit.fingers[0])
        F = gaussian.gaussian_length(st.curve, (0.0, 0.0), 1.0)
        rows.append([st.time, chi, rad.rho_hat, area, F])
        print(f"tau={st.time:7.2f}  chi={chi:8.3f}  rho_hat={rad.rho_hat:6.3f}"
              f"  area={area:.5f}  F={F:.6f}")

    out = pathlib.Path(__file__).with_name("clip_asymptotics.csv")
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tau", "chi", "rho_hat", "finger_area", "F"])
        w.writerows(rows)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
