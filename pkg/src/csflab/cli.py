"""Command-line front end: sampling, simulation, diagnostics, and the
acceptance-suite runner.

Exit codes: 0 success, 1 module/runtime error, 2 usage error.  CSV output
is RFC 4180 with a mandatory header and floats at 17 significant digits;
JSON output never contains NaN (failures become explicit status fields).
Set CSFLAB_LOG to error|info|debug to control logging.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from . import asymptotics, critical, exact, flow, gaussian, spectral
from .errors import CsfLabError
from .geometry import DiscreteCurve, load_curve, save_curve

log = logging.getLogger("csflab")


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating))
                        else v for v in row])


def _parse_point(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected 'x,y'")
    return float(parts[0]), float(parts[1])


def _family_from_args(args) -> exact.ExactFamily:
    if args.family == "circle":
        return exact.circle(args.extinction)
    if args.family == "line":
        return exact.line(args.angle, args.offset)
    if args.family == "grim_reaper":
        return exact.grim_reaper(args.window)
    return exact.paper_clip()


# --- subcommand handlers -----------------------------------------------------

def cmd_exact(args) -> int:
    fam = _family_from_args(args)
    curve = exact.sample(fam, args.time, args.n, spacing=args.spacing)
    save_curve(curve, args.out)
    print(f"exact: {args.family} at t={args.time} -> "
          f"{curve.n} points -> {args.out}")
    return 0


def cmd_simulate(args) -> int:
    curve = load_curve(args.infile)
    t0 = curve.time if curve.time is not None else 0.0
    state = flow.FlowState(curve, t0, args.mode)
    controls = flow.EvolveControls(dt_max=args.dt_max, n_points=args.n,
                                   frame_stride=args.frame_stride)
    traj = flow.evolve(state, args.horizon, controls)
    traj.save(args.out)
    print(f"simulate: {len(traj.frames)} frames over "
          f"[{traj.times[0]:.6g}, {traj.times[-1]:.6g}] "
          f"({traj.stop_reason}) -> {args.out}")
    return 0


def cmd_rescale(args) -> int:
    curve = load_curve(args.infile)
    if curve.time is None:
        raise CsfLabError("input curve carries no time stamp")
    st = flow.rescale_frame(flow.FlowState(curve, curve.time))
    save_curve(st.curve, args.out)
    print(f"rescale: t={curve.time:.6g} -> tau={st.time:.6g} -> {args.out}")
    return 0


def cmd_entropy(args) -> int:
    curve = load_curve(args.infile)
    rep = gaussian.entropy(curve)
    print(f"entropy: {rep.value:.6f} at center "
          f"({rep.center[0]:.4f}, {rep.center[1]:.4f}), "
          f"lambda={rep.scale:.4g}")
    return 0


def cmd_density(args) -> int:
    traj = flow.FlowTrajectory.load(args.traj)
    if args.monotonicity:
        rep = gaussian.monotonicity_report(traj)
        if args.out:
            _write_csv(args.out, ["tau", "F"],
                       zip(rep.times.tolist(), rep.values.tolist()))
        print(f"density: F max jump {rep.max_jump:.3e} "
              f"({'ok' if rep.passed else 'INCREASING'})")
        return 0
    x0 = args.x0
    if args.localized is not None:
        v = gaussian.theta_localized(traj, (x0[0], x0[1], args.t0),
                                     args.localized, args.r)
        print(f"density: localized theta = {v:.6f}")
    else:
        v = gaussian.theta(traj, (x0[0], x0[1], args.t0), args.r)
        print(f"density: theta = {v:.6f}")
    return 0


def cmd_diagnose(args) -> int:
    traj = flow.FlowTrajectory.load(args.traj)
    x0 = args.x0
    rows, per_frame = [], []
    for st in traj.frames:
        crit = critical.detect_critical(
            critical.distance_profile(st.curve, x0))
        try:
            vrep = critical.detect_vertices(st.curve)
            sharp, flat, infl, bumpy = (len(vrep.sharp), len(vrep.flat),
                                        len(vrep.inflections), vrep.bumpy)
        except CsfLabError:
            sharp = flat = infl = 0
            bumpy = False
        rows.append([st.time, len(crit.knuckles), len(crit.tips),
                     sharp, flat, infl, int(bumpy)])
        per_frame.append({"tau": float(st.time),
                          "knuckles": len(crit.knuckles),
                          "tips": len(crit.tips), "sharp": sharp,
                          "flat": flat, "inflections": infl,
                          "bumpy": bool(bumpy)})
    report = {"x0": list(x0), "frames": per_frame, "paths": {}}
    for kind in ("tip", "knuckle", "sharp"):
        ps = critical.track_paths(traj, kind, x0=x0)
        report["paths"][kind] = [
            {"id": p.id, "birth": p.birth, "death": p.death,
             "frames": {str(k): int(v) for k, v in p.frame_map.items()}}
            for p in ps.paths]
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=1, allow_nan=False)
    if args.csv:
        _write_csv(args.csv, ["tau", "knuckles", "tips", "sharp", "flat",
                              "inflections", "bumpy"], rows)
    print(f"diagnose: {len(traj.frames)} frames, "
          f"{sum(len(v) for v in report['paths'].values())} paths")
    return 0


def cmd_verify(args) -> int:
    from . import verify

    only = None
    if args.suite != "all":
        only = {int(s) for s in args.suite.split(",")}
    results = verify.run_all(only=only, progress=lambda r: print(r.line(),
                                                                 flush=True))
    report = verify.report_dict(results)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=1, allow_nan=False)
    passed = report["passed"]
    print(f"verify: {'all criteria passed' if passed else 'FAILURES above'}")
    return 0 if passed else 1


def cmd_spectral(args) -> int:
    traj = flow.FlowTrajectory.load(args.traj)
    ks = critical.track_paths(traj, "knuckle")
    full = ks.alive_on_all(len(traj.frames))
    al = flow.align_rotation(traj, full[0])
    rows = []
    for k, st in enumerate(traj.frames):
        sheets = spectral.extract_sheets(st.curve, al[k].matrix(),
                                         m=args.m, r=args.r, Y=args.Y)
        for s in sheets:
            pr = spectral.project(s)
            rows.append([st.time, s.sheet, pr.a, pr.b, pr.stable_norm,
                         pr.grad_norm])
    _write_csv(args.out, ["tau", "sheet", "a", "b", "stable_norm",
                          "grad_norm"], rows)
    print(f"spectral: {len(rows)} sheet projections -> {args.out}")
    return 0


def cmd_decay(args) -> int:
    taus, vals = {}, {}
    with open(args.infile, newline="") as fh:
        for row in csv.DictReader(fh):
            t = float(row["tau"])
            v = abs(float(row[args.column]))
            vals[t] = max(vals.get(t, 0.0), v)   # max over sheets
    ts = sorted(vals)
    rate, r2 = spectral.decay_fit(ts, [vals[t] for t in ts])
    print(f"decay: rate={rate:.6f}, r2={r2:.6f} "
          f"(column={args.column}, n={len(ts)})")
    return 0


def cmd_export(args) -> int:
    traj = flow.FlowTrajectory.load(args.infile)
    if args.format == "csv":
        if traj.frames:
            rep = gaussian.monotonicity_report(traj)
            rows = zip(rep.times.tolist(), rep.values.tolist())
        else:
            rows = []
        _write_csv(args.out, ["tau", "F"], rows)
    else:
        data = {"mode": traj.mode if traj.frames else None,
                "stop_reason": traj.stop_reason,
                "frames": [dict(time=float(f.time), **f.curve.to_json())
                           for f in traj.frames]}
        with open(args.out, "w") as fh:
            json.dump(data, fh, allow_nan=False)
    print(f"export: {len(traj.frames)} frames -> {args.out}")
    return 0


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="csflab",
        description="numerical laboratory for curve-shortening flow")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads for independent computations")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("exact", help="sample a closed-form solution")
    q.add_argument("--family", required=True,
                   choices=["circle", "line", "grim_reaper", "paper_clip"])
    q.add_argument("--time", type=float, required=True)
    q.add_argument("--n", type=int, default=512)
    q.add_argument("--spacing", choices=["uniform", "adaptive"], default=None)
    q.add_argument("--extinction", type=float, default=0.0)
    q.add_argument("--angle", type=float, default=0.0)
    q.add_argument("--offset", type=float, default=0.0)
    q.add_argument("--window", type=float, default=1.2)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_exact)

    q = sub.add_parser("simulate", help="evolve a curve under the flow")
    q.add_argument("--in", dest="infile", required=True)
    q.add_argument("--mode", choices=["physical", "rescaled"],
                   default="physical")
    q.add_argument("--horizon", type=float, required=True)
    q.add_argument("--n", type=int, default=None)
    q.add_argument("--dt-max", type=float, default=1e-3)
    q.add_argument("--frame-stride", type=int, default=10)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_simulate)

    q = sub.add_parser("rescale", help="map a physical frame to tau time")
    q.add_argument("--in", dest="infile", required=True)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_rescale)

    q = sub.add_parser("entropy", help="sup of Gaussian weighted length")
    q.add_argument("--in", dest="infile", required=True)
    q.set_defaults(func=cmd_entropy)

    q = sub.add_parser("density", help="Gaussian density ratios")
    q.add_argument("--traj", required=True)
    q.add_argument("--x0", type=_parse_point, default=(0.0, 0.0))
    q.add_argument("--t0", type=float, default=0.0)
    q.add_argument("--r", type=float, default=1.0)
    q.add_argument("--localized", type=float, default=None,
                   help="cutoff radius R for the localized ratio")
    q.add_argument("--monotonicity", action="store_true",
                   help="emit the per-frame F series instead")
    q.add_argument("--out", default=None)
    q.set_defaults(func=cmd_density)

    q = sub.add_parser("diagnose", help="critical-point counts and paths")
    q.add_argument("--traj", required=True)
    q.add_argument("--x0", type=_parse_point, default=(0.0, 0.0))
    q.add_argument("--out", default=None)
    q.add_argument("--csv", default=None)
    q.set_defaults(func=cmd_diagnose)

    q = sub.add_parser("verify", help="run the acceptance suite")
    q.add_argument("--suite", default="all",
                   help="'all' or comma-separated criterion ids")
    q.add_argument("--out", default=None)
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("spectral", help="sheet projections of a trajectory")
    q.add_argument("--traj", required=True)
    q.add_argument("--r", type=float, default=4.0)
    q.add_argument("--m", type=int, default=2)
    q.add_argument("--Y", type=float, default=8.0)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_spectral)

    q = sub.add_parser("decay", help="exponential fit of projected norms")
    q.add_argument("--in", dest="infile", required=True)
    q.add_argument("--column", default="stable_norm")
    q.add_argument("--R", type=float, default=3.0)
    q.set_defaults(func=cmd_decay)

    q = sub.add_parser("export", help="re-emit a trajectory as CSV or JSON")
    q.add_argument("--in", dest="infile", required=True)
    q.add_argument("--format", choices=["csv", "json"], default="csv")
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_export)

    return p


def main(argv=None) -> int:
    level = os.environ.get("CSFLAB_LOG", "error").upper()
    logging.basicConfig(level=getattr(logging, level, logging.ERROR),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CsfLabError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
