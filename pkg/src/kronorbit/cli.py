"""Experiment harness: seed-deterministic runs with machine-readable output.

Every subcommand writes its tables atomically (write to a temp path, then
rename), starts each CSV with a header row, and drops a sidecar `<out>.prov`
line recording the config hash and artifact version.  Identical configs
produce byte-identical outputs, independent of the thread-count environment
variable KRONORBIT_THREADS.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import math
import os
import sys
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .diophantine import dc_margin, wdc_margin
from .discrepancy import classical_discrepancy, count_hits, fit_exponent
from .dynamics import EdgeMassError, moment_growth_fit
from .hyperplane import ConstructionFailure, hyperplane_demo
from .semialgebraic import grid_cover_count
from .textio import ParseError, parse_operator_file, parse_set_file
from .torus import Frequency, TorusVector, frac, orbit_points

__all__ = ["main", "run"]


def _parse_floats(text: str) -> List[float]:
    return [float(x) for x in text.split(",") if x.strip() != ""]


def _parse_ints(text: str) -> List[int]:
    return [int(x) for x in text.split(",") if x.strip() != ""]


def _load_alpha(value: str) -> List[float]:
    if os.path.exists(value):
        with open(value, "r", encoding="utf-8") as fh:
            return _parse_floats(fh.read().replace("\n", ","))
    return _parse_floats(value)


def _atomic_write(path: str, data: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _config_hash(args: argparse.Namespace) -> str:
    items = sorted(
        (k, repr(v)) for k, v in vars(args).items() if k not in ("func",)
    )
    blob = ";".join(f"{k}={v}" for k, v in items)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _write_outputs(args: argparse.Namespace, path: str, data: str) -> None:
    _atomic_write(path, data)
    prov = f"config_sha256={_config_hash(args)} version={__version__}\n"
    _atomic_write(path + ".prov", prov)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _cmd_count(args) -> int:
    S = parse_set_file(args.set_file)
    alpha = _load_alpha(args.alpha)
    theta = _parse_floats(args.theta) if args.theta else [0.0] * len(alpha)
    rows = []
    points = []
    for N in _parse_ints(args.N):
        res = count_hits(frac(theta), Frequency(tuple(alpha)), N, S, eq_tol=args.eq_tol)
        points.append((N, res.count))
        slope = ""
        if len({n for n, _ in points}) >= 3:
            slope = _fmt(fit_exponent(points).slope)
        rows.append((N, res.count, slope))
    _write_outputs(args, args.out, _csv(("N", "count", "slope_so_far"), rows))
    return 0


def _cmd_sweep(args) -> int:
    status = _cmd_count(args)
    if status:
        return status
    with open(args.out, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()[1:]
    points = [(int(l.split(",")[0]), int(l.split(",")[1])) for l in lines]
    fit = fit_exponent(points) if len({n for n, _ in points}) >= 3 else None
    out = []
    out.append("total_count: " + str(sum(c for _, c in points)))
    if fit is not None:
        out.append("slope: " + _fmt(fit.slope))
        out.append("intercept: " + _fmt(fit.intercept))
        out.append("r_squared: " + _fmt(fit.r_squared))
    _write_outputs(args, args.out + ".fit.txt", "\n".join(out) + "\n")
    return 0


def _cmd_dioph(args) -> int:
    alpha = _load_alpha(args.alpha)
    if args.kind == "wdc":
        rep = wdc_margin(tuple(alpha), args.tau, args.scan_bound)
    else:
        rep = dc_margin(tuple(alpha), args.tau, args.scan_bound)
    argmin = rep.argmin if isinstance(rep.argmin, int) else ";".join(str(v) for v in rep.argmin)
    rows = [(rep.kind, len(alpha), rep.tau, rep.scan_bound, rep.gamma_lower, argmin)]
    _write_outputs(args, args.out, _csv(("kind", "b", "tau", "scan_bound", "gamma_lower", "argmin"), rows))
    return 0


def _cmd_lowerbound(args) -> int:
    alpha = _load_alpha(args.alpha)
    if args.b is not None and args.b != len(alpha):
        print(f"error: --b {args.b} does not match alpha dimension {len(alpha)}", file=sys.stderr)
        return 2
    try:
        witness, certificate = hyperplane_demo(
            tuple(alpha), args.N, epsilon=args.epsilon,
            delta_min=args.delta_min, seed=args.seed,
        )
    except ConstructionFailure as exc:
        print(f"error: construction failed: {exc}", file=sys.stderr)
        return 1
    lines = ["n_list " + " ".join(str(n) for n in witness.n_list)]
    for v in witness.spanning:
        lines.append("spanning " + " ".join(_fmt(c) for c in v.coords))
    lines.append("normal " + " ".join(_fmt(c) for c in witness.normal))
    lines.append("delta_achieved " + _fmt(witness.achieved_delta))
    lines.append("witness_scale_N " + str(witness.N))
    lines.append("certificate_count " + str(certificate.count))
    lines.append("certificate_bound " + _fmt(certificate.bound))
    _write_outputs(args, args.out, "\n".join(lines) + "\n")
    rows = []
    for ks, n, point in certificate.hits:
        kk = ";".join(str(k) for k in ks)
        resid = certificate.max_point_residual
        rows.append((kk, n, _fmt(resid)))
    _atomic_write(args.out + ".cert.csv", _csv(("k_tuple", "n", "max_residual"), rows))
    return 0


def _cmd_cover(args) -> int:
    S = parse_set_file(args.set_file)
    rows = []
    for eps in _parse_floats(args.epsilon):
        rep = grid_cover_count(S, eps, probe_density=args.probe_density, eq_tol=args.eq_tol)
        rows.append((_fmt(rep.epsilon), rep.grid_side, rep.cell_count))
    _write_outputs(args, args.out, _csv(("epsilon", "grid_side", "cell_count"), rows))
    return 0


def _cmd_discrepancy(args) -> int:
    alpha = _load_alpha(args.alpha)
    rows = []
    for N in _parse_ints(args.N):
        pts = orbit_points((0.0,) * len(alpha), tuple(alpha), 1, N)
        d = classical_discrepancy(pts, family=args.family, grid=args.grid)
        rows.append((N, _fmt(d)))
    _write_outputs(args, args.out, _csv(("N", "discrepancy"), rows))
    return 0


def _cmd_dynamics(args) -> int:
    try:
        spec = parse_operator_file(args.spec_file)
    except ParseError as exc:
        print(f"error: {args.spec_file}: {exc}", file=sys.stderr)
        return 2
    size = 2 * spec.L + 1
    psi0 = np.zeros(size)
    psi0[spec.L] = 1.0
    ts = _parse_floats(args.T_grid)
    try:
        fit = moment_growth_fit(spec, psi0, args.p, ts)
    except EdgeMassError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    rows = [
        (_fmt(t), _fmt(v), _fmt(e))
        for t, v, e in zip(fit.series.times, fit.series.values, fit.edge_masses)
    ]
    _write_outputs(args, args.out, _csv(("t", "moment", "edge_mass"), rows))
    report = [
        "p: " + _fmt(fit.series.p),
        "ballistic_slope: " + _fmt(fit.ballistic_slope),
        "loglog_exponent: " + _fmt(fit.loglog_exponent),
        "spectral_bound: " + _fmt(fit.series.spectral_bound),
    ]
    _atomic_write(args.out + ".fit.txt", "\n".join(report) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kronorbit", description=__doc__)
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", required=True)

    sp = sub.add_parser("count", help="orbit hit counts over an N grid")
    sp.add_argument("--alpha", required=True, help="comma list or file of frequencies")
    sp.add_argument("--theta", default="", help="comma list; defaults to 0")
    sp.add_argument("--N", required=True, help="single N or comma grid")
    sp.add_argument("--set-file", required=True)
    sp.add_argument("--eq-tol", type=float, default=0.0)
    common(sp)
    sp.set_defaults(func=_cmd_count)

    sp = sub.add_parser("sweep", help="count over an N grid plus exponent fit")
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--theta", default="")
    sp.add_argument("--N", required=True)
    sp.add_argument("--set-file", required=True)
    sp.add_argument("--eq-tol", type=float, default=0.0)
    common(sp)
    sp.set_defaults(func=_cmd_sweep)

    sp = sub.add_parser("dioph", help="WDC/DC margin scan")
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--tau", type=float, required=True)
    sp.add_argument("--scan-bound", type=int, required=True)
    sp.add_argument("--kind", choices=("wdc", "dc"), default="wdc")
    common(sp)
    sp.set_defaults(func=_cmd_dioph)

    sp = sub.add_parser("lowerbound", help="hyperplane witness and hit certificate")
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--b", type=int, default=None)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--epsilon", type=float, default=0.1)
    sp.add_argument("--delta-min", type=float, default=0.1)
    common(sp)
    sp.set_defaults(func=_cmd_lowerbound)

    sp = sub.add_parser("cover", help="grid cover counts over an epsilon grid")
    sp.add_argument("--set-file", required=True)
    sp.add_argument("--epsilon", required=True, help="comma list of cell sides")
    sp.add_argument("--probe-density", type=int, default=4)
    sp.add_argument("--eq-tol", type=float, default=0.0)
    common(sp)
    sp.set_defaults(func=_cmd_cover)

    sp = sub.add_parser("discrepancy", help="classical discrepancy of an orbit")
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--N", required=True)
    sp.add_argument("--family", choices=("star", "anchored-boxes-approx"), default="star")
    sp.add_argument("--grid", type=int, default=256)
    common(sp)
    sp.set_defaults(func=_cmd_discrepancy)

    sp = sub.add_parser("dynamics", help="moment series and growth fit")
    sp.add_argument("--spec-file", required=True)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--T-grid", required=True, help="comma list of times")
    common(sp)
    sp.set_defaults(func=_cmd_dynamics)

    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
