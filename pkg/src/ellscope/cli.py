"""Command line interface.

Subcommands:
  check    classify one stretch state with the sufficient criterion
  scan     classify a chart grid, write CSV (optionally SVG)
  trace    extract boundary polylines from a scan CSV
  verify   run a named verification suite
  oracle   rank-one probe minimization at one stretch state

Exit codes: 0 Elliptic (or suite passed), 2 Violated (or suite failed),
3 Indeterminate, 1 usage or input error. CSV floats carry 17 significant
digits so byte-identical reruns are byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__
from . import bounds
from .charts import CHART_DIMS
from .criteria import check_point
from .energies import make_builtin
from .oracle import OracleConfig, min_acoustic
from .scanner import (BoundaryPolyline, DomainScanResult, ScanRequest,
                      scan_grid, trace_boundary, trace_margins,
                      verify_logratio_band, verify_region)

_AXIS_NAMES = ("x", "y", "z")

DEFAULT_RANGES = {
    "ab": ((-2.0, 2.0), (-2.0, 2.0)),
    "ptheta": ((0.0, math.sqrt(2.0)), (0.0, 2.0 * math.pi)),
    "logt2d": ((-2.0, 2.0),),
    "cone": ((0.0, 2.0 * math.pi), (0.5, 2.0), (0.0, math.sqrt(2.0))),
}


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract here is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _parse_params(raw: str | None) -> dict:
    out = {}
    if not raw:
        return out
    for item in raw.split(","):
        if not item:
            continue
        if "=" not in item:
            raise ValueError(f"bad parameter '{item}', expected key=value")
        k, v = item.split("=", 1)
        out[k.strip()] = float(v)
    return out


def _build_energy(name: str, params: dict, dim: int | None):
    if name in ("dev-hencky", "quad-hencky") and dim is not None:
        params.setdefault("n", dim)
    spec = make_builtin(name, params)
    if dim is not None and spec.n is not None and spec.n != dim:
        raise ValueError(f"energy '{name}' is {spec.n}d, got --dim {dim}")
    return spec


def _report(args, command: str, inputs: dict, outputs: dict, t0: float) -> dict:
    return {
        "command": command,
        "version": __version__,
        "inputs": inputs,
        "outputs": outputs,
        "elapsed_s": round(time.perf_counter() - t0, 6),
    }


def _emit(args, report: dict, human_lines: list[str]):
    if getattr(args, "json", False):
        print(json.dumps(report, indent=2))
    else:
        for line in human_lines:
            print(line)


# ---------------------------------------------------------------------------
# CSV and SVG emitters

def write_scan_csv(result: DomainScanResult, path: str):
    """Row-major scan CSV: coordinate columns, verdict letter, margin, label."""
    dim = result.dim
    cols = list(_AXIS_NAMES[:dim]) + ["verdict", "min_margin", "worst_condition"]
    lines = [",".join(cols)]
    for idx in np.ndindex(*result.status.shape):
        coords = [_fmt(float(result.axes[d][idx[d]])) for d in range(dim)]
        lines.append(",".join(coords + [result.status[idx],
                                        _fmt(float(result.margin[idx])),
                                        str(result.worst[idx])]))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def read_scan_csv(path: str):
    """Recover (axes, margin, status) from a scan CSV written by write_scan_csv."""
    with open(path) as f:
        header = f.readline().strip().split(",")
        rows = [line.strip().split(",") for line in f if line.strip()]
    try:
        ncoord = header.index("verdict")
    except ValueError:
        raise ValueError(f"{path} is not a scan CSV (no verdict column)")
    if ncoord not in (1, 2):
        raise ValueError("trace supports 1d and 2d scan CSVs")
    coords = np.array([[float(r[d]) for d in range(ncoord)] for r in rows])
    margin = np.array([float(r[ncoord + 1]) for r in rows])
    status = np.array([r[ncoord] for r in rows], dtype="<U1")
    axes = []
    shape = []
    for d in range(ncoord):
        ax = np.unique(coords[:, d])
        axes.append(ax)
        shape.append(ax.size)
    if len(rows) != int(np.prod(shape)):
        raise ValueError(f"{path} is not a complete grid")
    return tuple(axes), margin.reshape(*shape), status.reshape(*shape)


def write_boundary_csv(polylines: list[BoundaryPolyline], path: str, dim: int):
    cols = ["polyline_id", "vertex"] + list(_AXIS_NAMES[:dim]) + ["closed"]
    lines = [",".join(cols)]
    for pid, poly in enumerate(polylines):
        for k, v in enumerate(poly.vertices):
            coords = [_fmt(float(c)) for c in v]
            lines.append(",".join([str(pid), str(k)] + coords
                                  + ["1" if poly.closed else "0"]))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


_SVG_FILL = {"E": "#a6cbe3", "V": "#f2b08c", "I": "#d9d9d9"}


def write_scan_svg(result_or_axes, path: str, boundary=None,
                   overlay_ellipse: bool = False, status=None):
    """Flat SVG of a 2d scan: status rects, boundary polylines, overlays.

    Accepts a DomainScanResult, or (axes, status-array) when called with
    bare tracing data. Run-length merges equal-status rects per row.
    No plotting library involved; output is deterministic.
    """
    if isinstance(result_or_axes, DomainScanResult):
        axes = result_or_axes.axes
        status = result_or_axes.status
    else:
        axes = result_or_axes
    if len(axes) != 2:
        raise ValueError("SVG output supports 2d scans only")
    xs, ys = axes
    w, h = 640.0, 640.0
    x0, x1 = float(xs[0]), float(xs[-1])
    y0, y1 = float(ys[0]), float(ys[-1])
    dx = (xs[1] - xs[0]) if xs.size > 1 else 1.0
    dy = (ys[1] - ys[0]) if ys.size > 1 else 1.0

    def px(x):
        return (x - (x0 - dx / 2)) / ((x1 - x0) + dx) * w

    def py(y):
        return h - (y - (y0 - dy / 2)) / ((y1 - y0) + dy) * h

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:g}" '
             f'height="{h:g}" viewBox="0 0 {w:g} {h:g}">']
    if status is not None:
        for j in range(ys.size):
            i = 0
            while i < xs.size:
                k = i
                while k + 1 < xs.size and status[k + 1, j] == status[i, j]:
                    k += 1
                xl = px(xs[i] - dx / 2)
                xr = px(xs[k] + dx / 2)
                yt = py(ys[j] + dy / 2)
                yb = py(ys[j] - dy / 2)
                fill = _SVG_FILL.get(str(status[i, j]), "#ffffff")
                parts.append(f'<rect x="{xl:.2f}" y="{yt:.2f}" '
                             f'width="{xr - xl:.2f}" height="{yb - yt:.2f}" '
                             f'fill="{fill}"/>')
                i = k + 1
    if overlay_ellipse:
        ts = np.linspace(0.0, 2.0 * math.pi, 361)
        r = math.sqrt(2.0 / 3.0) * math.sqrt(2.0)
        pts = []
        for t in ts:
            a = r * math.cos(t - math.pi / 6.0)
            b = -r * math.cos(t + math.pi / 6.0)
            pts.append(f"{px(a):.2f},{py(b):.2f}")
        parts.append(f'<polyline points="{" ".join(pts)}" fill="none" '
                     f'stroke="#444444" stroke-width="1.2" stroke-dasharray="6 4"/>')
    for poly in boundary or []:
        pts = " ".join(f"{px(v[0]):.2f},{py(v[1]):.2f}" for v in poly.vertices)
        parts.append(f'<polyline points="{pts}" fill="none" '
                     f'stroke="#111111" stroke-width="1.6"/>')
    parts.append("</svg>")
    with open(path, "w") as f:
        f.write("\n".join(parts) + "\n")


# ---------------------------------------------------------------------------
# subcommands

def _cmd_check(args) -> int:
    t0 = time.perf_counter()
    stretches = tuple(float(v) for v in args.stretches.split(","))
    dim = args.dim or len(stretches)
    if dim != len(stretches):
        raise ValueError(f"--dim {args.dim} does not match {len(stretches)} stretches")
    spec = _build_energy(args.energy, _parse_params(args.params), dim)
    verdict = check_point(spec, stretches, tol=args.tol)
    outputs = verdict.to_dict()
    lines = [f"{spec.name} at ({', '.join(_fmt(v) for v in stretches)}): "
             f"{verdict.status.value}",
             f"  worst margin {verdict.worst_margin:.6e} ({verdict.worst_label})",
             f"  te margins: {['%.6e' % m for m in verdict.te_margins]}"]
    for kind, vals in (("be", verdict.be_margins), ("c3", verdict.c3_margins),
                       ("c4", verdict.c4_margins)):
        pairs = ", ".join(f"{i + 1}{j + 1}: {m:.6e}"
                          for (i, j), m in zip(verdict.pairs, vals))
        lines.append(f"  {kind} margins: {pairs}")
    if args.oracle:
        ov = min_acoustic(spec, stretches,
                          OracleConfig(grid=args.grid, refine=args.refine))
        outputs["oracle"] = ov.to_dict()
        lines.append(f"  oracle: {ov.status.value}, min form {ov.min_value:.6e}")
    _emit(args, _report(args, "check", {
        "energy": args.energy, "stretches": list(stretches),
        "params": spec.params if isinstance(spec.params, dict) else dict(spec.params),
        "tol": args.tol,
    }, outputs, t0), lines)
    return verdict.status.exit_code


def _cmd_scan(args) -> int:
    t0 = time.perf_counter()
    chart = args.chart
    dim = CHART_DIMS[chart]
    if args.range:
        parts = args.range.split(",")
        if len(parts) != dim:
            raise ValueError(f"chart '{chart}' needs {dim} ranges, got {len(parts)}")
        ranges = []
        for p in parts:
            lo, _, hi = p.partition(":")
            ranges.append((float(lo), float(hi)))
        ranges = tuple(ranges)
    else:
        ranges = DEFAULT_RANGES[chart]
    res_parts = [int(v) for v in args.res.split(",")]
    if len(res_parts) == 1:
        res = tuple(res_parts * dim)
    elif len(res_parts) == dim:
        res = tuple(res_parts)
    else:
        raise ValueError(f"chart '{chart}' needs 1 or {dim} resolutions")

    n = 2 if chart == "logt2d" else 3
    if args.dim is not None and args.dim != n:
        raise ValueError(f"chart '{chart}' implies {n}d stretches, got --dim {args.dim}")
    spec = _build_energy(args.energy, _parse_params(args.params), n)
    req = ScanRequest(spec=spec, chart=chart, ranges=ranges, resolution=res,
                      method=args.method, tol=args.tol,
                      oracle_grid=args.grid, oracle_refine=args.refine)
    result = scan_grid(req)
    write_scan_csv(result, args.out)

    counts = {letter: int(np.sum(result.status == letter)) for letter in "EVI"}
    outputs = {"csv": args.out, "cells": int(result.status.size), "counts": counts}
    if result.cert_level is not None:
        outputs["certified_dev_sq"] = result.cert_level
    lines = [f"scan {chart} {'x'.join(str(r) for r in res)} [{args.method}]: "
             f"E={counts['E']} V={counts['V']} I={counts['I']} "
             f"({result.elapsed:.2f}s) -> {args.out}"]

    if args.svg:
        if dim != 2:
            raise ValueError("--svg requires a 2d chart")
        if args.overlay == "ellipse" and chart != "ab":
            raise ValueError("--overlay ellipse applies to the ab chart")
        boundary = trace_boundary(result)
        write_scan_svg(result, args.svg, boundary=boundary,
                       overlay_ellipse=args.overlay == "ellipse")
        outputs["svg"] = args.svg
        lines.append(f"svg ({len(boundary)} boundary polylines) -> {args.svg}")

    _emit(args, _report(args, "scan", {
        "energy": args.energy, "chart": chart,
        "ranges": [list(r) for r in ranges], "res": list(res),
        "method": args.method,
    }, outputs, t0), lines)
    return 0


def _cmd_trace(args) -> int:
    t0 = time.perf_counter()
    axes, margin, status = read_scan_csv(args.infile)
    polylines = trace_margins(axes, margin, status)
    write_boundary_csv(polylines, args.out, dim=len(axes))
    outputs = {"polylines": len(polylines),
               "lengths": [round(p.length, 6) for p in polylines],
               "csv": args.out}
    lines = [f"traced {len(polylines)} boundary polylines -> {args.out}"]
    if args.svg:
        if len(axes) != 2:
            raise ValueError("--svg requires a 2d scan CSV")
        write_scan_svg(tuple(axes), args.svg, boundary=polylines,
                       overlay_ellipse=args.overlay == "ellipse", status=status)
        outputs["svg"] = args.svg
        lines.append(f"svg -> {args.svg}")
    _emit(args, _report(args, "trace", {"in": args.infile}, outputs, t0), lines)
    return 0


def _verify_lines(checks: list[tuple[str, bool, str]]) -> list[str]:
    out = []
    for name, ok, detail in checks:
        out.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return out


def _cmd_verify(args) -> int:
    t0 = time.perf_counter()
    target = args.target
    checks: list[tuple[str, bool, str]] = []

    if target == "prop2d":
        spec = make_builtin("dev-hencky", {"n": 2})
        rep = verify_region(spec, "prop2d", samples=args.samples)
        checks.append((
            "2d log-ratio segment split at |logt| = 1",
            rep.mismatches == 0 and rep.n_indeterminate == 0,
            f"E={rep.n_elliptic} V={rep.n_violated} I={rep.n_indeterminate} "
            f"mismatches={rep.mismatches} worst={rep.worst_margin:.3e} "
            f"@ logt={rep.worst_location[0]:.6f}"))
    elif target == "prop3d":
        spec = make_builtin("dev-hencky", {"n": 3})
        rep = verify_region(spec, "prop3d-ellipse", samples=args.samples)
        checks.append((
            "chart disk p <= sqrt(2) all Elliptic",
            rep.mismatches == 0 and rep.n_elliptic == rep.samples
            and rep.worst_margin >= -1e-9,
            f"E={rep.n_elliptic}/{rep.samples} worst={rep.worst_margin:.3e} "
            f"@ (p, theta)={tuple(round(v, 6) for v in rep.worst_location)}"))
    elif target == "appendix":
        for k in (1, 2, 3):
            r = bounds.verify_nonneg(k, resolution=args.resolution)
            checks.append((
                f"reduced condition {k} nonnegative",
                r.refined_min >= -1e-9,
                f"grid min {r.grid_min:.3e}, refined {r.refined_min:.3e} "
                f"@ (p, theta)=({r.refined_argmin[0]:.6f}, {r.refined_argmin[1]:.6f})"))
        r1 = bounds.verify_nonneg(1, resolution=args.resolution)
        at_corner = (abs(r1.refined_argmin[0] - math.sqrt(2.0)) <= 1e-6
                     and abs(r1.refined_argmin[1] - math.pi) <= 1e-6)
        checks.append((
            "condition 1 minimum at (sqrt(2), pi)",
            at_corner and abs(r1.refined_min) <= 1e-9,
            f"refined min {r1.refined_min:.3e} @ ({r1.refined_argmin[0]:.8f}, "
            f"{r1.refined_argmin[1]:.8f})"))
        prof = bounds.min_boundary_profile()
        checks.append((
            "edge-profile minimum matches closed form",
            abs(prof.refined_min - prof.closed_form) <= 1e-9
            and abs(prof.closed_form - 0.0573242) <= 1e-6,
            f"min {prof.refined_min:.10f} @ zeta={prof.refined_argmin:.8f}, "
            f"closed form {prof.closed_form:.10f}"))
        zg = np.linspace(0.0, bounds.SQRT2, 200)
        wg = np.linspace(0.0, bounds.SQRT2, 200)
        dr_min = min(bounds.acute_wedge_bound_dzeta(z, e) for z in zg for e in wg)
        checks.append((
            "wedge bound increasing in zeta",
            dr_min >= math.sqrt(2.0 / 3.0) - 1e-9,
            f"min d/dzeta {dr_min:.6f} (bound sqrt(2/3) = {math.sqrt(2 / 3):.6f})"))
        ds_max = max(bounds.obtuse_sector_bound_dvarpi(z, v) for z in zg for v in wg)
        lim = (math.sqrt(3.0) - 2.0) / math.sqrt(2.0)
        checks.append((
            "sector bound decreasing in varpi",
            ds_max <= lim + 1e-9,
            f"max d/dvarpi {ds_max:.6f} (bound {lim:.6f})"))
        for k in (1, 2, 3):
            sym = bounds.check_symmetry(k, samples=1000)
            checks.append((
                f"condition {k} symmetric under theta -> 2 pi - theta",
                sym.max_abs_diff <= 1e-12,
                f"max |diff| {sym.max_abs_diff:.2e}"))
    elif target == "bruhns-cube":
        spec = make_builtin("quad-hencky", {"mu": 1.0, "lame_lambda": 1.0})
        rep = verify_region(spec, "bruhns-cube", method="oracle",
                            samples=args.samples or 1000,
                            oracle_grid=args.grid, oracle_refine=args.refine)
        checks.append((
            "quadratic log energy elliptic on the stretch cube",
            rep.n_elliptic == rep.samples and rep.worst_margin >= -1e-6,
            f"E={rep.n_elliptic}/{rep.samples} worst={rep.worst_margin:.3e} "
            f"@ {tuple(round(v, 4) for v in rep.worst_location)}"))
    elif target == "exp-hencky":
        exp_spec = make_builtin("exp-hencky-iso-2", {"mu": 1.0, "k": 0.25})
        rep = verify_logratio_band(exp_spec, 3.0, samples=args.samples)
        checks.append((
            "exponentiated 2d energy (k=0.25) elliptic for |logt| <= 3",
            rep.n_elliptic == rep.samples and rep.worst_margin >= -1e-9,
            f"E={rep.n_elliptic}/{rep.samples} worst={rep.worst_margin:.3e}"))
        dev_spec = make_builtin("dev-hencky", {"n": 2})
        ctrl = verify_logratio_band(dev_spec, 3.0, samples=args.samples, split_at=1.0)
        checks.append((
            "k -> 0 control violated beyond |logt| = 1",
            ctrl.mismatches == 0 and ctrl.n_violated > 0,
            f"E={ctrl.n_elliptic} V={ctrl.n_violated} mismatches={ctrl.mismatches}"))
    else:
        raise ValueError(f"unknown verify target '{target}'")

    # comparisons against numpy scalars yield numpy bools; JSON needs plain ones
    checks = [(n, bool(ok), d) for n, ok, d in checks]
    all_ok = all(ok for _, ok, _ in checks)
    lines = _verify_lines(checks)
    lines.append(f"{'PASS' if all_ok else 'FAIL'}  {target}: "
                 f"{sum(ok for _, ok, _ in checks)}/{len(checks)} checks")
    _emit(args, _report(args, "verify", {"target": target},
                        {"checks": [{"name": n, "passed": ok, "detail": d}
                                    for n, ok, d in checks],
                         "passed": all_ok}, t0), lines)
    return 0 if all_ok else 2


def _cmd_oracle(args) -> int:
    t0 = time.perf_counter()
    stretches = tuple(float(v) for v in args.stretches.split(","))
    dim = args.dim or len(stretches)
    if dim != len(stretches):
        raise ValueError(f"--dim {args.dim} does not match {len(stretches)} stretches")
    spec = _build_energy(args.energy, _parse_params(args.params), dim)
    ov = min_acoustic(spec, stretches,
                      OracleConfig(grid=args.grid, refine=args.refine, tol=args.tol))
    lines = [f"{spec.name} at ({', '.join(_fmt(v) for v in stretches)}): "
             f"{ov.status.value} [oracle/{ov.method}]",
             f"  min rank-one form {ov.min_value:.9e} (step {ov.probe.step:.3e})",
             f"  xi  = ({', '.join('%.6f' % c for c in ov.probe.xi)})",
             f"  eta = ({', '.join('%.6f' % c for c in ov.probe.eta)})"]
    _emit(args, _report(args, "oracle", {
        "energy": args.energy, "stretches": list(stretches),
        "grid": args.grid, "refine": args.refine, "tol": args.tol,
    }, ov.to_dict(), t0), lines)
    return ov.status.exit_code


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ellscope",
                description="Legendre-Hadamard ellipticity checks for isotropic "
                            "hyperelastic energies in principal stretches")
    p.add_argument("--version", action="version", version=f"ellscope {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, tol_default):
        sp.add_argument("--energy", required=True,
                        help="catalog energy name (e.g. dev-hencky)")
        sp.add_argument("--params", default=None,
                        help="energy parameters, key=value[,key=value...]")
        sp.add_argument("--tol", type=float, default=tol_default)
        sp.add_argument("--json", action="store_true",
                        help="machine-readable run report on stdout")

    sp = sub.add_parser("check", help="classify one stretch state")
    common(sp, 1e-9)
    sp.add_argument("--dim", type=int, choices=(2, 3))
    sp.add_argument("--stretches", required=True, help="comma-separated stretches")
    sp.add_argument("--oracle", action="store_true",
                    help="also run the rank-one oracle")
    sp.add_argument("--grid", type=int, default=24)
    sp.add_argument("--refine", type=int, default=3)
    sp.set_defaults(fn=_cmd_check)

    sp = sub.add_parser("scan", help="classify a chart grid, write CSV")
    common(sp, None)
    sp.add_argument("--dim", type=int, choices=(2, 3),
                    help="stretch-space dimension (checked against the chart)")
    sp.add_argument("--chart", required=True, choices=sorted(CHART_DIMS))
    sp.add_argument("--range", default=None,
                    help="per-axis lo:hi, comma separated (chart default otherwise)")
    sp.add_argument("--res", default="100", help="per-axis node count")
    sp.add_argument("--method", choices=("sufficient", "oracle"), default="sufficient")
    sp.add_argument("--grid", type=int, default=24, help="oracle direction grid")
    sp.add_argument("--refine", type=int, default=3, help="oracle refinement stages")
    sp.add_argument("--out", required=True, help="scan CSV path")
    sp.add_argument("--svg", default=None, help="also render an SVG map")
    sp.add_argument("--overlay", choices=("ellipse",), default=None)
    sp.set_defaults(fn=_cmd_scan)

    sp = sub.add_parser("trace", help="boundary polylines from a scan CSV")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--out", required=True, help="boundary CSV path")
    sp.add_argument("--svg", default=None)
    sp.add_argument("--overlay", choices=("ellipse",), default=None)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(fn=_cmd_trace)

    sp = sub.add_parser("verify", help="run a named verification suite")
    sp.add_argument("target", choices=("prop2d", "prop3d", "appendix",
                                       "bruhns-cube", "exp-hencky"))
    sp.add_argument("--samples", type=int, default=10000)
    sp.add_argument("--resolution", type=int, default=500,
                    help="survey grid resolution (appendix)")
    sp.add_argument("--grid", type=int, default=24)
    sp.add_argument("--refine", type=int, default=3)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(fn=_cmd_verify)

    sp = sub.add_parser("oracle", help="rank-one probe minimization at one state")
    common(sp, 1e-6)
    sp.add_argument("--dim", type=int, choices=(2, 3))
    sp.add_argument("--stretches", required=True)
    sp.add_argument("--grid", type=int, default=24)
    sp.add_argument("--refine", type=int, default=3)
    sp.set_defaults(fn=_cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"ellscope: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
