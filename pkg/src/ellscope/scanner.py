"""Grid scans of ellipticity domains, boundary tracing, region verification.

A scan walks a rectangular grid on one of the stretch-space charts,
classifies every node with either the sufficient criterion or the
rank-one oracle, and records normalized margins. Region verification
samples a named region with a deterministic low-discrepancy sequence
and tallies verdicts.

The sufficient criterion certifies regions, not isolated points: its
inequalities imply ellipticity on any stretch set they cover in full.
A sufficient-method scan therefore certifies the largest sublevel
region of the squared deviatoric log magnitude whose sampled nodes all
pass, marks the nodes inside it Elliptic, and downgrades pointwise
passes beyond it to Indeterminate (the criterion neither confirms nor
refutes those). Margins and worst-condition labels always stay
pointwise, so boundary nodes still report their true zero margins.
Oracle-method scans are pointwise throughout.

Boundary tracing runs marching squares on the Elliptic/non-Elliptic
indicator. Vertices sit on grid edges between nodes of differing
status, placed by linear margin interpolation when the margin changes
sign across the edge and at the edge midpoint otherwise.

Scans are row-major and single-pass; identical requests produce
identical results regardless of the compiled-kernel thread count (the
oracle merges its parallel slices in a fixed order).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ._seq import halton
from .charts import CHART_DIMS, chart_to_stretches
from .criteria import DEFAULT_TOL, Status, check_point
from .energies import EnergySpec, dev_log_norm_sq
from .oracle import OracleConfig, min_acoustic

BRUHNS_CUBE = (0.2117, 1.3956)

REGIONS = ("prop2d", "prop3d-ellipse", "bruhns-cube")


@dataclass(frozen=True)
class ScanRequest:
    """A rectangular grid scan over a chart.

    ranges and resolution have one entry per chart axis; nodes are
    inclusive linspaces. method is "sufficient" (criterion margins) or
    "oracle" (rank-one probe minimum). tol defaults to 1e-9 for the
    criterion and 1e-6 for the oracle.
    """

    spec: EnergySpec
    chart: str
    ranges: tuple[tuple[float, float], ...]
    resolution: tuple[int, ...]
    method: str = "sufficient"
    tol: float | None = None
    oracle_grid: int = 24
    oracle_refine: int = 3

    def __post_init__(self):
        if self.chart not in CHART_DIMS:
            raise ValueError(f"unknown chart '{self.chart}'")
        dim = CHART_DIMS[self.chart]
        if len(self.ranges) != dim or len(self.resolution) != dim:
            raise ValueError(f"chart '{self.chart}' needs {dim} ranges and resolutions")
        for (lo, hi) in self.ranges:
            if not lo < hi:
                raise ValueError(f"range must satisfy lo < hi, got [{lo}, {hi}]")
        for r in self.resolution:
            if r < 2:
                raise ValueError(f"resolution must be >= 2, got {r}")
        if self.method not in ("sufficient", "oracle"):
            raise ValueError(f"method must be 'sufficient' or 'oracle', got '{self.method}'")

    @property
    def effective_tol(self) -> float:
        if self.tol is not None:
            return self.tol
        return DEFAULT_TOL if self.method == "sufficient" else 1e-6


@dataclass(frozen=True)
class DomainScanResult:
    request: ScanRequest
    axes: tuple[np.ndarray, ...]
    status: np.ndarray          # '<U1' letters E/V/I, shape = resolution
    margin: np.ndarray          # worst normalized margin per node (NaN if I)
    worst: np.ndarray           # label of the worst condition per node
    cert_level: float | None = None  # sufficient scans: certified sublevel of
                                     # the squared deviatoric log magnitude
    elapsed: float = field(compare=False, default=0.0)

    @property
    def dim(self) -> int:
        return len(self.axes)


def scan_grid(request: ScanRequest) -> DomainScanResult:
    """Classify every grid node of the request, row-major.

    Sufficient-method scans run in two passes. The first evaluates the
    criterion margins at every node. The second finds the certification
    level: the smallest squared deviatoric log magnitude over nodes
    that fail (or cannot be evaluated), written to cert_level. Nodes at
    or beyond that level cannot sit inside a fully passing sublevel
    region, so pointwise passes there are downgraded to Indeterminate;
    their pointwise margins and labels are kept. With no failing node
    the level is +inf and every passing node stays Elliptic.
    """
    t0 = time.perf_counter()
    axes = tuple(np.linspace(lo, hi, r)
                 for (lo, hi), r in zip(request.ranges, request.resolution))
    shape = tuple(request.resolution)
    status = np.full(shape, "I", dtype="<U1")
    margin = np.full(shape, math.nan)
    worst = np.full(shape, "error", dtype="<U12")
    devsq = np.full(shape, math.nan)
    tol = request.effective_tol
    ocfg = OracleConfig(grid=request.oracle_grid, refine=request.oracle_refine, tol=tol)

    for idx in np.ndindex(*shape):
        coords = tuple(float(axes[d][idx[d]]) for d in range(len(shape)))
        try:
            s = chart_to_stretches(request.chart, coords)
            devsq[idx] = dev_log_norm_sq(s)
            if request.method == "sufficient":
                v = check_point(request.spec, s, tol=tol)
                status[idx] = v.status.letter
                margin[idx] = v.worst_margin
                worst[idx] = v.worst_label
            else:
                ov = min_acoustic(request.spec, s, ocfg)
                status[idx] = ov.status.letter
                margin[idx] = ov.min_value
                worst[idx] = "oracle"
        except ValueError:
            # unmappable or unclassifiable node: recorded, never fatal
            status[idx] = "I"
            margin[idx] = math.nan
            worst[idx] = "error"

    cert_level = None
    if request.method == "sufficient":
        blocking = devsq[status != "E"]
        blocking = blocking[~np.isnan(blocking)]
        cert_level = float(blocking.min()) if blocking.size else math.inf
        status[(status == "E") & (devsq >= cert_level)] = "I"

    return DomainScanResult(request=request, axes=axes, status=status,
                            margin=margin, worst=worst, cert_level=cert_level,
                            elapsed=time.perf_counter() - t0)


@dataclass(frozen=True)
class BoundaryPolyline:
    """A traced zero-margin contour: vertices (k, dim), closed flag, arc length."""

    vertices: np.ndarray
    closed: bool
    length: float


def _interp(x0: float, x1: float, m0: float, m1: float) -> float:
    t = m0 / (m0 - m1)
    return x0 + t * (x1 - x0)


def _edge_vertex(x0: float, x1: float, m0: float, m1: float) -> float:
    """Boundary coordinate on an edge between nodes of differing status.

    Linear margin interpolation when the margin changes sign across the
    edge; the midpoint otherwise (the status can flip without a margin
    sign change when a pointwise pass falls outside the certified
    region, and margins can be NaN on indeterminate nodes).
    """
    if math.isnan(m0) or math.isnan(m1) or (m0 >= 0.0) == (m1 >= 0.0):
        return 0.5 * (x0 + x1)
    return _interp(x0, x1, m0, m1)


def _trace_1d(x: np.ndarray, m: np.ndarray, inside: np.ndarray) -> list[BoundaryPolyline]:
    out = []
    for i in range(x.size - 1):
        if inside[i] != inside[i + 1]:
            xc = _edge_vertex(x[i], x[i + 1], m[i], m[i + 1])
            out.append(BoundaryPolyline(np.array([[xc]]), closed=False, length=0.0))
    return out


def _trace_2d(xs: np.ndarray, ys: np.ndarray, m: np.ndarray,
              inside: np.ndarray) -> list[BoundaryPolyline]:
    """Marching squares on the inside indicator with margin-guided vertices.

    Saddle cells (diagonal indicator patterns) are split according to
    the sign of the cell-average margin. Segment endpoints are keyed by
    the grid edge they sit on, so shared vertices stitch exactly.
    """
    nx, ny = m.shape

    # edge key: ("h", i, j) between nodes (i,j)-(i+1,j); ("v", i, j) between (i,j)-(i,j+1)
    def h_edge(i, j):
        return ("h", i, j)

    def v_edge(i, j):
        return ("v", i, j)

    def edge_point(kind, i, j):
        if kind == "h":
            return (_edge_vertex(xs[i], xs[i + 1], m[i, j], m[i + 1, j]), ys[j])
        return (xs[i], _edge_vertex(ys[j], ys[j + 1], m[i, j], m[i, j + 1]))

    segments = []
    for i in range(nx - 1):
        for j in range(ny - 1):
            c00, c10 = m[i, j], m[i + 1, j]
            c01, c11 = m[i, j + 1], m[i + 1, j + 1]
            code = (int(inside[i, j]) | (int(inside[i + 1, j]) << 1)
                    | (int(inside[i + 1, j + 1]) << 2) | (int(inside[i, j + 1]) << 3))
            if code in (0, 15):
                continue
            bottom = h_edge(i, j)
            top = h_edge(i, j + 1)
            left = v_edge(i, j)
            right = v_edge(i + 1, j)
            if code in (1, 14):
                segments.append((left, bottom))
            elif code in (2, 13):
                segments.append((bottom, right))
            elif code in (3, 12):
                segments.append((left, right))
            elif code in (4, 11):
                segments.append((right, top))
            elif code in (6, 9):
                segments.append((bottom, top))
            elif code in (7, 8):
                segments.append((left, top))
            elif code in (5, 10):
                avg = 0.25 * (c00 + c10 + c01 + c11)
                pos_diag_00 = code == 5  # corners (0,0) and (1,1) inside
                if (avg >= 0.0) == pos_diag_00:
                    segments.append((left, top))
                    segments.append((bottom, right))
                else:
                    segments.append((left, bottom))
                    segments.append((right, top))

    # stitch segments into chains over shared edge keys
    adj: dict = {}
    for a, b in segments:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)

    used = set()
    polylines = []

    def walk(start):
        chain = [start]
        prev = None
        cur = start
        while True:
            nxt = None
            for cand in adj[cur]:
                if cand != prev and (min(cur, cand), max(cur, cand)) not in used:
                    nxt = cand
                    break
            if nxt is None:
                return chain, False
            used.add((min(cur, nxt), max(cur, nxt)))
            chain.append(nxt)
            if nxt == start:
                return chain, True
            prev, cur = cur, nxt

    ends = sorted(k for k, v in adj.items() if len(v) == 1)
    for start in ends:
        if any((min(start, o), max(start, o)) not in used for o in adj[start]):
            chain, closed = walk(start)
            if len(chain) > 1:
                polylines.append((chain, closed))
    starts = sorted(adj.keys())
    for start in starts:
        if any((min(start, o), max(start, o)) not in used for o in adj[start]):
            chain, closed = walk(start)
            if len(chain) > 1:
                polylines.append((chain, closed))

    out = []
    for chain, closed in polylines:
        pts = np.array([edge_point(*k) for k in chain])
        seglen = np.sqrt(np.sum(np.diff(pts, axis=0) ** 2, axis=1))
        out.append(BoundaryPolyline(pts, closed=closed, length=float(seglen.sum())))
    out.sort(key=lambda p: -p.length)
    return out


def trace_margins(axes: tuple[np.ndarray, ...], margin: np.ndarray,
                  status: np.ndarray | None = None) -> list[BoundaryPolyline]:
    """trace_boundary on bare axis vectors, a margin field, and optional statuses.

    With status letters the inside set is the Elliptic nodes; without,
    it is the nodes of nonnegative margin (NaN margins count outside).
    """
    if status is not None:
        inside = np.asarray(status) == "E"
    else:
        inside = np.zeros(margin.shape, dtype=bool)
        ok = ~np.isnan(margin)
        inside[ok] = margin[ok] >= 0.0
    if len(axes) == 1:
        return _trace_1d(axes[0], margin, inside)
    if len(axes) == 2:
        return _trace_2d(axes[0], axes[1], margin, inside)
    raise ValueError("boundary tracing supports 1d and 2d scans only")


def trace_boundary(result: DomainScanResult) -> list[BoundaryPolyline]:
    """Extract domain-boundary polylines from a 1d or 2d scan.

    Vertices lie on grid edges between Elliptic and non-Elliptic nodes,
    placed by linear margin interpolation when the margin changes sign
    across the edge and at the edge midpoint otherwise. Polylines are
    returned longest first; a single-status scan yields [].
    """
    return trace_margins(result.axes, result.margin, result.status)


@dataclass(frozen=True)
class RegionReport:
    """Tally of verdicts over a sampled region.

    mismatches counts samples whose verdict disagrees with the region's
    known ground truth; it is None for regions without one.
    """

    region: str
    method: str
    samples: int
    n_elliptic: int
    n_violated: int
    n_indeterminate: int
    worst_margin: float
    worst_location: tuple[float, ...]
    mismatches: int | None = None
    elapsed: float = field(compare=False, default=0.0)

    def to_dict(self) -> dict:
        return {
            "region": self.region, "method": self.method,
            "samples": self.samples, "elliptic": self.n_elliptic,
            "violated": self.n_violated, "indeterminate": self.n_indeterminate,
            "worst_margin": self.worst_margin,
            "worst_location": list(self.worst_location),
            "mismatches": self.mismatches,
        }


def _tally(spec: EnergySpec, region: str, method: str, points, to_stretches,
           tol: float | None, oracle_grid: int, oracle_refine: int,
           ground_truth=None) -> RegionReport:
    t0 = time.perf_counter()
    eff_tol = tol if tol is not None else (DEFAULT_TOL if method == "sufficient" else 1e-6)
    ocfg = OracleConfig(grid=oracle_grid, refine=oracle_refine, tol=eff_tol)
    counts = {Status.ELLIPTIC: 0, Status.VIOLATED: 0, Status.INDETERMINATE: 0}
    worst = math.inf
    worst_loc: tuple[float, ...] = ()
    npts = 0
    mismatches = 0 if ground_truth is not None else None
    for coords in points:
        npts += 1
        s = to_stretches(coords)
        if method == "sufficient":
            v = check_point(spec, s, tol=eff_tol)
            st, mg = v.status, v.worst_margin
        else:
            ov = min_acoustic(spec, s, ocfg)
            st, mg = ov.status, ov.min_value
        counts[st] += 1
        if ground_truth is not None:
            expected = ground_truth(coords)
            if expected is not None and expected != st:
                mismatches += 1
        if not math.isnan(mg) and mg < worst:
            worst = mg
            worst_loc = tuple(float(c) for c in coords)
    return RegionReport(region=region, method=method, samples=npts,
                        n_elliptic=counts[Status.ELLIPTIC],
                        n_violated=counts[Status.VIOLATED],
                        n_indeterminate=counts[Status.INDETERMINATE],
                        worst_margin=worst, worst_location=worst_loc,
                        mismatches=mismatches, elapsed=time.perf_counter() - t0)


def verify_region(spec: EnergySpec, region: str, method: str = "sufficient",
                  samples: int = 10000, tol: float | None = None,
                  oracle_grid: int = 24, oracle_refine: int = 3) -> RegionReport:
    """Sample a named region and tally the verdicts.

    Regions:
      prop2d         the 2d log-ratio segment logt in [-2, 2] (Halton)
      prop3d-ellipse the chart disk p <= sqrt(2), theta in [0, 2 pi) (Halton)
      bruhns-cube    the stretch cube [0.2117, 1.3956]^3, gridded with
                     round(samples^(1/3)) nodes per axis (faces included,
                     where the margins are smallest)
    """
    band = 1e-9
    if region == "prop2d":
        u = halton(samples, 1)[:, 0]
        pts = [(-2.0 + 4.0 * v,) for v in u]

        def gt(coords):
            t = abs(coords[0])
            if t < 1.0 - band:
                return Status.ELLIPTIC
            if t > 1.0 + band:
                return Status.VIOLATED
            return None

        return _tally(spec, region, method, pts,
                      lambda c: chart_to_stretches("logt2d", c),
                      tol, oracle_grid, oracle_refine, ground_truth=gt)
    if region == "prop3d-ellipse":
        uv = halton(samples, 2)
        pts = [(math.sqrt(2.0) * u, 2.0 * math.pi * v) for u, v in uv]
        return _tally(spec, region, method, pts,
                      lambda c: chart_to_stretches("ptheta", c),
                      tol, oracle_grid, oracle_refine,
                      ground_truth=lambda c: Status.ELLIPTIC)
    if region == "bruhns-cube":
        m = max(2, round(samples ** (1.0 / 3.0)))
        ax = np.linspace(BRUHNS_CUBE[0], BRUHNS_CUBE[1], m)
        pts = [(float(ax[i]), float(ax[j]), float(ax[k]))
               for i in range(m) for j in range(m) for k in range(m)]
        return _tally(spec, region, method, pts, lambda c: c,
                      tol, oracle_grid, oracle_refine,
                      ground_truth=lambda c: Status.ELLIPTIC)
    raise ValueError(f"unknown region '{region}', expected one of {REGIONS}")


def verify_logratio_band(spec: EnergySpec, logt_max: float, method: str = "sufficient",
                         samples: int = 10000, tol: float | None = None,
                         split_at: float | None = None) -> RegionReport:
    """Tally verdicts for 2d states (e^t, 1) with |t| <= logt_max (Halton).

    With split_at set, samples are checked against the ground truth
    Elliptic for |t| < split_at and Violated beyond; without it the
    expectation is Elliptic everywhere.
    """
    u = halton(samples, 1)[:, 0]
    pts = [(logt_max * (2.0 * v - 1.0),) for v in u]
    band = 1e-9

    if split_at is None:
        gt = lambda c: Status.ELLIPTIC
    else:
        def gt(coords):
            t = abs(coords[0])
            if t < split_at - band:
                return Status.ELLIPTIC
            if t > split_at + band:
                return Status.VIOLATED
            return None

    return _tally(spec, f"band|logt|<={logt_max:g}", method, pts,
                  lambda c: chart_to_stretches("logt2d", c), tol, 24, 3,
                  ground_truth=gt)
