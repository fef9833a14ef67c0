"""Map the certified 3d ellipticity region in log-ratio coordinates.

The chart is a = log(lam1/lam2), b = log(lam2/lam3). A sufficient-method
scan certifies the largest sublevel region of the squared deviatoric log
magnitude whose nodes all pass the criterion; as the grid refines, that
level approaches 2/3 from above — the ellipse a^2 + ab + b^2 <= 1.
Outputs land in demos/out/.
"""

import math
import os

import numpy as np

from ellscope import ScanRequest, scan_grid, trace_boundary
from ellscope.cli import write_boundary_csv, write_scan_csv, write_scan_svg
from ellscope.energies import make_builtin

OUT = os.path.join(os.path.dirname(__file__), "out")


def main():
    os.makedirs(OUT, exist_ok=True)
    dev3 = make_builtin("dev-hencky", {"n": 3})

    for res_n in (51, 101, 201):
        res = scan_grid(ScanRequest(spec=dev3, chart="ab",
                                    ranges=((-2.0, 2.0), (-2.0, 2.0)),
                                    resolution=(res_n, res_n)))
        counts = {s: int(np.sum(res.status == s)) for s in "EVI"}
        print(f"res {res_n:3d}: certified dev-log^2 <= {res.cert_level:.6f} "
              f"(ellipse level 2/3 = {2 / 3:.6f}), "
              f"E={counts['E']} V={counts['V']} undecided={counts['I']}")

    # trace the finest boundary and measure its distance to the ellipse
    boundary = trace_boundary(res)
    poly = boundary[0]
    q = np.sqrt(poly.vertices[:, 0] ** 2
                + poly.vertices[:, 0] * poly.vertices[:, 1]
                + poly.vertices[:, 1] ** 2)
    print(f"boundary: {len(boundary)} closed polyline, {poly.vertices.shape[0]} "
          f"vertices, invariant radius in [{q.min():.4f}, {q.max():.4f}]")

    write_scan_csv(res, os.path.join(OUT, "ab_scan.csv"))
    write_boundary_csv(boundary, os.path.join(OUT, "ab_boundary.csv"), dim=2)
    write_scan_svg(res, os.path.join(OUT, "ab_scan.svg"), boundary=boundary,
                   overlay_ellipse=True)
    print(f"wrote ab_scan.csv, ab_boundary.csv, ab_scan.svg -> {OUT}")

    # the undecided ring is the honest part of the picture: those states
    # pass the pointwise inequalities but sit outside every fully sampled
    # sublevel region, so the criterion alone cannot certify them
    ring = res.status == "I"
    print(f"pointwise passes beyond the certified level: {int(ring.sum())} "
          f"nodes, margins in [{res.margin[ring].min():+.2e}, "
          f"{res.margin[ring].max():+.2e}]")
    print(f"compare sqrt(certified level * 3/2) = "
          f"{math.sqrt(res.cert_level * 1.5):.4f} to the ellipse radius 1")


if __name__ == "__main__":
    main()
