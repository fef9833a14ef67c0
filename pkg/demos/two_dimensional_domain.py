"""Map the 2d ellipticity interval of the distortional log energy.

In two dimensions the sufficient criterion is also necessary, so a fine
sweep of the log stretch ratio recovers the exact domain: elliptic while
|log(lam1/lam2)| <= 1, violated beyond. The exponentiated variant of the
same energy stays elliptic far past that interval.
"""

import numpy as np

from ellscope import (ScanRequest, check_point, make_builtin, scan_grid,
                      trace_boundary)


def main():
    dev2 = make_builtin("dev-hencky", {"n": 2})

    res = scan_grid(ScanRequest(spec=dev2, chart="logt2d",
                                ranges=((-2.0, 2.0),), resolution=(2001,)))
    x = res.axes[0]
    elliptic = res.status == "E"
    print(f"swept {x.size} states, log ratio in [-2, 2]")
    print(f"elliptic for |log t| <= {np.max(np.abs(x[elliptic])):.6f}")

    # the traced boundary interpolates the margin to the exact flip points
    for poly in trace_boundary(res):
        print(f"boundary at log t = {poly.vertices[0, 0]:+.6f}")

    # at the edge the worst margin vanishes identically
    for t in (0.5, 1.0, 1.5):
        v = check_point(dev2, (np.exp(t), 1.0))
        print(f"log t = {t:3.1f}: {v.status.value:13s} worst margin "
              f"{v.worst_margin:+.3e} ({v.worst_label})")

    # exponentiation rescues ellipticity: the k = 1/4 variant passes the
    # whole band |log t| <= 3, with its margin bottoming out at zero
    exp2 = make_builtin("exp-hencky-iso-2", {"mu": 1.0, "k": 0.25})
    ts = np.linspace(-3.0, 3.0, 601)
    worst = min(check_point(exp2, (np.exp(t), 1.0)).worst_margin for t in ts)
    print(f"exponentiated energy, k = 0.25: min margin {worst:+.3e} "
          f"over |log t| <= 3")


if __name__ == "__main__":
    main()
