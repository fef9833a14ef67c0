"""Survey the reduced inequalities behind the 3d certified region.

Inside the chart disk p <= sqrt(2) the four-condition criterion reduces
to three two-variable functions f1, f2, f3 of (p, theta). Their
nonnegativity on the disk is what certifies the region; this script
surveys their signs, pins down the binding corner, and evaluates the
closed-form edge constant.
"""

import math

from ellscope import (boundary_profile, boundary_profile_min_closed_form,
                      check_symmetry, min_boundary_profile, reduced_condition,
                      verify_nonneg)


def main():
    # sign survey with local refinement; condition 1 attains zero at the
    # disk corner (sqrt(2), pi) and the others stay strictly positive
    for k in (1, 2, 3):
        rep = verify_nonneg(k, resolution=300)
        print(f"f{k}: grid min {rep.grid_min:+.3e}, refined "
              f"{rep.refined_min:+.3e} at (p, theta) = "
              f"({rep.refined_argmin[0]:.6f}, {rep.refined_argmin[1]:.6f})")

    # spot values on the disk edge
    for theta in (0.0, math.pi / 2, math.pi):
        vals = [reduced_condition(k, math.sqrt(2.0), theta, allow_limit=True)
                for k in (1, 2, 3)]
        print(f"edge theta = {theta:.3f}: f1 = {vals[0]:+.4f}, "
              f"f2 = {vals[1]:+.4f}, f3 = {vals[2]:+.4f}")

    # each condition is symmetric under theta -> 2 pi - theta, so the
    # survey band [0, pi] covers the disk
    worst = max(check_symmetry(k, samples=500).max_abs_diff for k in (1, 2, 3))
    print(f"max asymmetry under theta reflection: {worst:.2e}")

    # the edge profile h(zeta) bounds the binding condition along the disk
    # edge; its minimum has a closed form barely above zero, which is how
    # tight the certification is
    prof = min_boundary_profile()
    closed = boundary_profile_min_closed_form()
    print(f"edge profile: h(0) = {boundary_profile(0.0):.6f}, "
          f"h(sqrt(2)) = {boundary_profile(math.sqrt(2.0)):.6f}")
    print(f"min h = {prof.refined_min:.10f} at zeta = "
          f"{prof.refined_argmin:.8f} (closed form {closed:.10f})")


if __name__ == "__main__":
    main()
