"""Cross-check the derivative criterion against the rank-one oracle.

The oracle minimizes the rank-one quadratic form of the energy over unit
direction pairs at a given deformation gradient. It is slower but makes
no structural assumptions, so it both validates the criterion where the
two can be compared and explores where the criterion is silent.
"""

import math

import numpy as np

from ellscope import (check_point, ellipse_membership, make_builtin,
                      min_acoustic, ptheta_to_ab, rank_one_form)


def main():
    dev3 = make_builtin("dev-hencky", {"n": 3})

    # at the identity the form linearizes: 4/3 along xi = eta, 1 across
    I3 = np.eye(3)
    print(f"rank-one form at identity: parallel "
          f"{rank_one_form(dev3, I3, (1, 0, 0), (1, 0, 0)):.6f}, orthogonal "
          f"{rank_one_form(dev3, I3, (1, 0, 0), (0, 1, 0)):.6f}")

    # criterion and oracle agree on clear-cut states
    for p in (0.8, 1.414213, 1.8):
        a, b = ptheta_to_ab(p, 0.35)
        lam = (math.exp(a), 1.0, math.exp(-b))
        v = check_point(dev3, lam)
        ov = min_acoustic(dev3, lam)
        print(f"p = {p:6.3f}: criterion {v.status.value:13s} "
              f"(margin {v.worst_margin:+.3e})  oracle {ov.status.value:13s} "
              f"(min form {ov.min_value:+.3e})")

    # outside the ellipse the criterion stops certifying, but the oracle
    # still finds genuinely elliptic states: the certified region is a
    # strict subset of the true domain
    a, b = ptheta_to_ab(1.55, 0.0)
    cls, margin = ellipse_membership(a, b)
    lam = (math.exp(a), 1.0, math.exp(-b))
    ov = min_acoustic(dev3, lam)
    print(f"(a, b) = ({a:.3f}, {b:.3f}) is {cls} the ellipse "
          f"(membership margin {margin:+.3f});")
    print(f"  oracle: {ov.status.value}, min form {ov.min_value:+.3e} at "
          f"xi = ({', '.join('%.3f' % c for c in ov.probe.xi)}), "
          f"eta = ({', '.join('%.3f' % c for c in ov.probe.eta)})")

    # a genuinely violated state, with the witness directions
    lam = (math.exp(1.3), 1.0, math.exp(-1.3))
    ov = min_acoustic(dev3, lam)
    print(f"far state {tuple(round(v, 3) for v in lam)}: {ov.status.value}, "
          f"min form {ov.min_value:+.3e}")


if __name__ == "__main__":
    main()
