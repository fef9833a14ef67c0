"""Coordinate charts on stretch space used for scans and domain plots.

All charts exploit scale invariance of deviatoric energies by pinning
one stretch to 1 where possible:

  ab      (a, b)   -> (e^a, 1, e^-b), so a = log(lam1/lam2), b = log(lam2/lam3)
  ptheta  (p, th)  -> elliptic polar coordinates on the (a, b) plane in
                      which the boundary ellipse a^2 + ab + b^2 = 1 is
                      the circle p = sqrt(2)
  logt2d  t        -> (e^t, 1), the 2d stretch-ratio line
  cone    (th,u,p) -> the 3d stretch state with mean log stretch log(u),
                      deviatoric magnitude p and polar angle th
"""

from __future__ import annotations

import math

from .energies import Stretches

SQRT2 = math.sqrt(2.0)
SQRT6 = math.sqrt(6.0)


def ab_to_stretches(a: float, b: float) -> Stretches:
    """Stretches (e^a, 1, e^-b) for log ratios a = log(lam1/lam2), b = log(lam2/lam3)."""
    return Stretches((math.exp(a), 1.0, math.exp(-b)))


def ptheta_to_ab(p: float, theta: float) -> tuple[float, float]:
    """Elliptic polar coordinates to (a, b) log ratios.

    a = p sqrt(2/3) cos(theta - pi/6), b = -p sqrt(2/3) cos(theta + pi/6);
    then 2 (a^2 + ab + b^2) = p^2, so the unit-invariant boundary
    a^2 + ab + b^2 = 1 is exactly p = sqrt(2). Requires p >= 0.
    """
    if p < 0.0:
        raise ValueError(f"p must be >= 0, got {p}")
    r = p * math.sqrt(2.0 / 3.0)
    a = r * math.cos(theta - math.pi / 6.0)
    b = -r * math.cos(theta + math.pi / 6.0)
    return a, b


def ellipse_membership(a: float, b: float, tol: float = 1e-12) -> tuple[str, float]:
    """Classify (a, b) against the ellipse a^2 + ab + b^2 = 1.

    Returns (classification, margin) with margin = 1 - (a^2 + ab + b^2),
    classification in {"inside", "boundary", "outside"} using a tol band
    around zero margin.
    """
    margin = 1.0 - (a * a + a * b + b * b)
    if margin > tol:
        return "inside", margin
    if margin < -tol:
        return "outside", margin
    return "boundary", margin


def dev3_invariant_from_ab(a: float, b: float) -> float:
    """||dev_3 log U||^2 of the state (e^a, 1, e^-b).

    Equals (1/3) (a^2 + b^2 + (a + b)^2) = (2/3)(a^2 + ab + b^2); on the
    ellipse boundary this is exactly 2/3.
    """
    return (a * a + b * b + (a + b) * (a + b)) / 3.0


def logt_to_stretches_2d(logt: float) -> Stretches:
    """2d stretches (e^t, 1) for the log ratio t = log(lam1/lam2)."""
    return Stretches((math.exp(logt), 1.0))


def cone_point(theta: float, u: float, p: float) -> Stretches:
    """3d stretch state with mean log stretch log u, deviatoric magnitude p.

    lam1 = u exp(p/sqrt6 (sqrt3 cos th + sin th)),
    lam2 = u,
    lam3 = u exp(p/sqrt6 (sqrt3 cos th - sin th)).

    Dividing by u and taking log ratios recovers exactly the ab chart at
    ptheta_to_ab(p, theta). Requires u > 0 and 0 <= p <= sqrt(2).
    """
    if u <= 0.0:
        raise ValueError(f"u must be > 0, got {u}")
    if not 0.0 <= p <= SQRT2 + 1e-12:
        raise ValueError(f"p must be in [0, sqrt(2)], got {p}")
    c = p / SQRT6
    s3 = math.sqrt(3.0)
    lam1 = u * math.exp(c * (s3 * math.cos(theta) + math.sin(theta)))
    lam3 = u * math.exp(c * (s3 * math.cos(theta) - math.sin(theta)))
    return Stretches((lam1, u, lam3))


# Maps of the (a, b) plane that preserve the boundary ellipse. The first
# and last act on the stretches by index permutation (and overall scale),
# so they also preserve ellipticity verdicts; the middle one acts by
# stretch inversion lam -> 1/lam, which preserves the ellipse but not the
# pointwise criterion domain. Together they generate the ellipse's full
# symmetry group.
ELLIPSE_SYMMETRIES = (
    lambda a, b: (a + b, -b),
    lambda a, b: (b, a),
    lambda a, b: (-b, -a),
)


def chart_to_stretches(chart: str, coords) -> Stretches:
    """Map a chart point to stretches. chart in {ab, ptheta, logt2d, cone}."""
    if chart == "ab":
        (a, b) = coords
        return ab_to_stretches(a, b)
    if chart == "ptheta":
        (p, theta) = coords
        a, b = ptheta_to_ab(p, theta)
        return ab_to_stretches(a, b)
    if chart == "logt2d":
        (t,) = (coords if isinstance(coords, (tuple, list)) else (coords,))
        return logt_to_stretches_2d(t)
    if chart == "cone":
        (theta, u, p) = coords
        return cone_point(theta, u, p)
    raise ValueError(f"unknown chart '{chart}', expected ab, ptheta, logt2d or cone")


CHART_DIMS = {"ab": 2, "ptheta": 2, "logt2d": 1, "cone": 3}
