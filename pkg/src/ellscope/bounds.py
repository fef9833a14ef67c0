"""Closed-form ellipticity conditions on the polar chart and their certificates.

For the scale-invariant deviatoric Hencky energy in 3d, the sufficient
ellipticity conditions reduce on the chart (p, theta) to the
nonnegativity of three explicit functions of (p, theta) alone, here
called the reduced conditions:

  k = 1  tension-extension:        2 + sqrt(2) p cos(theta)
  k = 2  mixed sum condition:      matches the normalized C4 margin
  k = 3  mixed difference cond.:   matches the normalized C3 margin

(each equal to 3/2 times the corresponding normalized margin of the
middle-stretch pair; see tests for the cross-module identity). The
remaining functions are auxiliary lower bounds used to certify
nonnegativity on the closed domain p <= sqrt(2): an exponential-linear
bound for the difference condition on the acute wedge, and a two-piece
bound for the sum condition on the obtuse sector whose binding edge
profile has an explicit closed-form minimum.

Grid surveys with golden-section refinement make the certificates
checkable numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._seq import halton

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)

# radicands are clamped to zero down to this floor; below it the point is
# treated as outside the domain of the condition
RADICAND_FLOOR = -1e-12


def _bernoulli(x: float) -> float:
    # x / (e^x - 1), continuous at 0
    if x == 0.0:
        return 1.0
    return x / math.expm1(x)


def _radicand(p: float, theta: float) -> float:
    a_sum = SQRT2 * p * math.sin(theta - math.pi / 6.0)   # a + 2b on the ab chart
    b_sum = SQRT2 * p * math.sin(theta + math.pi / 6.0)   # 2a + b
    return (2.0 + a_sum) * (2.0 - b_sum)


def reduced_condition(k: int, p: float, theta: float,
                      allow_limit: bool = False) -> float:
    """Evaluate reduced condition k in {1, 2, 3} at (p, theta), p >= 0.

    Condition 3 has a removable singularity on the ray sin(theta) = 0
    with p > 0; evaluation there raises unless allow_limit is set, in
    which case the analytic limit is returned. At p = 0 all conditions
    are smooth and the limit value is returned directly (condition 3
    equals 3 there). Negative radicands beyond a rounding floor raise,
    signaling a point outside the certified domain.
    """
    if k not in (1, 2, 3):
        raise ValueError(f"condition index must be 1, 2 or 3, got {k}")
    if p < 0.0:
        raise ValueError(f"p must be >= 0, got {p}")
    if k == 1:
        return 2.0 + SQRT2 * p * math.cos(theta)

    a_sum = SQRT2 * p * math.sin(theta - math.pi / 6.0)
    b_sum = SQRT2 * p * math.sin(theta + math.pi / 6.0)
    rad = (2.0 + a_sum) * (2.0 - b_sum)
    if rad < RADICAND_FLOOR:
        raise ValueError(f"negative radicand {rad} at (p, theta) = ({p}, {theta})")
    root = math.sqrt(max(rad, 0.0))
    x = 2.0 * p / SQRT6 * math.sin(theta)

    if k == 2:
        ex = math.exp(x)
        return 0.5 * root + 1.0 + (-ex * a_sum + b_sum) / (1.0 + ex)

    # k == 3: the fraction (-e^x a_sum - b_sum)/(1 - e^x) rewrites as
    # 3x/(e^x - 1) + a_sum since a_sum + b_sum = 3x, removing the pole
    if x == 0.0 and p > 0.0 and not allow_limit:
        raise ValueError(
            "condition 3 is singular at sin(theta) = 0 with p > 0; "
            "pass allow_limit=True for the analytic limit")
    return 0.5 * root - 1.0 + 3.0 * _bernoulli(x) + a_sum


def _condition_grid(k: int, p: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Vectorized reduced_condition over a meshgrid, limits allowed."""
    pp, tt = np.meshgrid(p, theta, indexing="ij")
    if k == 1:
        return 2.0 + SQRT2 * pp * np.cos(tt)
    a_sum = SQRT2 * pp * np.sin(tt - np.pi / 6.0)
    b_sum = SQRT2 * pp * np.sin(tt + np.pi / 6.0)
    rad = (2.0 + a_sum) * (2.0 - b_sum)
    if float(rad.min()) < RADICAND_FLOOR:
        raise ValueError(f"negative radicand {rad.min()} in survey grid")
    root = np.sqrt(np.maximum(rad, 0.0))
    x = 2.0 * pp / SQRT6 * np.sin(tt)
    if k == 2:
        ex = np.exp(x)
        return 0.5 * root + 1.0 + (-ex * a_sum + b_sum) / (1.0 + ex)
    with np.errstate(invalid="ignore", divide="ignore"):
        bern = np.where(x == 0.0, 1.0, x / np.expm1(x))
    return 0.5 * root - 1.0 + 3.0 * bern + a_sum


@dataclass(frozen=True)
class PThetaBox:
    """Axis-aligned box on the (p, theta) chart.

    open_theta excludes both theta endpoints by a half-cell inset when
    gridding (used for condition 3, which is certified on an open
    interval).
    """

    p_lo: float = 0.0
    p_hi: float = SQRT2
    theta_lo: float = 0.0
    theta_hi: float = math.pi
    open_theta: bool = False

    def __post_init__(self):
        if not 0.0 <= self.p_lo < self.p_hi <= SQRT2 + 1e-12:
            raise ValueError(f"p range must satisfy 0 <= lo < hi <= sqrt(2), "
                             f"got [{self.p_lo}, {self.p_hi}]")
        if not self.theta_lo < self.theta_hi:
            raise ValueError("theta range must satisfy lo < hi")

    def grids(self, resolution: int) -> tuple[np.ndarray, np.ndarray]:
        p = np.linspace(self.p_lo, self.p_hi, resolution)
        if self.open_theta:
            h = (self.theta_hi - self.theta_lo) / resolution
            theta = self.theta_lo + (np.arange(resolution) + 0.5) * h
        else:
            theta = np.linspace(self.theta_lo, self.theta_hi, resolution)
        return p, theta


DEFAULT_BOXES = {
    1: PThetaBox(),
    2: PThetaBox(),
    3: PThetaBox(open_theta=True),
}


@dataclass(frozen=True)
class GridMinReport:
    """Minimum of a reduced condition over a survey grid, then refined."""

    condition: int
    resolution: int
    grid_min: float
    grid_argmin: tuple[float, float]
    refined_min: float
    refined_argmin: tuple[float, float]


def _golden_min(fn, lo: float, hi: float, iters: int = 80) -> tuple[float, float]:
    """Golden-section minimum of fn on [lo, hi]; returns (x, fn(x))."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    x = 0.5 * (a + b)
    return x, fn(x)


def verify_nonneg(k: int, box: PThetaBox | None = None,
                  resolution: int = 500) -> GridMinReport:
    """Survey reduced condition k over its box and refine the minimum.

    Grid minimum over resolution^2 nodes, then alternating golden-section
    line searches (p axis, theta axis) from the best node, clipped to the
    box. The refined minimum never exceeds the grid minimum.
    """
    if box is None:
        box = DEFAULT_BOXES[k]
    p, theta = box.grids(resolution)
    vals = _condition_grid(k, p, theta)
    flat = int(np.argmin(vals))
    ip, it = flat // theta.size, flat % theta.size
    grid_min = float(vals[ip, it])
    p0, t0 = float(p[ip]), float(theta[it])

    hp = (box.p_hi - box.p_lo) / (resolution - 1)
    ht = (theta[1] - theta[0]) if theta.size > 1 else 0.0
    t_lo = theta[0] if box.open_theta else box.theta_lo
    t_hi = theta[-1] if box.open_theta else box.theta_hi

    def fn(pv, tv):
        return reduced_condition(k, pv, tv, allow_limit=True)

    pb, tb, fb = p0, t0, grid_min
    for _ in range(3):
        lo = max(box.p_lo, pb - hp)
        hi = min(box.p_hi, pb + hp)
        x, fx = _golden_min(lambda v: fn(v, tb), lo, hi)
        if fx < fb:
            pb, fb = x, fx
        lo = max(t_lo, tb - ht)
        hi = min(t_hi, tb + ht)
        x, fx = _golden_min(lambda v: fn(pb, v), lo, hi)
        if fx < fb:
            tb, fb = x, fx

    refined = min(fb, grid_min)
    return GridMinReport(condition=k, resolution=resolution,
                         grid_min=grid_min, grid_argmin=(p0, t0),
                         refined_min=refined, refined_argmin=(pb, tb))


# ---------------------------------------------------------------------------
# auxiliary bounds certifying the conditions on subdomains

def _check_box(zeta: float, other: float, name: str):
    if not (0.0 <= zeta <= SQRT2 + 1e-12 and 0.0 <= other <= SQRT2 + 1e-12):
        raise ValueError(f"({name}) must lie in [0, sqrt(2)]^2, "
                         f"got ({zeta}, {other})")


def acute_wedge_bound(zeta: float, eta: float) -> float:
    """Lower bound for the difference condition on the acute wedge.

    Coordinates zeta = p sin(theta), eta = p cos(theta), both restricted
    to [0, sqrt(2)]. Nonnegative on the wedge, vanishing on zeta = 0.
    """
    _check_box(zeta, eta, "zeta, eta")
    e = math.exp(2.0 * zeta / SQRT6)
    return (SQRT2 * (SQRT3 * zeta / 2.0 + eta / 2.0)
            + SQRT2 * e * (SQRT3 * zeta / 2.0 - eta / 2.0) - e + 1.0)


def acute_wedge_bound_dzeta(zeta: float, eta: float) -> float:
    """Partial derivative of acute_wedge_bound in zeta.

    Equals sqrt(3/2) + e^(sqrt(2/3) zeta) (zeta - eta/sqrt(3) + 1/sqrt(6));
    its minimum over the wedge is sqrt(2/3) > 0, attained at (0, sqrt(2)).
    """
    _check_box(zeta, eta, "zeta, eta")
    e = math.exp(2.0 * zeta / SQRT6)
    return math.sqrt(1.5) + e * (zeta - eta / SQRT3 + 1.0 / SQRT6)


def obtuse_sector_bounds(zeta: float, varpi: float) -> tuple[float, float]:
    """The pair (inner, scaled) bounding the sum condition on the obtuse sector.

    Coordinates zeta = p sin(theta), varpi = -p cos(theta), both in
    [0, sqrt(2)]. The scaled bound is (e^(2 zeta/sqrt6) + 1)/2 times the
    inner one, so both share sign; the inner bound decreases in varpi at
    a rate bounded away from zero, making varpi = sqrt(2) the binding
    edge.
    """
    _check_box(zeta, varpi, "zeta, varpi")
    rad = -1.5 * zeta * zeta + SQRT3 * zeta * varpi - 0.5 * varpi * varpi + 4.0
    if rad < 0.0:
        raise ValueError(f"negative radicand {rad} at ({zeta}, {varpi})")
    inner = (math.sqrt(rad) - SQRT2 * varpi + 2.0
             - SQRT6 * zeta * math.tanh(zeta / SQRT6))
    scaled = 0.5 * (math.exp(2.0 * zeta / SQRT6) + 1.0) * inner
    return inner, scaled


def obtuse_sector_bound_dvarpi(zeta: float, varpi: float) -> float:
    """Partial derivative of the inner obtuse-sector bound in varpi.

    (1/sqrt2) [(sqrt3 zeta - varpi)/sqrt(-3 zeta^2 + 2 sqrt3 zeta varpi
    - varpi^2 + 8) - 2]; bounded above by (sqrt3 - 2)/sqrt2 < 0 on the
    sector, which is what pushes the minimum to the varpi = sqrt(2) edge.
    """
    _check_box(zeta, varpi, "zeta, varpi")
    rad = -3.0 * zeta * zeta + 2.0 * SQRT3 * zeta * varpi - varpi * varpi + 8.0
    return ((SQRT3 * zeta - varpi) / math.sqrt(rad) - 2.0) / SQRT2


def boundary_profile(zeta: float) -> float:
    """The inner obtuse-sector bound on its binding edge varpi = sqrt(2).

    sqrt(-3 zeta^2/2 + sqrt6 zeta + 3) - sqrt6 zeta tanh(zeta/sqrt6),
    for zeta in [0, sqrt(2)].
    """
    if not 0.0 <= zeta <= SQRT2 + 1e-12:
        raise ValueError(f"zeta must lie in [0, sqrt(2)], got {zeta}")
    return (math.sqrt(-1.5 * zeta * zeta + SQRT6 * zeta + 3.0)
            - SQRT6 * zeta * math.tanh(zeta / SQRT6))


def boundary_profile_min_closed_form() -> float:
    """Closed form of the edge-profile minimum, attained at zeta = sqrt(2).

    3^(1/4) (sqrt2 - 2 * 3^(1/4) tanh(1/sqrt3)), about 0.0573242.
    """
    q = 3.0 ** 0.25
    return q * (SQRT2 - 2.0 * q * math.tanh(1.0 / SQRT3))


@dataclass(frozen=True)
class ProfileMinReport:
    resolution: int
    grid_min: float
    grid_argmin: float
    refined_min: float
    refined_argmin: float
    closed_form: float


def min_boundary_profile(resolution: int = 1001) -> ProfileMinReport:
    """Minimize the edge profile over [0, sqrt(2)]: grid plus golden refinement."""
    z = np.linspace(0.0, SQRT2, resolution)
    vals = np.array([boundary_profile(v) for v in z])
    i = int(np.argmin(vals))
    z0, f0 = float(z[i]), float(vals[i])
    h = SQRT2 / (resolution - 1)
    x, fx = _golden_min(boundary_profile,
                        max(0.0, z0 - h), min(SQRT2, z0 + h))
    if fx < f0:
        zb, fb = x, fx
    else:
        zb, fb = z0, f0
    return ProfileMinReport(resolution=resolution, grid_min=f0, grid_argmin=z0,
                            refined_min=fb, refined_argmin=zb,
                            closed_form=boundary_profile_min_closed_form())


@dataclass(frozen=True)
class SymmetryReport:
    condition: int
    samples: int
    max_abs_diff: float


def check_symmetry(k: int, samples: int = 1000) -> SymmetryReport:
    """Max |f_k(p, theta) - f_k(p, 2 pi - theta)| over low-discrepancy samples."""
    pts = halton(samples, 2)
    worst = 0.0
    for u, v in pts:
        p = u * SQRT2
        theta = v * math.pi
        d = abs(reduced_condition(k, p, theta, allow_limit=True)
                - reduced_condition(k, p, 2.0 * math.pi - theta, allow_limit=True))
        worst = max(worst, d)
    return SymmetryReport(condition=k, samples=samples, max_abs_diff=worst)
