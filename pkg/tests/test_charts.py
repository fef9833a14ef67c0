"""Stretch-space charts: round trips, the boundary ellipse, validation."""

import math

import numpy as np
import pytest

from ellscope import (CHART_DIMS, ab_to_stretches, check_point, chart_to_stretches,
                      cone_point, dev3_invariant_from_ab, dev_log_norm_sq,
                      ellipse_membership, logt_to_stretches_2d, make_builtin,
                      ptheta_to_ab)
from ellscope.charts import ELLIPSE_SYMMETRIES

SQRT2 = math.sqrt(2.0)


def test_ab_round_trip():
    rng = np.random.default_rng(1)
    for _ in range(200):
        a, b = rng.uniform(-2.0, 2.0, size=2)
        lam = ab_to_stretches(a, b).as_array()
        assert math.isclose(math.log(lam[0] / lam[1]), a, rel_tol=0.0, abs_tol=1e-14)
        assert math.isclose(math.log(lam[1] / lam[2]), b, rel_tol=0.0, abs_tol=1e-14)
        assert lam[1] == 1.0


def test_ptheta_is_elliptic_polar():
    # 2 (a^2 + ab + b^2) = p^2 for every angle
    rng = np.random.default_rng(2)
    for _ in range(300):
        p = rng.uniform(0.0, 2.0)
        theta = rng.uniform(0.0, 2.0 * math.pi)
        a, b = ptheta_to_ab(p, theta)
        assert math.isclose(2.0 * (a * a + a * b + b * b), p * p,
                            rel_tol=1e-12, abs_tol=1e-12)
    with pytest.raises(ValueError, match="p must be >= 0"):
        ptheta_to_ab(-0.5, 0.0)


def test_boundary_invariant_value():
    # the squared deviatoric log magnitude is exactly 2/3 on the ellipse
    thetas = np.linspace(0.0, 2.0 * math.pi, 100, endpoint=False)
    for theta in thetas:
        a, b = ptheta_to_ab(SQRT2, float(theta))
        assert abs(dev3_invariant_from_ab(a, b) - 2.0 / 3.0) <= 1e-12
        assert abs((a * a + a * b + b * b) - 1.0) <= 1e-12
        # the chart agrees with the generic stretch-space evaluation
        lam = ab_to_stretches(a, b)
        assert math.isclose(dev_log_norm_sq(lam), dev3_invariant_from_ab(a, b),
                            rel_tol=1e-12, abs_tol=1e-14)


def test_ellipse_membership():
    assert ellipse_membership(0.0, 0.0) == ("inside", 1.0)
    cls, margin = ellipse_membership(1.0, 0.0)
    assert cls == "boundary" and abs(margin) <= 1e-12
    cls, margin = ellipse_membership(1.2, 0.4)
    assert cls == "outside" and margin < 0.0


def test_cone_chart():
    # dividing out the mean factor recovers the ab chart exactly
    rng = np.random.default_rng(4)
    for _ in range(100):
        theta = rng.uniform(0.0, 2.0 * math.pi)
        u = rng.uniform(0.5, 2.0)
        p = rng.uniform(0.0, SQRT2)
        lam = cone_point(theta, u, p).as_array()
        a_chart, b_chart = ptheta_to_ab(p, theta)
        assert math.isclose(math.log(lam[0] / lam[1]), a_chart, rel_tol=0.0, abs_tol=1e-12)
        assert math.isclose(math.log(lam[1] / lam[2]), b_chart, rel_tol=0.0, abs_tol=1e-12)
        # deviatoric magnitude is u-independent: p^2 / 3
        assert math.isclose(dev_log_norm_sq(lam), p * p / 3.0,
                            rel_tol=1e-10, abs_tol=1e-12)
    with pytest.raises(ValueError, match="u must be > 0"):
        cone_point(0.0, 0.0, 1.0)
    with pytest.raises(ValueError, match="p must be in"):
        cone_point(0.0, 1.0, -0.1)
    with pytest.raises(ValueError, match="p must be in"):
        cone_point(0.0, 1.0, SQRT2 + 0.01)


def test_chart_dispatch():
    assert CHART_DIMS == {"ab": 2, "ptheta": 2, "logt2d": 1, "cone": 3}
    lam = chart_to_stretches("logt2d", (0.7,)).as_array()
    assert np.allclose(lam, logt_to_stretches_2d(0.7).as_array(), atol=0.0)
    # scalar coordinate accepted for the 1d chart
    lam2 = chart_to_stretches("logt2d", 0.7).as_array()
    assert np.allclose(lam, lam2, atol=0.0)
    with pytest.raises(ValueError, match="unknown chart"):
        chart_to_stretches("xyz", (0.0, 0.0))


def test_ellipse_symmetries():
    # every map preserves the quadratic invariant; the permutation-type maps
    # (first and last) also preserve the verdict and its margin multiset,
    # while the inversion map preserves the ellipse only
    d3 = make_builtin("dev-hencky", {"n": 3})
    rng = np.random.default_rng(9)
    inversion_flips = 0
    for _ in range(50):
        a, b = rng.uniform(-1.5, 1.5, size=2)
        q0 = a * a + a * b + b * b
        v0 = check_point(d3, ab_to_stretches(a, b))
        for k, sym in enumerate(ELLIPSE_SYMMETRIES):
            a2, b2 = sym(a, b)
            q1 = a2 * a2 + a2 * b2 + b2 * b2
            assert math.isclose(q0, q1, rel_tol=1e-12, abs_tol=1e-12)
            v1 = check_point(d3, ab_to_stretches(a2, b2))
            if k == 1:
                inversion_flips += v0.status is not v1.status
            else:
                assert v0.status is v1.status
                assert np.allclose(np.sort(v0.te_margins), np.sort(v1.te_margins),
                                   rtol=1e-10, atol=1e-10)
    # the pointwise criterion domain genuinely lacks inversion symmetry
    assert inversion_flips > 0
