"""Pointwise sufficient-criterion margins, classification, invariances."""

import itertools
import json
import math

import numpy as np
import pytest

from ellscope import (EnergySpec, Status, be_margin, c3_margin, c4_margin,
                      check_point, make_builtin, te_margin)

D2 = make_builtin("dev-hencky", {"n": 2})
D3 = make_builtin("dev-hencky", {"n": 3})


def test_identity_margins_frozen():
    # 1) 3d distortional energy at the identity
    v = check_point(D3, (1.0, 1.0, 1.0))
    assert v.status is Status.ELLIPTIC
    assert np.allclose(v.te_margins, 4.0 / 3.0, rtol=1e-14)
    assert np.allclose(v.be_margins, 2.0, rtol=1e-14)
    assert np.allclose(v.c3_margins, 2.0, rtol=1e-14)
    assert np.allclose(v.c4_margins, 4.0 / 3.0, rtol=1e-14)
    assert v.worst_label == "te_1" and math.isclose(v.worst_margin, 4.0 / 3.0, rel_tol=1e-14)
    # 2) 2d variant
    v = check_point(D2, (1.0, 1.0))
    assert np.allclose(v.te_margins, 1.0, rtol=1e-14)
    assert np.allclose(v.be_margins + v.c3_margins + v.c4_margins, 2.0, rtol=1e-14)
    # 3) quadratic energy at the identity
    q = make_builtin("quad-hencky", {"mu": 1.0, "lame_lambda": 1.0})
    v = check_point(q, (1.0, 1.0, 1.0))
    assert np.allclose(v.te_margins, 3.0, rtol=1e-14)
    assert np.allclose(v.be_margins, 2.0, rtol=1e-14)
    assert np.allclose(v.c3_margins, 4.5, rtol=1e-14)
    assert np.allclose(v.c4_margins, 0.5, rtol=1e-14)


def test_2d_split_is_exact():
    # the 2d domain is exactly |log ratio| <= 1; margins are analytic there
    v = check_point(D2, (math.exp(1.2), 1.0))
    assert v.status is Status.VIOLATED
    assert v.worst_label == "te_1"
    assert math.isclose(v.worst_margin, -0.2, rel_tol=0.0, abs_tol=1e-14)
    v = check_point(D2, (3.5, 1.0))
    assert v.status is Status.VIOLATED
    assert math.isclose(v.worst_margin, 1.0 - math.log(3.5), rel_tol=1e-15)
    # boundary point: worst margin is exactly zero
    v = check_point(D2, (math.e, 1.0))
    assert v.status is Status.ELLIPTIC
    assert abs(v.worst_margin) <= 1e-12


def test_margins_frozen_row():
    # one interior 3d state frozen end to end (log ratios a=0.3, b=-0.2)
    v = check_point(D3, (math.exp(0.3), 1.0, math.exp(0.2)))
    assert np.allclose(v.te_margins,
                       (1.06666666666667, 1.66666666666667, 1.26666666666667), rtol=1e-13)
    assert np.allclose(v.be_margins,
                       (1.9925196408998, 1.99916690965817, 1.99667055145922), rtol=1e-13)
    assert np.allclose(v.c3_margins,
                       (2.04831088143938, 1.7495195814271, 2.19981205037424), rtol=1e-13)
    assert np.allclose(v.c4_margins,
                       (1.255334489913, 1.40952402164297, 1.23988289166512), rtol=1e-13)
    assert v.worst_label == "te_1"
    # the named helpers agree with the bundled verdict
    assert math.isclose(te_margin(D3, v_args(v), 0), v.te_margins[0], rel_tol=1e-15)


def v_args(v):
    # rebuild the stretch tuple of the frozen row (helper, not a test)
    return (math.exp(0.3), 1.0, math.exp(0.2))


def test_pair_margin_helpers_match_check_point():
    s = (1.7, 0.8, 1.1)
    v = check_point(D3, s)
    for k, (i, j) in enumerate(v.pairs):
        assert math.isclose(be_margin(D3, s, i, j), v.be_margins[k], rel_tol=1e-14)
        assert math.isclose(c3_margin(D3, s, i, j), v.c3_margins[k], rel_tol=1e-14)
        assert math.isclose(c4_margin(D3, s, i, j), v.c4_margins[k], rel_tol=1e-14)


def test_coalescent_branch_consistency():
    # the analytic limit at equal stretches matches the near-equal values
    va = check_point(D3, (1.5, 1.5, 0.7))
    vb = check_point(D3, (1.5 * (1.0 + 1e-7), 1.5, 0.7))
    assert va.status is vb.status
    for a, b in zip(va.c3_margins + va.c4_margins + va.be_margins,
                    vb.c3_margins + vb.c4_margins + vb.be_margins):
        assert math.isclose(a, b, rel_tol=0.0, abs_tol=5e-6)


def _const_hessian_spec(h00, h11, h01=0.0):
    # 2d spec with prescribed normalized curvature and zero gradient
    def hess(lam):
        return np.array([[h00 / lam[0] ** 2, h01 / (lam[0] * lam[1])],
                         [h01 / (lam[0] * lam[1]), h11 / lam[1] ** 2]])

    return EnergySpec(name="synthetic", params={},
                      eval=lambda lam: 0.0,
                      grad=lambda lam: np.zeros(2), hess=hess, n=2)


def test_radicand_handling():
    # 1) tiny opposite-sign curvatures: root is undecidable -> Indeterminate
    spec = _const_hessian_spec(1e-12, -1e-12)
    v = check_point(spec, (2.0, 1.0))
    assert v.status is Status.INDETERMINATE
    # 2) a genuinely negative curvature decides Violated; the undefined
    #    root margins are NaN and never win the worst slot
    spec = _const_hessian_spec(1.0, -1.0)
    v = check_point(spec, (2.0, 1.0))
    assert v.status is Status.VIOLATED
    assert math.isnan(v.c3_margins[0]) and math.isnan(v.c4_margins[0])
    assert v.worst_label == "te_2" and math.isclose(v.worst_margin, -1.0, rel_tol=1e-14)


def test_tolerance_band():
    # margins inside [-tol, 0) do not violate; beyond -tol they do
    v = check_point(_const_hessian_spec(-1e-10, 1.0), (2.0, 1.0))
    assert v.status is Status.ELLIPTIC
    v = check_point(_const_hessian_spec(-2e-9, 1.0), (2.0, 1.0))
    assert v.status is Status.VIOLATED
    # a looser tol flips the same state back to Elliptic
    v = check_point(_const_hessian_spec(-2e-9, 1.0), (2.0, 1.0), tol=1e-6)
    assert v.status is Status.ELLIPTIC


def test_worst_label_vocabulary():
    labels_3d = {f"te_{i}" for i in (1, 2, 3)}
    for kind in ("be", "c3", "c4"):
        labels_3d |= {f"{kind}_{i}{j}" for (i, j) in ((1, 2), (1, 3), (2, 3))}
    rng = np.random.default_rng(5)
    for _ in range(50):
        v = check_point(D3, rng.uniform(0.4, 2.5, size=3))
        assert v.worst_label in labels_3d
        assert len(v.pairs) == 3 and len(v.te_margins) == 3


def test_permutation_invariance():
    # verdicts agree and margin multisets match under stretch permutation
    rng = np.random.default_rng(17)
    for _ in range(100):
        lam = rng.uniform(0.4, 2.5, size=3)
        v0 = check_point(D3, lam)
        perm = rng.permutation(3)
        v1 = check_point(D3, lam[perm])
        assert v0.status is v1.status
        assert np.allclose(np.sort(v0.te_margins), np.sort(v1.te_margins),
                           rtol=1e-10, atol=1e-10)
        # c3/c4 margins may be NaN on violated points; np.sort keeps NaN last
        assert np.allclose(np.sort(v0.c4_margins), np.sort(v1.c4_margins),
                           rtol=1e-10, atol=1e-10, equal_nan=True)


def test_scale_invariance_of_margins():
    # normalized margins of scale-invariant energies ignore lam -> a lam
    rng = np.random.default_rng(23)
    for _ in range(100):
        lam = rng.uniform(0.4, 2.5, size=3)
        v0 = check_point(D3, lam)
        for a in (0.1, 3.0, 10.0):
            v1 = check_point(D3, a * lam)
            assert v0.status is v1.status
            assert np.allclose(v0.te_margins, v1.te_margins, rtol=1e-10, atol=1e-10)
            assert np.allclose(v0.c3_margins, v1.c3_margins,
                               rtol=1e-10, atol=1e-10, equal_nan=True)


def test_exp_2d_boundary_case_is_exact():
    # k = 1/4: the first curvature margin has a double root at log ratio 2,
    # so the analytic evaluation lands exactly on 0.0 there
    x2 = make_builtin("exp-hencky-iso-2", {"mu": 1.0, "k": 0.25})
    v = check_point(x2, (math.exp(2.0), 1.0))
    assert v.status is Status.ELLIPTIC
    assert v.worst_margin == 0.0
    # frozen flanking values
    assert math.isclose(check_point(x2, (math.exp(1.0), 1.0)).worst_margin,
                        0.2832871132667066, rel_tol=1e-12)
    assert math.isclose(check_point(x2, (math.exp(3.0), 1.0)).worst_margin,
                        0.7700542122295078, rel_tol=1e-12)


def test_to_dict_round_trips_json():
    v = check_point(D3, (1.3, 1.0, 0.8))
    d = v.to_dict()
    assert d["status"] == "Elliptic"
    assert set(d) == {"status", "n", "te_margins", "be_margins", "c3_margins",
                      "c4_margins", "pairs", "worst_label", "worst_margin", "tol"}
    # json-serializable as written
    assert json.loads(json.dumps(d)) == d


def test_status_codes():
    assert [s.exit_code for s in Status] == [0, 2, 3]
    assert [s.letter for s in Status] == ["E", "V", "I"]
