"""Rank-one probe oracle: frozen minima, determinism, validation, fallbacks."""

import dataclasses
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from ellscope import (EnergySpec, OracleConfig, Status, StepUnderflowError,
                      as_deformation_gradient, chart_to_stretches, check_point,
                      energy_of_F, make_builtin, min_acoustic, oracle_verdict,
                      rank_one_form, singular_values)

D2 = make_builtin("dev-hencky", {"n": 2})
D3 = make_builtin("dev-hencky", {"n": 3})


def test_rank_one_form_identity():
    # the quadratic form of the linearized energy: 4/3 on aligned unit
    # directions, 1 on orthogonal ones
    I3 = np.eye(3)
    e1 = np.array([1.0, 0.0, 0.0])
    e2 = np.array([0.0, 1.0, 0.0])
    assert abs(rank_one_form(D3, I3, e1, e1) - 4.0 / 3.0) <= 1e-4
    assert abs(rank_one_form(D3, I3, e1, e2) - 1.0) <= 1e-4


def test_rank_one_form_degenerate_F():
    with pytest.raises(StepUnderflowError):
        rank_one_form(D2, np.diag([1e-8, 1e8]),
                      np.array([1.0, 0.0]), np.array([1.0, 0.0]))


def test_deformation_gradient_validation():
    F = as_deformation_gradient(np.diag([1.2, 0.8, 1.0]))
    assert F.shape == (3, 3)
    with pytest.raises(ValueError, match="2x2 or 3x3"):
        as_deformation_gradient(np.ones((2, 3)))
    with pytest.raises(ValueError, match="positive determinant"):
        as_deformation_gradient(np.diag([1.0, -1.0]))


def test_singular_values_rotation_invariant():
    rng = np.random.default_rng(7)
    A = rng.normal(size=(3, 3))
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    assert np.allclose(singular_values(Q @ A), singular_values(A),
                       rtol=0.0, atol=1e-12)
    # energy through F equals energy through the singular values
    F = np.diag([1.3, 0.9, 1.1])
    assert math.isclose(energy_of_F(D3, Q @ F), D3.eval(np.array([1.3, 1.1, 0.9])),
                        rel_tol=1e-10)


def test_min_acoustic_frozen_spots():
    # frozen minima at representative 3d states (polar chart radius/angle)
    expected = {
        (1.90, 0.0): ("E", 0.0205998596263748),
        (1.92, 0.0): ("E", 0.019059790855460883),
        (1.50, 0.3): ("E", 0.025577880614506995),
        (1.42, math.pi / 3.0): ("V", -0.0007323053074711844),
        (0.90, 2.0): ("E", 0.7227229185622251),
    }
    for (p, th), (letter, value) in expected.items():
        s = chart_to_stretches("ptheta", (p, th))
        ov = min_acoustic(D3, s)
        assert ov.status.letter == letter
        assert math.isclose(ov.min_value, value, rel_tol=0.0, abs_tol=1e-7)
        assert ov.probe is not None and ov.probe.value is not None


def test_min_acoustic_2d_matches_criterion():
    # in 2d the criterion is exact, so the two routes agree off the boundary
    for t in (0.5, 0.999, 1.2, 1.8):
        s = chart_to_stretches("logt2d", (t,))
        assert min_acoustic(D2, s).status is check_point(D2, s).status


def test_oracle_verdict_wrapper():
    ov = oracle_verdict(D3, (1.0, 1.0, 1.0), tol=1e-6, grid=16, refine=2)
    assert ov.status is Status.ELLIPTIC
    assert ov.grid == 16 and ov.refine == 2 and ov.tol == 1e-6
    assert ov.min_value > 0.5


def test_kernel_and_numpy_paths_agree():
    # stripping the compiled kernel forces the numpy fallback; the minimum
    # must match to solver precision
    twin = dataclasses.replace(D3, kernel=None)
    s = (1.5, 1.0, 0.8)
    a = min_acoustic(D3, s)
    b = min_acoustic(twin, s)
    assert a.method == "compiled" and b.method == "numpy"
    assert math.isclose(a.min_value, b.min_value, rel_tol=0.0, abs_tol=1e-9)


def test_unevaluable_energy_is_indeterminate():
    bad = EnergySpec(name="nan", params={}, eval=lambda lam: float("nan"), n=2)
    ov = min_acoustic(bad, (1.0, 1.0))
    assert ov.status is Status.INDETERMINATE
    assert math.isnan(ov.min_value)


def test_thread_count_determinism():
    # the merged coarse scan is bit-identical for any kernel thread count
    code = (
        "import math, numpy as np\n"
        "from ellscope import make_builtin, min_acoustic, chart_to_stretches\n"
        "spec = make_builtin('dev-hencky', {'n': 3})\n"
        "s = chart_to_stretches('ptheta', (1.5, 0.3))\n"
        "ov = min_acoustic(spec, s)\n"
        "print(repr(ov.min_value)); print(repr(tuple(ov.probe.xi)))\n"
    )
    outs = []
    for threads in ("1", "3"):
        env = dict(os.environ, ELLSCOPE_THREADS=threads)
        r = subprocess.run([sys.executable, "-c", code], capture_output=True,
                           text=True, env=env, timeout=300)
        assert r.returncode == 0, r.stderr
        outs.append(r.stdout)
    assert outs[0] == outs[1]
