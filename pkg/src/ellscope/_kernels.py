"""Compiled inner loops for the rank-one convexity oracle.

The oracle minimizes the second difference of t -> W(F + t xi eta^T)
over a grid of direction pairs; with hundreds of thousands of pairs per
stretch state this is the only hot loop in the package. numba is used
when importable, with the same functions running as plain Python
otherwise (slow but correct, exercised by the cross-path tests).

All eigenvalues are computed with a cyclic Jacobi iteration on the
3x3 (closed form on the 2x2) Cauchy-Green matrix A^T A; Jacobi is
backward stable and exact enough that the second differences stay
usable down to steps of 1e-4.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap

    prange = range


_threads_configured = False


def configure_threads():
    """Apply ELLSCOPE_THREADS to the numba thread pool, once."""
    global _threads_configured
    if _threads_configured or not HAVE_NUMBA:
        _threads_configured = True
        return
    raw = os.environ.get("ELLSCOPE_THREADS", "").strip()
    if raw:
        try:
            want = max(1, int(raw))
        except ValueError:
            want = 0
        if want:
            numba.set_num_threads(min(want, numba.config.NUMBA_NUM_THREADS))
    _threads_configured = True


# energy codes, kept in sync with energies.make_builtin
DEV_HENCKY = 0
QUAD_HENCKY = 1
EXP_HENCKY_ISO_2 = 2
EXP_HENCKY_3 = 3
VOL_EXP = 4


@njit(cache=True)
def eig2_sym(a00, a01, a11):
    mid = 0.5 * (a00 + a11)
    half = 0.5 * (a00 - a11)
    disc = math.sqrt(half * half + a01 * a01)
    return mid - disc, mid + disc


@njit(cache=True)
def eig3_jacobi(a00, a01, a02, a11, a12, a22):
    """Eigenvalues of a symmetric 3x3 by cyclic Jacobi rotations."""
    fro = math.sqrt(a00 * a00 + a11 * a11 + a22 * a22
                    + 2.0 * (a01 * a01 + a02 * a02 + a12 * a12))
    tol = 1e-14 * fro
    for _ in range(50):
        off = math.sqrt(a01 * a01 + a02 * a02 + a12 * a12)
        if off <= tol:
            break
        if a01 != 0.0:
            tau = (a11 - a00) / (2.0 * a01)
            t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
            c = 1.0 / math.sqrt(1.0 + t * t)
            s = t * c
            a00 -= t * a01
            a11 += t * a01
            a01 = 0.0
            x, y = a02, a12
            a02 = c * x - s * y
            a12 = s * x + c * y
        if a02 != 0.0:
            tau = (a22 - a00) / (2.0 * a02)
            t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
            c = 1.0 / math.sqrt(1.0 + t * t)
            s = t * c
            a00 -= t * a02
            a22 += t * a02
            a02 = 0.0
            x, y = a01, a12
            a01 = c * x - s * y
            a12 = s * x + c * y
        if a12 != 0.0:
            tau = (a22 - a11) / (2.0 * a12)
            t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
            c = 1.0 / math.sqrt(1.0 + t * t)
            s = t * c
            a11 -= t * a12
            a22 += t * a12
            a12 = 0.0
            x, y = a01, a02
            a01 = c * x - s * y
            a02 = s * x + c * y
    return a00, a11, a22


@njit(cache=True)
def eig3_cardano(a00, a01, a02, a11, a12, a22):
    """Closed-form eigenvalues of a symmetric 3x3 (trigonometric solve).

    Absolute error is O(eps * ||A||), which is plenty for ranking probe
    directions; the Jacobi path is used wherever the value itself ends
    up in a verdict.
    """
    p1 = a01 * a01 + a02 * a02 + a12 * a12
    q = (a00 + a11 + a22) / 3.0
    d0 = a00 - q
    d1 = a11 - q
    d2 = a22 - q
    p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1
    if p2 <= 1e-28 * (q * q + 1.0):
        return q, q, q
    p = math.sqrt(p2 / 6.0)
    inv = 1.0 / p
    b00 = d0 * inv
    b11 = d1 * inv
    b22 = d2 * inv
    b01 = a01 * inv
    b02 = a02 * inv
    b12 = a12 * inv
    detb = (b00 * (b11 * b22 - b12 * b12)
            - b01 * (b01 * b22 - b12 * b02)
            + b02 * (b01 * b12 - b11 * b02))
    r = 0.5 * detb
    if r < -1.0:
        r = -1.0
    elif r > 1.0:
        r = 1.0
    phi = math.acos(r) / 3.0
    e1 = q + 2.0 * p * math.cos(phi)
    e3 = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    return e3, 3.0 * q - e1 - e3, e1


@njit(cache=True)
def g_from_logs3(code, prm, L1, L2, L3):
    if code == DEV_HENCKY:
        d12 = L1 - L2
        d13 = L1 - L3
        d23 = L2 - L3
        return prm[0] * (d12 * d12 + d13 * d13 + d23 * d23) / 3.0
    if code == QUAD_HENCKY:
        tr = L1 + L2 + L3
        return prm[0] * (L1 * L1 + L2 * L2 + L3 * L3) + 0.5 * prm[1] * tr * tr
    if code == EXP_HENCKY_3:
        d12 = L1 - L2
        d13 = L1 - L3
        d23 = L2 - L3
        dev = (d12 * d12 + d13 * d13 + d23 * d23) / 3.0
        tr = L1 + L2 + L3
        return prm[0] * math.exp(dev) + prm[1] / (2.0 * prm[2]) * math.exp(prm[2] * tr * tr)
    # VOL_EXP
    tr = L1 + L2 + L3
    return math.exp(prm[0] * tr * tr)


@njit(cache=True)
def g_from_logs2(code, prm, L1, L2):
    if code == DEV_HENCKY:
        d = L1 - L2
        return prm[0] * 0.5 * d * d
    if code == QUAD_HENCKY:
        tr = L1 + L2
        return prm[0] * (L1 * L1 + L2 * L2) + 0.5 * prm[1] * tr * tr
    # EXP_HENCKY_ISO_2
    d = L1 - L2
    return prm[0] / prm[1] * math.exp(prm[1] * 0.5 * d * d)


@njit(cache=True)
def phi3(code, prm, F, xi, eta, t):
    """W(F + t xi eta^T) for the coded energy, 3d."""
    a00 = F[0, 0] + t * xi[0] * eta[0]
    a01 = F[0, 1] + t * xi[0] * eta[1]
    a02 = F[0, 2] + t * xi[0] * eta[2]
    a10 = F[1, 0] + t * xi[1] * eta[0]
    a11 = F[1, 1] + t * xi[1] * eta[1]
    a12 = F[1, 2] + t * xi[1] * eta[2]
    a20 = F[2, 0] + t * xi[2] * eta[0]
    a21 = F[2, 1] + t * xi[2] * eta[1]
    a22 = F[2, 2] + t * xi[2] * eta[2]
    c00 = a00 * a00 + a10 * a10 + a20 * a20
    c01 = a00 * a01 + a10 * a11 + a20 * a21
    c02 = a00 * a02 + a10 * a12 + a20 * a22
    c11 = a01 * a01 + a11 * a11 + a21 * a21
    c12 = a01 * a02 + a11 * a12 + a21 * a22
    c22 = a02 * a02 + a12 * a12 + a22 * a22
    w0, w1, w2 = eig3_jacobi(c00, c01, c02, c11, c12, c22)
    if w0 < 1e-300:
        w0 = 1e-300
    if w1 < 1e-300:
        w1 = 1e-300
    if w2 < 1e-300:
        w2 = 1e-300
    return g_from_logs3(code, prm, 0.5 * math.log(w0), 0.5 * math.log(w1),
                        0.5 * math.log(w2))


@njit(cache=True)
def phi3_fast(code, prm, F, xi, eta, t):
    """phi3 with closed-form eigenvalues; for ranking only."""
    a00 = F[0, 0] + t * xi[0] * eta[0]
    a01 = F[0, 1] + t * xi[0] * eta[1]
    a02 = F[0, 2] + t * xi[0] * eta[2]
    a10 = F[1, 0] + t * xi[1] * eta[0]
    a11 = F[1, 1] + t * xi[1] * eta[1]
    a12 = F[1, 2] + t * xi[1] * eta[2]
    a20 = F[2, 0] + t * xi[2] * eta[0]
    a21 = F[2, 1] + t * xi[2] * eta[1]
    a22 = F[2, 2] + t * xi[2] * eta[2]
    c00 = a00 * a00 + a10 * a10 + a20 * a20
    c01 = a00 * a01 + a10 * a11 + a20 * a21
    c02 = a00 * a02 + a10 * a12 + a20 * a22
    c11 = a01 * a01 + a11 * a11 + a21 * a21
    c12 = a01 * a02 + a11 * a12 + a21 * a22
    c22 = a02 * a02 + a12 * a12 + a22 * a22
    w0, w1, w2 = eig3_cardano(c00, c01, c02, c11, c12, c22)
    if w0 < 1e-300:
        w0 = 1e-300
    if w1 < 1e-300:
        w1 = 1e-300
    if w2 < 1e-300:
        w2 = 1e-300
    return g_from_logs3(code, prm, 0.5 * math.log(w0), 0.5 * math.log(w1),
                        0.5 * math.log(w2))


@njit(cache=True)
def phi2(code, prm, F, xi, eta, t):
    a00 = F[0, 0] + t * xi[0] * eta[0]
    a01 = F[0, 1] + t * xi[0] * eta[1]
    a10 = F[1, 0] + t * xi[1] * eta[0]
    a11 = F[1, 1] + t * xi[1] * eta[1]
    c00 = a00 * a00 + a10 * a10
    c01 = a00 * a01 + a10 * a11
    c11 = a01 * a01 + a11 * a11
    w0, w1 = eig2_sym(c00, c01, c11)
    if w0 < 1e-300:
        w0 = 1e-300
    if w1 < 1e-300:
        w1 = 1e-300
    return g_from_logs2(code, prm, 0.5 * math.log(w0), 0.5 * math.log(w1))


@njit(cache=True)
def det3_pert(F, xi, eta, t):
    a00 = F[0, 0] + t * xi[0] * eta[0]
    a01 = F[0, 1] + t * xi[0] * eta[1]
    a02 = F[0, 2] + t * xi[0] * eta[2]
    a10 = F[1, 0] + t * xi[1] * eta[0]
    a11 = F[1, 1] + t * xi[1] * eta[1]
    a12 = F[1, 2] + t * xi[1] * eta[2]
    a20 = F[2, 0] + t * xi[2] * eta[0]
    a21 = F[2, 1] + t * xi[2] * eta[1]
    a22 = F[2, 2] + t * xi[2] * eta[2]
    return (a00 * (a11 * a22 - a12 * a21)
            - a01 * (a10 * a22 - a12 * a20)
            + a02 * (a10 * a21 - a11 * a20))


@njit(cache=True)
def det2_pert(F, xi, eta, t):
    a00 = F[0, 0] + t * xi[0] * eta[0]
    a01 = F[0, 1] + t * xi[0] * eta[1]
    a10 = F[1, 0] + t * xi[1] * eta[0]
    a11 = F[1, 1] + t * xi[1] * eta[1]
    return a00 * a11 - a01 * a10


@njit(cache=True)
def safe_step3(F, xi, eta, h0):
    """Halve h0 until det(F +- h xi eta^T) > 0; -1.0 after 40 halvings.

    det is affine in the probe amplitude, so positivity at -h, 0, +h
    gives positivity on the whole interval.
    """
    h = h0
    for _ in range(41):
        if det3_pert(F, xi, eta, h) > 0.0 and det3_pert(F, xi, eta, -h) > 0.0:
            return h
        h *= 0.5
    return -1.0


@njit(cache=True)
def safe_step2(F, xi, eta, h0):
    h = h0
    for _ in range(41):
        if det2_pert(F, xi, eta, h) > 0.0 and det2_pert(F, xi, eta, -h) > 0.0:
            return h
        h *= 0.5
    return -1.0


@njit(cache=True)
def probe3(code, prm, F, xi, eta, phi0, h0):
    """Richardson-extrapolated second difference; (value, step) or (nan, -1)."""
    h = safe_step3(F, xi, eta, h0)
    if h < 0.0:
        return math.nan, -1.0
    d1 = (phi3(code, prm, F, xi, eta, h) - 2.0 * phi0
          + phi3(code, prm, F, xi, eta, -h)) / (h * h)
    hh = 0.5 * h
    d2 = (phi3(code, prm, F, xi, eta, hh) - 2.0 * phi0
          + phi3(code, prm, F, xi, eta, -hh)) / (hh * hh)
    return (4.0 * d2 - d1) / 3.0, h


@njit(cache=True)
def probe2(code, prm, F, xi, eta, phi0, h0):
    h = safe_step2(F, xi, eta, h0)
    if h < 0.0:
        return math.nan, -1.0
    d1 = (phi2(code, prm, F, xi, eta, h) - 2.0 * phi0
          + phi2(code, prm, F, xi, eta, -h)) / (h * h)
    hh = 0.5 * h
    d2 = (phi2(code, prm, F, xi, eta, hh) - 2.0 * phi0
          + phi2(code, prm, F, xi, eta, -hh)) / (hh * hh)
    return (4.0 * d2 - d1) / 3.0, h


@njit(cache=True)
def _coarse_row3(code, prm, F, dirs, h0, richardson, phi0, a):
    """Serial reduction of row a over eta indices b >= a."""
    m = dirs.shape[0]
    xi = dirs[a]
    best = np.inf
    bestb = -1
    for b in range(a, m):
        eta = dirs[b]
        h = safe_step3(F, xi, eta, h0)
        if h < 0.0:
            continue
        if richardson:
            v, _ = probe3(code, prm, F, xi, eta, phi0, h)
        else:
            v = (phi3_fast(code, prm, F, xi, eta, h) - 2.0 * phi0
                 + phi3_fast(code, prm, F, xi, eta, -h)) / (h * h)
        if v < best:
            best = v
            bestb = b
    return best, bestb


@njit(cache=True, parallel=True)
def coarse_min3(code, prm, F, dirs, h0, richardson):
    """Per-xi-slice minima of the probe over direction pairs, 3d.

    Requires symmetric F (callers pass diag(stretches)), so the probe
    value is symmetric in (xi, eta) and row a only reduces over b >= a;
    rows are paired front/back for thread balance. Each row is reduced
    serially, so the result is bit-identical for any thread count.
    Returns (mins, arg_eta) indexed by xi; the global minimizing pair
    always appears in its lower-index row.
    """
    m = dirs.shape[0]
    phi0 = phi3(code, prm, F, dirs[0], dirs[0], 0.0)
    mins = np.full(m, np.inf)
    arg = np.full(m, -1, dtype=np.int64)
    half = (m + 1) // 2
    for k in prange(half):
        best, bestb = _coarse_row3(code, prm, F, dirs, h0, richardson, phi0, k)
        mins[k] = best
        arg[k] = bestb
        a2 = m - 1 - k
        if a2 > k:
            best, bestb = _coarse_row3(code, prm, F, dirs, h0, richardson,
                                       phi0, a2)
            mins[a2] = best
            arg[a2] = bestb
    return mins, arg


@njit(cache=True)
def _coarse_row2(code, prm, F, dirs, h0, phi0, a):
    """Serial reduction of row a over eta indices b >= a."""
    m = dirs.shape[0]
    xi = dirs[a]
    best = np.inf
    bestb = -1
    for b in range(a, m):
        v, _ = probe2(code, prm, F, xi, dirs[b], phi0, h0)
        if not math.isnan(v) and v < best:
            best = v
            bestb = b
    return best, bestb


@njit(cache=True, parallel=True)
def coarse_min2(code, prm, F, dirs, h0):
    """2d analogue of coarse_min3; same symmetric-F triangular reduction."""
    m = dirs.shape[0]
    phi0 = phi2(code, prm, F, dirs[0], dirs[0], 0.0)
    mins = np.full(m, np.inf)
    arg = np.full(m, -1, dtype=np.int64)
    half = (m + 1) // 2
    for k in prange(half):
        best, bestb = _coarse_row2(code, prm, F, dirs, h0, phi0, k)
        mins[k] = best
        arg[k] = bestb
        a2 = m - 1 - k
        if a2 > k:
            best, bestb = _coarse_row2(code, prm, F, dirs, h0, phi0, a2)
            mins[a2] = best
            arg[a2] = bestb
    return mins, arg


def warmup():
    """Trigger compilation of the kernels on trivial inputs."""
    if not HAVE_NUMBA:
        return
    F3 = np.eye(3)
    F2 = np.eye(2)
    dirs3 = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    dirs2 = np.array([[1.0, 0.0], [0.0, 1.0]])
    prm = np.array([1.0, 1.0, 1.0])
    coarse_min3(DEV_HENCKY, prm, F3, dirs3, 1e-3, False)
    coarse_min3(DEV_HENCKY, prm, F3, dirs3, 1e-3, True)
    coarse_min2(DEV_HENCKY, prm, F2, dirs2, 1e-3)
