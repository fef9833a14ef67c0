"""Direct rank-one convexity oracle via finite differences.

The oracle knows nothing about the principal-stretch criterion: it
probes the energy W(F) = g(singular values of F) along rank-one lines
F + t xi eta^T and estimates the second derivative at t = 0 with a
Richardson-extrapolated central difference. Minimizing that quadratic
form over unit direction pairs gives an independent ellipticity
verdict, used to cross-check the criterion.

Direction pairs are swept over a deterministic angle grid, the best
slices are polished with Nelder-Mead in angle space, and the reported
minimum is always a Richardson-grade value at the polished directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import _kernels as K
from .criteria import Status
from .energies import EnergySpec, as_stretch_array


class StepUnderflowError(RuntimeError):
    """Raised when no probe step keeps det(F + t xi eta^T) positive."""


def as_deformation_gradient(F) -> np.ndarray:
    """Validate a 2x2 or 3x3 deformation gradient with positive determinant."""
    arr = np.asarray(F, dtype=float)
    if arr.shape not in ((2, 2), (3, 3)):
        raise ValueError(f"F must be 2x2 or 3x3, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("F must be finite")
    if float(np.linalg.det(arr)) <= 0.0:
        raise ValueError("F must have positive determinant")
    return arr


def singular_values(F: np.ndarray) -> np.ndarray:
    """Singular values of F (ascending) via the Cauchy-Green eigenproblem."""
    n = F.shape[0]
    C = F.T @ F
    if n == 2:
        w = K.eig2_sym(C[0, 0], C[0, 1], C[1, 1])
    else:
        w = K.eig3_jacobi(C[0, 0], C[0, 1], C[0, 2], C[1, 1], C[1, 2], C[2, 2])
    w = np.maximum(np.sort(np.array(w)), 1e-300)
    return np.sqrt(w)


def energy_of_F(spec: EnergySpec, F) -> float:
    """Evaluate the energy at a full deformation gradient."""
    arr = as_deformation_gradient(F)
    if spec.n is not None and arr.shape[0] != spec.n:
        raise ValueError(f"energy '{spec.name}' expects n = {spec.n}, "
                         f"got {arr.shape[0]}x{arr.shape[0]} F")
    return float(spec.eval(singular_values(arr)))


def _unit(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    nrm = float(np.linalg.norm(arr))
    if abs(nrm - 1.0) > 1e-8:
        raise ValueError(f"{name} must be a unit vector, |{name}| = {nrm}")
    return arr / nrm


def _phi_py(spec: EnergySpec, F: np.ndarray, X: np.ndarray, t: float) -> float:
    return float(spec.eval(singular_values(F + t * X)))


def rank_one_form(spec: EnergySpec, F, xi, eta, step: float | None = None) -> float:
    """Second derivative of t -> W(F + t xi eta^T) at t = 0.

    Central second difference, Richardson extrapolated over steps h and
    h/2. The step starts at `step` (default 1e-3 (1 + max|F|)) and is
    halved, at most 40 times, until det stays positive at t = +-h;
    failing that raises StepUnderflowError. xi and eta must be unit
    vectors.
    """
    arr = as_deformation_gradient(F)
    if spec.n is not None and arr.shape[0] != spec.n:
        raise ValueError(f"energy '{spec.name}' expects n = {spec.n}")
    xiu = _unit(xi, "xi")
    etau = _unit(eta, "eta")
    if xiu.size != arr.shape[0] or etau.size != arr.shape[0]:
        raise ValueError("xi and eta must match the dimension of F")
    X = np.outer(xiu, etau)
    h = step if step is not None else 1e-3 * (1.0 + float(np.max(np.abs(arr))))
    ok = False
    for _ in range(41):
        if (np.linalg.det(arr + h * X) > 0.0
                and np.linalg.det(arr - h * X) > 0.0):
            ok = True
            break
        h *= 0.5
    if not ok:
        raise StepUnderflowError(
            "no probe step keeps det positive; F is numerically degenerate")
    phi0 = _phi_py(spec, arr, X, 0.0)
    d1 = (_phi_py(spec, arr, X, h) - 2.0 * phi0 + _phi_py(spec, arr, X, -h)) / (h * h)
    hh = 0.5 * h
    d2 = (_phi_py(spec, arr, X, hh) - 2.0 * phi0 + _phi_py(spec, arr, X, -hh)) / (hh * hh)
    return (4.0 * d2 - d1) / 3.0


@dataclass(frozen=True)
class OracleConfig:
    """Knobs for the grid-plus-refinement direction search."""

    grid: int = 24
    refine: int = 3
    tol: float = 1e-6
    base_step: float | None = None
    candidates: int = 6


@dataclass(frozen=True)
class AcousticProbe:
    """A rank-one probe direction pair with its form value and step."""

    xi: tuple[float, ...]
    eta: tuple[float, ...]
    value: float
    step: float


@dataclass(frozen=True)
class OracleVerdict:
    status: Status
    min_value: float
    probe: AcousticProbe
    grid: int
    refine: int
    tol: float
    method: str

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "min_value": self.min_value,
            "xi": list(self.probe.xi),
            "eta": list(self.probe.eta),
            "probe_step": self.probe.step,
            "grid": self.grid,
            "refine": self.refine,
            "tol": self.tol,
            "method": self.method,
        }


def _sphere_dirs(grid: int):
    """Direction grid on the unit sphere, poles deduplicated.

    Polar angle u in [0, pi] inclusive, azimuth v in [0, pi) (antipodal
    directions probe the same form). Returns (dirs, angles)."""
    us = np.linspace(0.0, math.pi, grid)
    vs = np.linspace(0.0, math.pi, grid, endpoint=False)
    dirs = []
    angles = []
    for iu, u in enumerate(us):
        if iu == 0 or iu == grid - 1:
            dirs.append((0.0, 0.0, 1.0 if iu == 0 else -1.0))
            angles.append((u, 0.0))
            continue
        su, cu = math.sin(u), math.cos(u)
        for v in vs:
            dirs.append((su * math.cos(v), su * math.sin(v), cu))
            angles.append((u, v))
    return np.array(dirs), np.array(angles)


def _circle_dirs(grid: int):
    alphas = np.linspace(0.0, math.pi, grid, endpoint=False)
    dirs = np.column_stack([np.cos(alphas), np.sin(alphas)])
    return dirs, alphas.reshape(-1, 1)


def _dir3(u: float, v: float) -> np.ndarray:
    su = math.sin(u)
    return np.array([su * math.cos(v), su * math.sin(v), math.cos(u)])


def _dir2(a: float) -> np.ndarray:
    return np.array([math.cos(a), math.sin(a)])


def _coarse_numpy(spec: EnergySpec, F: np.ndarray, dirs: np.ndarray,
                  h0: float, block: int = 32768):
    """Vectorized single-step coarse pass for energies without kernels.

    Probe steps come from the affine determinant det(F + t X) =
    det(F)(1 + t eta^T F^-1 xi), halved until positive at +-h. Like the
    compiled path this assumes symmetric F and only evaluates pairs with
    eta index >= xi index.
    """
    n = F.shape[0]
    m = dirs.shape[0]
    ia, ib = np.triu_indices(m)
    lam0 = singular_values(F)
    phi0 = float(spec.eval(lam0))
    detF = float(np.linalg.det(F))
    Finv = np.linalg.inv(F)

    q = np.einsum("pi,ij,pj->p", dirs[ib], Finv, dirs[ia])
    h = np.full(ia.size, h0)
    for _ in range(41):
        bad = detF * (1.0 - h * np.abs(q)) <= 0.0
        if not bad.any():
            break
        h[bad] *= 0.5

    vals = np.empty(ia.size)
    for s in range(0, ia.size, block):
        e = min(s + block, ia.size)
        X = dirs[ia[s:e], :, None] * dirs[ib[s:e], None, :]
        acc = None
        for sign in (1.0, -1.0):
            A = F[None, :, :] + (sign * h[s:e])[:, None, None] * X
            C = np.einsum("pji,pjk->pik", A, A)
            if n == 2:
                tr = C[:, 0, 0] + C[:, 1, 1]
                half = 0.5 * (C[:, 0, 0] - C[:, 1, 1])
                disc = np.sqrt(half * half + C[:, 0, 1] ** 2)
                w = np.column_stack([0.5 * tr - disc, 0.5 * tr + disc])
            else:
                w = np.linalg.eigvalsh(C)
            lam = np.sqrt(np.maximum(w, 1e-300))
            if spec.eval_batch is not None:
                g = np.asarray(spec.eval_batch(lam), dtype=float)
            else:
                g = np.array([spec.eval(row) for row in lam])
            acc = g if acc is None else acc + g
        vals[s:e] = (acc - 2.0 * phi0) / (h[s:e] * h[s:e])

    grid_vals = np.full((m, m), np.inf)
    grid_vals[ia, ib] = vals
    mins = grid_vals.min(axis=1)
    arg = grid_vals.argmin(axis=1)
    return mins, arg


def _probe_at(spec: EnergySpec, F: np.ndarray, xi: np.ndarray, eta: np.ndarray,
              phi0: float, h0: float):
    """Richardson probe choosing the compiled kernel when available."""
    if spec.kernel is not None and K.HAVE_NUMBA:
        code, prm = spec.kernel
        if F.shape[0] == 3:
            return K.probe3(code, prm, F, xi, eta, phi0, h0)
        return K.probe2(code, prm, F, xi, eta, phi0, h0)
    X = np.outer(xi, eta)
    h = h0
    for _ in range(41):
        if (np.linalg.det(F + h * X) > 0.0 and np.linalg.det(F - h * X) > 0.0):
            break
        h *= 0.5
    else:
        return math.nan, -1.0
    d1 = (_phi_py(spec, F, X, h) - 2.0 * phi0 + _phi_py(spec, F, X, -h)) / (h * h)
    hh = 0.5 * h
    d2 = (_phi_py(spec, F, X, hh) - 2.0 * phi0 + _phi_py(spec, F, X, -hh)) / (hh * hh)
    return (4.0 * d2 - d1) / 3.0, h


def min_acoustic(spec: EnergySpec, s, config: OracleConfig | None = None) -> OracleVerdict:
    """Minimize the rank-one form over direction pairs at F = diag(stretches).

    Deterministic: a coarse pass over the direction grid (parallel over
    slices, merged in slice order, ties to the lowest index), then
    Nelder-Mead polishing of the best slices in angle space, `refine`
    stages with shrinking initial simplex. Identical inputs give
    identical results for any thread count.
    """
    cfg = config or OracleConfig()
    lam = as_stretch_array(s)
    if spec.n is not None and lam.size != spec.n:
        raise ValueError(f"energy '{spec.name}' expects {spec.n} stretches")
    n = lam.size
    F = np.diag(lam)
    h0 = cfg.base_step if cfg.base_step is not None else 1e-3 * (1.0 + float(lam.max()))

    if n == 3:
        dirs, angles = _sphere_dirs(cfg.grid)
    else:
        dirs, angles = _circle_dirs(cfg.grid)

    use_kernel = spec.kernel is not None and K.HAVE_NUMBA
    if use_kernel:
        K.configure_threads()
        code, prm = spec.kernel
        if n == 3:
            mins, arg = K.coarse_min3(code, prm, F, dirs, h0, False)
        else:
            mins, arg = K.coarse_min2(code, prm, F, dirs, h0)
        mins = np.asarray(mins)
        arg = np.asarray(arg)
        method = "compiled"
    else:
        mins, arg = _coarse_numpy(spec, F, dirs, h0)
        method = "numpy"

    finite = np.isfinite(mins)
    if not finite.any():
        nanprobe = AcousticProbe(tuple(dirs[0]), tuple(dirs[0]), math.nan, -1.0)
        return OracleVerdict(Status.INDETERMINATE, math.nan, nanprobe,
                             cfg.grid, cfg.refine, cfg.tol, method)

    order = [int(i) for i in np.argsort(mins, kind="stable") if finite[i]]
    cand = order[:max(1, cfg.candidates)]

    phi0 = float(spec.eval(lam))

    def angles_of(idx_a: int, idx_b: int) -> np.ndarray:
        return np.concatenate([angles[idx_a], angles[idx_b]])

    def dirs_of(x: np.ndarray):
        if n == 3:
            return _dir3(x[0], x[1]), _dir3(x[2], x[3])
        return _dir2(x[0]), _dir2(x[1])

    def objective(x: np.ndarray) -> float:
        xi, eta = dirs_of(x)
        v, _ = _probe_at(spec, F, xi, eta, phi0, h0)
        return math.inf if math.isnan(v) else v

    dim = 4 if n == 3 else 2
    delta0 = math.pi / max(cfg.grid - 1, 1)

    best_x = None
    best_v = math.inf
    for a in cand:
        x0 = angles_of(a, int(arg[a]))
        v0 = objective(x0)
        if v0 < best_v:
            best_v, best_x = v0, x0
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"maxiter": 200 * dim, "xatol": 1e-8,
                                "fatol": 1e-13,
                                "initial_simplex": _simplex(x0, delta0)})
        if res.fun < best_v:
            best_v, best_x = res.fun, res.x

    for stage in range(1, max(cfg.refine, 1)):
        res = minimize(objective, best_x, method="Nelder-Mead",
                       options={"maxiter": 200 * dim, "xatol": 1e-9,
                                "fatol": 1e-14,
                                "initial_simplex": _simplex(best_x, delta0 / 2 ** stage)})
        if res.fun < best_v:
            best_v, best_x = res.fun, res.x

    xi, eta = dirs_of(np.asarray(best_x))
    value, step = _probe_at(spec, F, xi, eta, phi0, h0)
    if math.isnan(value) or value > best_v:
        value = best_v
    probe = AcousticProbe(tuple(float(c) for c in xi),
                          tuple(float(c) for c in eta),
                          float(value), float(step))
    status = Status.ELLIPTIC if value >= -cfg.tol else Status.VIOLATED
    return OracleVerdict(status, float(value), probe,
                         cfg.grid, cfg.refine, cfg.tol, method)


def _simplex(x0: np.ndarray, delta: float) -> np.ndarray:
    d = x0.size
    simp = np.tile(np.asarray(x0, dtype=float), (d + 1, 1))
    for i in range(d):
        simp[i + 1, i] += delta
    return simp


def oracle_verdict(spec: EnergySpec, s, tol: float = 1e-6,
                   grid: int = 24, refine: int = 3) -> OracleVerdict:
    """min_acoustic with a flat argument list; Elliptic iff min >= -tol."""
    return min_acoustic(spec, s, OracleConfig(grid=grid, refine=refine, tol=tol))
