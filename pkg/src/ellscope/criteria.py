"""Sufficient principal-stretch conditions for Legendre-Hadamard ellipticity.

For an isotropic energy g(lam_1, ..., lam_n), rank-one convexity of the
associated W(F) is implied by four families of scalar conditions on the
first and second partials of g (necessary and sufficient for n = 2):

  TE   g_ii >= 0                                   (tension-extension)
  BE   (lam_i g_i - lam_j g_j) / (lam_i - lam_j) >= 0   (Baker-Ericksen)
  C3   sqrt(g_ii g_jj)/(n-1) + g_ij + (g_i - g_j)/(lam_i - lam_j) >= 0
  C4   sqrt(g_ii g_jj)/(n-1) - g_ij + (g_i + g_j)/(lam_i + lam_j) >= 0

Margins reported here are normalized so they are dimensionless and, for
scale-invariant energies, unchanged under lam -> a lam: TE margins are
lam_i^2 g_ii, pair margins carry a factor lam_i lam_j (sqrt(lam_i lam_j)
for BE, whose quotient is itself degree -1 in the stretches). Coincident
stretch pairs are handled by the analytic limits of the divided
differences, evaluated at the pair midpoint.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .energies import EnergySpec, as_stretch_array, grad_g, hess_g

DEFAULT_TOL = 1e-9

# relative gap below which a stretch pair is treated as coincident
COALESCENT_RTOL = 1e-6


class Status(enum.Enum):
    ELLIPTIC = "Elliptic"
    VIOLATED = "Violated"
    INDETERMINATE = "Indeterminate"

    @property
    def exit_code(self) -> int:
        return {"Elliptic": 0, "Violated": 2, "Indeterminate": 3}[self.value]

    @property
    def letter(self) -> str:
        return {"Elliptic": "E", "Violated": "V", "Indeterminate": "I"}[self.value]


@dataclass(frozen=True)
class EllipticityVerdict:
    """Outcome of the pointwise sufficient-criterion check.

    Margins are ordered: te_margins by stretch index, pair margins by the
    pair order (0,1), (0,2), (1,2) for n = 3 and (0,1) for n = 2. c3/c4
    entries are NaN when their square root argument was genuinely
    negative; NaN margins never participate in the worst margin.
    """

    status: Status
    n: int
    te_margins: tuple[float, ...]
    be_margins: tuple[float, ...]
    c3_margins: tuple[float, ...]
    c4_margins: tuple[float, ...]
    pairs: tuple[tuple[int, int], ...]
    worst_label: str
    worst_margin: float
    tol: float

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "n": self.n,
            "te_margins": list(self.te_margins),
            "be_margins": list(self.be_margins),
            "c3_margins": list(self.c3_margins),
            "c4_margins": list(self.c4_margins),
            "pairs": [list(p) for p in self.pairs],
            "worst_label": self.worst_label,
            "worst_margin": self.worst_margin,
            "tol": self.tol,
        }


def _pairs(n: int) -> tuple[tuple[int, int], ...]:
    return ((0, 1),) if n == 2 else ((0, 1), (0, 2), (1, 2))


def _coincident(a: float, b: float) -> bool:
    return abs(a - b) <= COALESCENT_RTOL * max(a, b)


def _midpoint_state(spec: EnergySpec, lam: np.ndarray, i: int, j: int):
    mid = lam.copy()
    m = 0.5 * (lam[i] + lam[j])
    mid[i] = m
    mid[j] = m
    return m, grad_g(spec, mid), hess_g(spec, mid)


def te_margin(spec: EnergySpec, s, i: int) -> float:
    """Normalized tension-extension margin lam_i^2 g_ii (zero-based i)."""
    lam = as_stretch_array(s)
    h = hess_g(spec, lam)
    return float(lam[i] * lam[i] * h[i, i])


def be_margin(spec: EnergySpec, s, i: int, j: int) -> float:
    """Normalized Baker-Ericksen margin for the pair (i, j), zero-based.

    sqrt(lam_i lam_j) * (lam_i g_i - lam_j g_j) / (lam_i - lam_j); for a
    coincident pair the divided difference is replaced by its limit
    g_i + lam (g_ii - g_ij) at the pair midpoint.
    """
    lam = as_stretch_array(s)
    if _coincident(lam[i], lam[j]):
        m, g, h = _midpoint_state(spec, lam, i, j)
        return float(m * (g[i] + m * (h[i, i] - h[i, j])))
    g = grad_g(spec, lam)
    quot = (lam[i] * g[i] - lam[j] * g[j]) / (lam[i] - lam[j])
    return float(math.sqrt(lam[i] * lam[j]) * quot)


def _sqrt_term(te_i: float, te_j: float, n: int, tol: float) -> float:
    """(1/(n-1)) lam_i lam_j sqrt(g_ii g_jj) in normalized form, or NaN.

    The product te_i * te_j equals lam_i^2 lam_j^2 g_ii g_jj. A negative
    product with the offending TE margin inside the tolerance band is
    treated as zero; a genuinely negative TE margin makes the square
    root undefined and yields NaN.
    """
    prod = te_i * te_j
    if prod < 0.0:
        if min(te_i, te_j) < -tol:
            return math.nan
        prod = 0.0
    return math.sqrt(prod) / (n - 1)


def c3_margin(spec: EnergySpec, s, i: int, j: int, tol: float = DEFAULT_TOL) -> float:
    """Normalized mixed condition with the difference quotient, pair (i, j).

    lam_i lam_j * [sqrt(g_ii g_jj)/(n-1) + g_ij + (g_i - g_j)/(lam_i - lam_j)].
    Coincident pairs use the limit g_ii - g_ij of the quotient at the
    midpoint. Returns NaN when g_ii g_jj < 0 beyond tolerance.
    """
    lam = as_stretch_array(s)
    n = lam.size
    if _coincident(lam[i], lam[j]):
        m, g, h = _midpoint_state(spec, lam, i, j)
        te_i = m * m * h[i, i]
        te_j = m * m * h[j, j]
        root = _sqrt_term(te_i, te_j, n, tol)
        return float(root + m * m * (h[i, j] + (h[i, i] - h[i, j])))
    g = grad_g(spec, lam)
    h = hess_g(spec, lam)
    te_i = lam[i] * lam[i] * h[i, i]
    te_j = lam[j] * lam[j] * h[j, j]
    root = _sqrt_term(te_i, te_j, n, tol)
    quot = (g[i] - g[j]) / (lam[i] - lam[j])
    return float(root + lam[i] * lam[j] * (h[i, j] + quot))


def c4_margin(spec: EnergySpec, s, i: int, j: int, tol: float = DEFAULT_TOL) -> float:
    """Normalized mixed condition with the sum quotient, pair (i, j).

    lam_i lam_j * [sqrt(g_ii g_jj)/(n-1) - g_ij + (g_i + g_j)/(lam_i + lam_j)].
    Returns NaN when g_ii g_jj < 0 beyond tolerance.
    """
    lam = as_stretch_array(s)
    n = lam.size
    g = grad_g(spec, lam)
    h = hess_g(spec, lam)
    te_i = lam[i] * lam[i] * h[i, i]
    te_j = lam[j] * lam[j] * h[j, j]
    root = _sqrt_term(te_i, te_j, n, tol)
    quot = (g[i] + g[j]) / (lam[i] + lam[j])
    return float(root + lam[i] * lam[j] * (-h[i, j] + quot))


def check_point(spec: EnergySpec, s, tol: float = DEFAULT_TOL) -> EllipticityVerdict:
    """Evaluate all conditions at one stretch point and classify it.

    Status is Violated when any finite normalized margin is below -tol,
    Indeterminate when a c3/c4 square root argument is negative while
    every TE margin sits inside the tolerance band (the criterion cannot
    decide), and Elliptic otherwise. For n = 2 the conditions are
    necessary and sufficient, so Elliptic/Violated are exact there.
    """
    lam = as_stretch_array(s)
    n = lam.size
    g = grad_g(spec, lam)
    h = hess_g(spec, lam)

    te = tuple(float(lam[i] * lam[i] * h[i, i]) for i in range(n))
    pairs = _pairs(n)

    be = []
    c3 = []
    c4 = []
    saw_negative_radicand = False
    for (i, j) in pairs:
        if _coincident(lam[i], lam[j]):
            m, gm, hm = _midpoint_state(spec, lam, i, j)
            te_i = m * m * hm[i, i]
            te_j = m * m * hm[j, j]
            root = _sqrt_term(te_i, te_j, n, tol)
            if te_i * te_j < 0.0:
                saw_negative_radicand = True
            be.append(float(m * (gm[i] + m * (hm[i, i] - hm[i, j]))))
            c3.append(float(root + m * m * hm[i, i]))
            c4.append(float(root + m * m * (-hm[i, j] + (gm[i] + gm[j]) / (2.0 * m))))
        else:
            te_i, te_j = te[i], te[j]
            if te_i * te_j < 0.0:
                saw_negative_radicand = True
            root = _sqrt_term(te_i, te_j, n, tol)
            quot_be = (lam[i] * g[i] - lam[j] * g[j]) / (lam[i] - lam[j])
            be.append(float(math.sqrt(lam[i] * lam[j]) * quot_be))
            quot_diff = (g[i] - g[j]) / (lam[i] - lam[j])
            quot_sum = (g[i] + g[j]) / (lam[i] + lam[j])
            c3.append(float(root + lam[i] * lam[j] * (h[i, j] + quot_diff)))
            c4.append(float(root + lam[i] * lam[j] * (-h[i, j] + quot_sum)))

    labels = [f"te_{i + 1}" for i in range(n)]
    margins = list(te)
    for k, (i, j) in enumerate(pairs):
        for kind, vals in (("be", be), ("c3", c3), ("c4", c4)):
            labels.append(f"{kind}_{i + 1}{j + 1}")
            margins.append(vals[k])

    finite = [(m, lbl) for m, lbl in zip(margins, labels) if not math.isnan(m)]
    worst_margin, worst_label = min(finite, key=lambda t: t[0])

    if worst_margin < -tol:
        status = Status.VIOLATED
    elif saw_negative_radicand and all(abs(t) <= tol for t in te):
        status = Status.INDETERMINATE
    else:
        status = Status.ELLIPTIC

    return EllipticityVerdict(
        status=status, n=n,
        te_margins=te, be_margins=tuple(be),
        c3_margins=tuple(c3), c4_margins=tuple(c4),
        pairs=pairs, worst_label=worst_label,
        worst_margin=float(worst_margin), tol=tol,
    )
