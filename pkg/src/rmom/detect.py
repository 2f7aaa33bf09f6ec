"""Entanglement detectors and the (S2, S4) regions of separable and general states.

For two qudits the sphere moments depend only on the singular values
``tau`` of the correlation matrix:

    S2 = sum(tau^2) / (d-1)^2,   S4 = [2 sum(tau^4) + (sum tau^2)^2] / (3 (d-1)^4).

Separable states obey ``sum(tau) <= d-1``. At fixed ``S2`` the largest
``S4`` comes from a single non-zero ``tau`` and gives ``S4 = S2^2``. The
smallest needs the minimum of ``sum(tau^4)`` on the sphere ``sum(tau^2) = Q``
intersected with the simplex ``sum(tau) <= L``. Its KKT conditions make
every positive ``tau`` a root of ``4 t^3 - 2 mu t + nu``, a cubic with at
most two positive roots, so the optimum takes at most two distinct non-zero
values and can be found by enumerating their multiplicities.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .bloch import correlation_array
from .errors import UsageError
from .moments import MomentPair, prefactors, s_moments
from .qmat import min_eigenvalue, partial_trace_array, partial_transpose_array, rng_for, trace_norm

PPT_TOL = 1e-9
BOUND_TOL = 1e-9
REGION_TOL = 1e-7

SEPARABLE = "separable-consistent"
ENTANGLED = "entangled"
BOUND_CANDIDATE = "bound-entangled-candidate"


def _bipartite(rho, equal=False):
    if rho.n != 2:
        raise UsageError(f"need a bipartite state, got {rho.n} parties")
    if equal and rho.dims[0] != rho.dims[1]:
        raise UsageError(f"need equal local dimensions, got {rho.dims}")


def ppt_test(rho):
    """Smallest eigenvalue of the partial transpose on the second party."""
    _bipartite(rho)
    return min_eigenvalue(partial_transpose_array(rho.mat, rho.dims, 1))


def realign(mat, d):
    """Realigned matrix ``R[(i,j),(k,l)] = rho[(i,k),(j,l)]``."""
    return np.asarray(mat).reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)


def ccnr_test(rho):
    """Trace norm of the realigned matrix; separable states give at most 1."""
    _bipartite(rho, equal=True)
    return trace_norm(realign(rho.mat, rho.dims[0]))


def dv_test(rho):
    """Trace norm of the correlation matrix; separable states give at most ``d-1``."""
    _bipartite(rho, equal=True)
    return trace_norm(correlation_array(rho.mat, rho.dims[0]))


def purity_test(rho):
    """``tr(rho^2) - min(tr rho_A^2, tr rho_B^2)``; positive values reveal entanglement."""
    _bipartite(rho)
    marg = [partial_trace_array(rho.mat, rho.dims, [k]) for k in range(2)]
    pur = [float(np.real(np.vdot(m, m))) for m in marg]
    return rho.purity - min(pur)


def _check_s2(s2, d):
    s2 = np.asarray(s2, dtype=float)
    if d < 2:
        raise UsageError("d must be >= 2")
    if np.any(s2 < 0) or np.any(s2 > 1 + 1e-12):
        raise UsageError("separable region is defined for 0 <= s2 <= 1")
    return np.clip(s2, 0.0, 1.0)


def _min_quartic(q, lim, n):
    """Minimum of ``sum t^4`` over ``t >= 0`` in R^n with ``sum t^2 = q``, ``sum t <= lim``."""
    if q <= 0:
        return 0.0
    best = np.inf
    # trace constraint inactive: k equal entries
    k = min(n, int(np.floor(lim * lim / q * (1 + 1e-14))))
    if k >= 1:
        best = q * q / k
    # trace constraint active: k entries at a, m at b, a >= b > 0
    for kk in range(1, n + 1):
        for m in range(1, n - kk + 1):
            disc = kk * m * ((kk + m) * q - lim * lim)
            if disc < 0:
                continue
            a = (kk * lim + np.sqrt(disc)) / (kk * (kk + m))
            b = (lim - kk * a) / m
            if b < -1e-15 or b > a + 1e-15:
                continue
            b = max(b, 0.0)
            best = min(best, kk * a**4 + m * b**4)
    return float(best)


def sep_region(s2, d):
    """``(s4_min, s4_max)`` for separable two-qudit states at second moment ``s2``."""
    s2 = float(_check_s2(s2, d))
    lim = d - 1.0
    q = s2 * lim * lim
    _, W = prefactors(d)
    lo = W * (2 * _min_quartic(q, lim, d * d - 1) + q * q)
    return min(lo, s2 * s2), s2 * s2


def sep_min_numeric(s2, d, restarts=20, seed=0):
    """Independent check on the lower separable boundary by SLSQP with random starts."""
    s2 = float(_check_s2(s2, d))
    n = d * d - 1
    lim = d - 1.0
    q = s2 * lim * lim
    _, W = prefactors(d)
    if q == 0:
        return 0.0
    rng = rng_for(seed, 0)
    cons = [
        {"type": "eq", "fun": lambda t: np.dot(t, t) - q, "jac": lambda t: 2 * t},
        {"type": "ineq", "fun": lambda t: lim - np.sum(t), "jac": lambda t: -np.ones_like(t)},
    ]
    best = np.inf
    for _ in range(restarts):
        x0 = rng.dirichlet(np.ones(n) * rng.uniform(0.2, 3)) * lim
        x0 *= np.sqrt(q) / np.linalg.norm(x0)
        res = minimize(
            lambda t: np.sum(t**4),
            x0,
            jac=lambda t: 4 * t**3,
            constraints=cons,
            bounds=[(0, lim)] * n,
            method="SLSQP",
            options={"ftol": 1e-15, "maxiter": 500},
        )
        t = res.x
        if abs(np.dot(t, t) - q) < 1e-9 and np.sum(t) <= lim + 1e-9 and np.all(t >= -1e-12):
            best = min(best, float(np.sum(t**4)))
    return float(W * (2 * best + q * q))


def general_region_min(s2, d):
    """Smallest ``S4`` of any two-qudit state at ``s2``; attained by isotropic states."""
    s2 = np.asarray(s2, dtype=float)
    if np.any(s2 < 0) or np.any(s2 > (d + 1) / (d - 1) + 1e-12):
        raise UsageError(f"general region needs 0 <= s2 <= {(d + 1) / (d - 1):.6g}")
    out = s2 * s2 * (d * d + 1) / (3 * (d * d - 1))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class RegionCurve:
    d: int
    s2_grid: list
    sep_min: list
    sep_max: list
    gen_min: list
    ppt_min: list = field(default=None)

    def rows(self):
        cols = [self.s2_grid, self.sep_min, self.sep_max, self.gen_min]
        if self.ppt_min is not None:
            cols.append(self.ppt_min)
        return list(zip(*cols))

    @property
    def columns(self):
        names = ["s2", "s4_sep_min", "s4_sep_max", "s4_gen_min"]
        return names + ["s4_ppt_min"] if self.ppt_min is not None else names


def region_curve(d, s2_grid, ppt_min=None):
    """Separable and general boundaries on ``s2_grid`` (values in ``[0, 1]``)."""
    grid = [float(x) for x in s2_grid]
    pairs = [sep_region(x, d) for x in grid]
    return RegionCurve(
        d,
        grid,
        [p[0] for p in pairs],
        [p[1] for p in pairs],
        [general_region_min(x, d) for x in grid],
        None if ppt_min is None else [float(v) for v in ppt_min],
    )


def outside_separable_region(mp):
    """True when ``(S2, S4)`` is beyond the separable region by more than the tolerance."""
    if mp.s2 > 1 + REGION_TOL:
        return True
    lo, hi = sep_region(min(mp.s2, 1.0), mp.d)
    return mp.s4 < lo - REGION_TOL or mp.s4 > hi + REGION_TOL


@dataclass(frozen=True)
class DetectionReport:
    state_label: str
    d: int
    ppt_min_eig: float
    ccnr_norm: float
    dv_norm: float
    purity_gap: float
    moments: MomentPair
    verdicts: dict

    @property
    def overall(self):
        vals = set(self.verdicts.values())
        for v in (ENTANGLED, BOUND_CANDIDATE):
            if v in vals:
                return v
        return SEPARABLE

    def to_dict(self):
        return {
            "state_label": self.state_label,
            "d": self.d,
            "ppt_min_eig": self.ppt_min_eig,
            "ccnr_norm": self.ccnr_norm,
            "dv_norm": self.dv_norm,
            "purity_gap": self.purity_gap,
            "moments": {"s2": self.moments.s2, "s4": self.moments.s4},
            "verdicts": dict(self.verdicts),
            "overall": self.overall,
        }


def moment_witness(rho, label="state"):
    """Run every detector on a two-qudit state and label each outcome."""
    _bipartite(rho, equal=True)
    d = rho.dims[0]
    mp = s_moments(correlation_array(rho.mat, d))
    ppt = ppt_test(rho)
    ccnr = ccnr_test(rho)
    dv = dv_test(rho)
    pur = purity_test(rho)
    is_ppt = ppt >= -PPT_TOL
    hit = ENTANGLED if not is_ppt else BOUND_CANDIDATE

    def label_of(violated):
        return hit if violated else SEPARABLE

    verdicts = {
        "ppt": SEPARABLE if is_ppt else ENTANGLED,
        "ccnr": label_of(ccnr > 1 + BOUND_TOL),
        "dv": label_of(dv > d - 1 + BOUND_TOL),
        "purity": label_of(pur > BOUND_TOL),
        "moments": label_of(outside_separable_region(mp)),
    }
    return DetectionReport(label, d, ppt, ccnr, dv, pur, mp, verdicts)
