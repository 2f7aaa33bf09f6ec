"""Random-restart local optimization: the biseparability scan and the PPT moment boundary.

Local searches use scipy's BFGS driven by a central-difference gradient
(step ``1e-6``) that is evaluated as one batched call, so objectives here
take an array of parameter vectors and return an array of values.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .bloch import gellmann_basis
from .errors import NumericalError, UsageError
from .moments import prefactors
from .qmat import rng_for

FD_STEP = 1e-6
MAX_EVALS = 10_000
CONJECTURE_TOL = 1e-6


@dataclass(frozen=True)
class OptResult:
    best_value: float
    best_params: tuple
    restarts: int
    seed: int
    evaluations: int
    direction: str = "min"
    label: str = ""

    def to_dict(self):
        return {
            "best_value": self.best_value,
            "best_params": list(self.best_params),
            "restarts": self.restarts,
            "seed": self.seed,
            "evaluations": self.evaluations,
            "direction": self.direction,
            "label": self.label,
        }


class _Budget(Exception):
    pass


class _Counted:
    """Wraps a batched objective, counts evaluations and remembers the best point."""

    def __init__(self, fb, cap):
        self.fb = fb
        self.cap = cap
        self.count = 0
        self.best_x = None
        self.best_f = np.inf

    def batch(self, xs):
        if self.count + len(xs) > self.cap:
            raise _Budget
        vals = np.asarray(self.fb(xs), dtype=float)
        self.count += len(xs)
        if not np.all(np.isfinite(vals)):
            raise NumericalError("objective returned a non-finite value")
        i = int(np.argmin(vals))
        if vals[i] < self.best_f:
            self.best_f = float(vals[i])
            self.best_x = np.array(xs[i])
        return vals

    def value(self, x):
        return float(self.batch(x[None, :])[0])

    def grad(self, x):
        n = x.size
        steps = np.eye(n) * FD_STEP
        vals = self.batch(np.concatenate([x + steps, x - steps]))
        return (vals[:n] - vals[n:]) / (2 * FD_STEP)


def local_minimize(f, x0, tol=1e-8, batched=False, max_evals=MAX_EVALS):
    """Quasi-Newton descent from ``x0`` with numerical gradients.

    Stops when the gradient norm drops below ``tol`` or after ``max_evals``
    objective evaluations, whichever comes first. The best point seen is
    returned in either case. ``f`` maps a vector to a float, or an
    ``(k, n)`` array to ``k`` values when ``batched`` is true.
    """
    x0 = np.asarray(x0, dtype=float).ravel()
    fb = f if batched else (lambda xs: np.array([f(x) for x in xs]))
    c = _Counted(fb, max_evals)
    if not np.isfinite(c.value(x0)):
        raise NumericalError("objective is not finite at the starting point")
    try:
        minimize(c.value, x0, jac=c.grad, method="BFGS", options={"gtol": tol, "maxiter": max_evals})
    except _Budget:
        pass
    return OptResult(c.best_f, tuple(float(v) for v in c.best_x), 1, 0, c.count)


def _reduce(results, direction, seed, label):
    """Best over restarts; ties go to the earliest restart."""
    total = sum(r.evaluations for r in results)
    best = results[0]
    for r in results[1:]:
        if r.best_value < best.best_value:
            best = r
    value = best.best_value if direction == "min" else -best.best_value
    return OptResult(value, best.best_params, len(results), seed, total, direction, label)


def _run_all(jobs, workers):
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(lambda j: j(), jobs))
    return [j() for j in jobs]


# --- biseparability conjecture -------------------------------------------------

TERM_PARAMS = 13  # 2 complex amplitudes, 4 complex amplitudes, 1 weight


def bisep_assignments(max_terms):
    """Term counts ``(n_A|BC, n_B|AC, n_C|AB)`` up to permutations of the parties."""
    out = []
    for a in range(max_terms, -1, -1):
        for b in range(min(a, max_terms - a), -1, -1):
            c = max_terms - a - b
            if c <= b:
                out.append((a, b, c))
    return out


_PERMS = {0: (0, 1, 2), 1: (1, 0, 2), 2: (2, 0, 1)}


def _term_singles(assignment):
    return np.concatenate([np.full(k, s, dtype=int) for s, k in enumerate(assignment)])


def mixture_kets(params, singles):
    """Normalized kets ``(batch, terms, 2, 2, 2)`` and weights ``(batch, terms)``."""
    p = np.asarray(params, dtype=float).reshape(params.shape[0], len(singles), TERM_PARAMS)
    v1 = p[..., 0:2] + 1j * p[..., 2:4]
    v2 = p[..., 4:8] + 1j * p[..., 8:12]
    v1 = v1 / np.linalg.norm(v1, axis=-1, keepdims=True)
    v2 = v2 / np.linalg.norm(v2, axis=-1, keepdims=True)
    w = p[..., 12] ** 2
    w = w / np.sum(w, axis=-1, keepdims=True)
    psi = (v1[..., :, None] * v2[..., None, :]).reshape(*v1.shape[:2], 2, 2, 2)
    for s in (1, 2):
        sel = singles == s
        if np.any(sel):
            # axes (single, rest0, rest1) -> party order
            psi[:, sel] = np.transpose(psi[:, sel], (0, 1) + tuple(2 + a for a in np.argsort(_PERMS[s])))
    return psi, w


def bisep_objective_batch(params, singles):
    """``A2 + A3 - 3(1 + A1)`` for each parameter row; never positive if the conjecture holds."""
    psi, w = mixture_kets(params, singles)
    flat = psi.reshape(psi.shape[0], psi.shape[1], 8)
    gram = np.abs(np.einsum("bsi,bti->bst", flat.conj(), flat)) ** 2
    pur = np.einsum("bs,bt,bst->b", w, w, gram)
    marg = 0.0
    for spec in ("btajk,btcjk->bac", "btjak,btjck->bac", "btjka,btjkc->bac"):
        r = np.einsum(spec, psi * w[..., None, None, None] ** 0.5, psi.conj() * w[..., None, None, None] ** 0.5)
        marg = marg + np.sum(np.abs(r) ** 2, axis=(1, 2))
    return 8 * (1 + pur - marg)


def bisep_objective(mat):
    """The same objective for an explicit three-qubit density matrix."""
    from .polytope import purity_gap

    return 8 * purity_gap(np.asarray(mat), (2, 2, 2))


def bisep_conjecture_scan(max_terms=8, restarts=50, seed=0, workers=1, max_evals=MAX_EVALS, tol=1e-8):
    """Largest biseparability-bound violation over mixtures of biseparable pure states.

    Every way of spreading ``max_terms`` terms over the three cuts (up to
    relabelling the parties) gets ``restarts`` random starts; restart ``r``
    of assignment ``k`` draws from stream ``k * restarts + r``.
    """
    if not 1 <= max_terms <= 8:
        raise UsageError("max_terms must be between 1 and 8")
    if restarts < 1:
        raise UsageError("restarts must be positive")
    jobs = []
    for k, assignment in enumerate(bisep_assignments(max_terms)):
        singles = _term_singles(assignment)

        def fb(xs, singles=singles):
            return -bisep_objective_batch(xs, singles)

        for r in range(restarts):
            stream = k * restarts + r

            def job(fb=fb, stream=stream):
                x0 = rng_for(seed, stream).standard_normal(max_terms * TERM_PARAMS)
                return local_minimize(fb, x0, tol=tol, batched=True, max_evals=max_evals)

            jobs.append(job)
    return _reduce(_run_all(jobs, workers), "max", seed, f"bisep_conjecture max_terms={max_terms}")


# --- PPT boundary of the fourth moment -----------------------------------------

PENALTY_START = 1e3
PENALTY_GROWTH = 10.0
PENALTY_ROUNDS = 5


def _states_from_params(xs, d):
    """Normalized ``H^2`` for Hermitian ``H`` built from ``D^2`` reals per row."""
    D = d * d
    xs = np.asarray(xs, dtype=float)
    h = np.zeros((xs.shape[0], D, D), dtype=complex)
    iu = np.triu_indices(D, 1)
    h[:, np.arange(D), np.arange(D)] = xs[:, :D]
    m = len(iu[0])
    off = xs[:, D : D + m] + 1j * xs[:, D + m :]
    h[:, iu[0], iu[1]] = off
    h[:, iu[1], iu[0]] = off.conj()
    rho = h @ h
    tr = np.einsum("bii->b", rho).real
    return rho / tr[:, None, None]


def _batch_moments(rho, d):
    lam = gellmann_basis(d)[1:]
    t = np.einsum("bxyzw,izx,jwy->bij", rho.reshape(-1, d, d, d, d), lam, lam, optimize=True).real
    V, W = prefactors(d)
    q = np.sum(t**2, axis=(1, 2))
    g = np.einsum("bki,bkj->bij", t, t)
    quart = np.sum(g**2, axis=(1, 2))
    return V * q, W * (2 * quart + q * q)


def _pt_eigs(rho, d):
    pt = rho.reshape(-1, d, d, d, d).transpose(0, 1, 4, 3, 2).reshape(-1, d * d, d * d)
    return np.linalg.eigvalsh(pt)


def ppt_penalized(xs, d, target, weight):
    rho = _states_from_params(xs, d)
    s2, s4 = _batch_moments(rho, d)
    neg = np.minimum(_pt_eigs(rho, d), 0.0)
    return s4 + weight * ((s2 - target) ** 2 + np.sum(neg**2, axis=1))


def _ppt_point(target, d, restarts, seed, index, max_evals):
    best = None
    for r in range(restarts):
        rng = rng_for(seed, index * restarts + r)
        x = rng.standard_normal(d**4)
        weight = PENALTY_START
        evals = 0
        for _ in range(PENALTY_ROUNDS):
            res = local_minimize(
                lambda xs, w=weight: ppt_penalized(xs, d, target, w), x, tol=1e-10, batched=True, max_evals=max_evals
            )
            x = np.array(res.best_params)
            evals += res.evaluations
            weight *= PENALTY_GROWTH
        rho = _states_from_params(x[None, :], d)
        s2, s4 = _batch_moments(rho, d)
        cand = (float(s4[0]), float(s2[0]), float(np.min(_pt_eigs(rho, d))), evals)
        if best is None or cand[0] < best[0]:
            best = cand
    return best


def ppt_s4_boundary(s2_grid, d, restarts=10, seed=0, workers=1, max_evals=MAX_EVALS):
    """Numerical lower boundary of ``S4`` over PPT states at each target ``S2``.

    Returns a dict with the grid, the per-point minimum ``S4``, the ``S2``
    actually reached, the smallest partial-transpose eigenvalue of the
    optimizer's state and the evaluation counts. Penalties make the
    constraints approximate, so the residuals are reported alongside.
    """
    grid = [float(x) for x in s2_grid]
    if any(x < 0 or x > (d + 1) / (d - 1) + 1e-12 for x in grid):
        raise UsageError(f"grid must lie in [0, {(d + 1) / (d - 1):.6g}]")
    if restarts < 1:
        raise UsageError("restarts must be positive")
    jobs = [lambda i=i, x=x: _ppt_point(x, d, restarts, seed, i, max_evals) for i, x in enumerate(grid)]
    res = _run_all(jobs, workers)
    return {
        "d": d,
        "s2_grid": grid,
        "ppt_min": [r[0] for r in res],
        "s2_reached": [r[1] for r in res],
        "min_pt_eig": [r[2] for r in res],
        "evaluations": [r[3] for r in res],
    }
