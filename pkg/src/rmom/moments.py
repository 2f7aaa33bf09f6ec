"""Second and fourth moments of randomized local measurements.

Two families of moments live here:

* the sphere moments ``S2``, ``S4``: averages over unit vectors on the
  ``(d^2-1)``-sphere contracted with the Gell-Mann vector, available in closed
  form from the correlation matrix;
* the unitary moments ``R^(r)``: averages over Haar-random local unitaries of
  the ``r``-th power of ``<(U_A M U_A^+) x (U_B M U_B^+)>``, estimated here by
  Monte Carlo.

With the observable from :func:`moment_observable` the two agree up to the
constant factors applied in :func:`r_to_s`.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln

from .bloch import correlation_array
from .errors import NumericalError, UsageError
from .qmat import haar_unitaries, kron, rng_for

MC_BATCHES = 100


@dataclass(frozen=True)
class MomentPair:
    s2: float
    s4: float
    d: int
    source: str = "analytic"
    samples: int = 0
    std_err_s2: float = 0.0
    std_err_s4: float = 0.0


@dataclass(frozen=True)
class MomentObservable:
    d: int
    eigenvalues: tuple
    y: float

    @property
    def matrix(self):
        return np.diag(self.eigenvalues)


def prefactors(d):
    """``(V, W)`` with ``S2 = V sum tau^2`` and ``S4 = W [2 sum tau^4 + (sum tau^2)^2]``."""
    return 1.0 / (d - 1) ** 2, 1.0 / (3.0 * (d - 1) ** 4)


def _dim_from_size(size):
    d = int(round(np.sqrt(size + 1)))
    if d * d - 1 != size or d < 2:
        raise UsageError(f"correlation matrix of size {size} is not (d^2-1) square")
    return d


def s_moments_from_singvals(tau, d):
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise UsageError("singular values must be non-negative")
    if tau.size > d * d - 1:
        raise UsageError(f"at most {d * d - 1} singular values for d={d}")
    V, W = prefactors(d)
    q = float(np.sum(tau**2))
    return MomentPair(V * q, W * (2 * float(np.sum(tau**4)) + q * q), d)


def s4_literal(t):
    """Fourth sphere moment by the explicit four-index sum over ``t_ij``.

    Quartic in the matrix size; kept as an independent check on the
    singular-value route.
    """
    t = np.asarray(t, dtype=float)
    m = t.shape[0]
    d = _dim_from_size(m)
    _, W = prefactors(d)
    off = ~np.eye(m, dtype=bool)
    t2 = t**2
    term1 = 3 * np.sum(t2**2)
    # sum_{i != j, k} t_ik^2 t_jk^2 and the transposed version
    term2 = 3 * np.einsum("ik,jk,ij->", t2, t2, off)
    term3 = 3 * np.einsum("ki,kj,ij->", t2, t2, off)
    term4 = np.einsum("ij,kl,ik,jl->", t2, t2, off, off)
    term5 = 2 * np.einsum("ij,il,kj,kl,ik,jl->", t, t, t, t, off, off, optimize=True)
    return float(W * (term1 + term2 + term3 + term4 + term5))


def s_moments(t, method="svd"):
    """Sphere moments ``(S2, S4)`` of a correlation matrix ``t``."""
    t = np.asarray(t, dtype=float)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise UsageError(f"correlation matrix must be square, got {t.shape}")
    d = _dim_from_size(t.shape[0])
    if method == "svd":
        return s_moments_from_singvals(np.linalg.svd(t, compute_uv=False), d)
    if method == "literal":
        V, _ = prefactors(d)
        return MomentPair(V * float(np.sum(t**2)), s4_literal(t), d)
    raise UsageError(f"unknown method {method!r}")


def state_moments(rho):
    return s_moments(correlation_array(rho.mat, rho.local_dim()))


def _log_double_factorial(m):
    if m <= 0:
        return 0.0
    if m % 2:
        return (m + 1) / 2 * np.log(2) + gammaln(m / 2 + 1) - 0.5 * np.log(np.pi)
    return m / 2 * np.log(2) + gammaln(m / 2 + 1)


def normalization_N(r, d):
    """Normalization of the sphere average that sets ``S^(r) = 1`` on pure products."""
    if r not in (2, 4):
        raise UsageError(f"normalization only defined for r in (2, 4), got {r}")
    if d < 2:
        raise UsageError("d must be >= 2")
    n = d * d - 1
    log_n = (
        2 * _log_double_factorial(d * d + r - 3)
        - r * np.log(d - 1)
        - 2 * _log_double_factorial(r - 1)
        - 2 * _log_double_factorial(d * d - 3)
        + 2 * (gammaln(n / 2) - np.log(2) - n / 2 * np.log(np.pi))
    )
    return float(np.exp(log_n))


def prefactors_from_normalization(d):
    """``(V, W)`` recomputed from :func:`normalization_N` via the sphere integrals."""
    n = d * d - 1
    log_pi = n * np.log(np.pi)
    v = normalization_N(2, d) * np.exp(log_pi - 2 * gammaln((d * d + 1) / 2))
    w = normalization_N(4, d) * 3 / 4 * np.exp(log_pi - 2 * gammaln((d * d + 3) / 2))
    return float(v), float(w)


def quartic_target(d):
    """Value of ``tr(M^4)`` that makes Haar fourth moments isotropic.

    For traceless ``M`` with ``tr(M^2) = d`` the Haar average of
    ``tr(U M U^+ H)^4`` over traceless ``H`` reduces to
    ``c1 tr(H^4) + c2 tr(H^2)^2``; ``c1`` vanishes exactly at this value.
    """
    return d * (2 * d * d - 3) / (d * d + 1)


def _odd_eigs(d):
    y = 0.5 * (1 - np.sqrt(1 + (d + 3 + np.sqrt(d**3 + 3 * d * d + d + 3)) / (d - 2)))
    s = (2 * y - 1) ** 2
    ap = (d - 2 * y + 1) / np.sqrt((d - 1) * (s + d))
    am = (-d - 2 * y + 1) / np.sqrt((d - 1) * (s + d))
    beta = -np.sqrt((d - 1) * s / (s + d))
    h = (d - 1) // 2
    return np.array([ap] * h + [beta] + [am] * h), float(y)


def _even_eigs(d, y):
    # eigenvalue pattern (d-2)/2 x plus, 1 x beta, d/2 x minus; rescaled to tr M^2 = d
    e = np.array(
        [2 * d - 4 * (y - 1)] * ((d - 2) // 2) + [2 * d * (2 * y - 1) - 4 * (y - 1)] + [-2 * d - 4 * (y - 1)] * (d // 2),
        dtype=float,
    )
    return e * np.sqrt(d / np.sum(e**2))


def _even_root(d):
    target = quartic_target(d)

    def gap(y):
        return float(np.sum(_even_eigs(d, y) ** 4) - target)

    ys = np.linspace(-10, 10, 4001)
    g = np.array([gap(y) for y in ys])
    for i in np.flatnonzero(np.sign(g[:-1]) * np.sign(g[1:]) <= 0):
        if g[i] == 0:
            return float(ys[i])
        return float(brentq(gap, ys[i], ys[i + 1], xtol=1e-14, rtol=1e-15))
    raise NumericalError(f"no real root for the d={d} observable")


def moment_observable(d):
    """Diagonal observable whose Haar moments reproduce the sphere moments.

    ``d = 2`` is Pauli-Z. Odd ``d`` uses the closed form; even ``d`` solves
    :func:`quartic_target` on a one-parameter eigenvalue family and takes the
    smallest root.
    """
    d = int(d)
    if d < 2:
        raise UsageError("d must be >= 2")
    if d == 2:
        return MomentObservable(2, (1.0, -1.0), float("nan"))
    if d % 2:
        eigs, y = _odd_eigs(d)
    else:
        y = _even_root(d)
        eigs = _even_eigs(d, y)
    eigs = eigs - eigs.mean()
    eigs *= np.sqrt(d / np.sum(eigs**2))
    return MomentObservable(d, tuple(float(x) for x in eigs), y)


def r_to_s(r2, r4, d):
    """Convert unitary moments measured with :func:`moment_observable` to sphere moments."""
    f2 = (d + 1) ** 2
    f4 = (d + 1) ** 2 * (d * d + 1) ** 2 / (9 * (d - 1) ** 2)
    return MomentPair(f2 * r2, f4 * r4, d)


def _batch_sizes(samples, batches):
    base, extra = divmod(samples, batches)
    return [base + (1 if b < extra else 0) for b in range(batches)]


def _correlator_samples(rho_tensors, eigs, d, size, seed, stream):
    rng = rng_for(seed, stream)
    ua = haar_unitaries(d, size, rng)
    ub = haar_unitaries(d, size, rng)
    a = np.einsum("nij,j,nkj->nik", ua, eigs, ua.conj())
    b = np.einsum("nij,j,nkj->nik", ub, eigs, ub.conj())
    # <ij|rho|kl> A_ki B_lj
    out = []
    for t in rho_tensors:
        x = np.einsum("ijkl,nlj->nik", t, b, optimize=True)
        out.append(np.einsum("nik,nki->n", x, a).real)
    return out


@dataclass(frozen=True)
class MCEstimate:
    r: int
    mean: float
    std_err: float


def mc_moments_many(states, obs, r_list=(2, 4), samples=100_000, seed=0, workers=1):
    """Monte Carlo unitary moments for several states from shared unitary draws.

    Samples are split into a fixed number of batches; batch ``b`` draws from
    stream ``(seed, b)``. Standard errors are batch-mean errors. Results are
    identical for any ``workers`` because batches are reduced in index order.
    """
    if samples < MC_BATCHES:
        raise UsageError(f"need at least {MC_BATCHES} samples")
    d = obs.d
    tensors = []
    for rho in states:
        if rho.n != 2 or rho.dims[0] != rho.dims[1] or rho.dims[0] != d:
            raise UsageError("Monte Carlo moments need a d x d state matching the observable")
        tensors.append(rho.mat.reshape(d, d, d, d))
    eigs = np.array(obs.eigenvalues)
    sizes = _batch_sizes(samples, MC_BATCHES)
    r_list = sorted({int(r) for r in r_list})

    def run(b):
        vals = _correlator_samples(tensors, eigs, d, sizes[b], seed, b)
        return [[float(np.mean(v**r)) for r in r_list] for v in vals]

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            per_batch = list(ex.map(run, range(MC_BATCHES)))
    else:
        per_batch = [run(b) for b in range(MC_BATCHES)]
    per_batch = np.array(per_batch)  # (batch, state, r)
    w = np.array(sizes, dtype=float) / samples
    results = []
    for s in range(len(states)):
        est = {}
        for k, r in enumerate(r_list):
            bm = per_batch[:, s, k]
            mean = float(np.dot(w, bm))
            err = float(np.std(bm, ddof=1) / np.sqrt(MC_BATCHES))
            est[r] = MCEstimate(r, mean, err)
        results.append(est)
    return results


def mc_moments(rho, obs, r_list=(2, 4), samples=100_000, seed=0, workers=1):
    return mc_moments_many([rho], obs, r_list, samples, seed, workers)[0]


def mc_moment_pair(est, d, samples=0):
    """Sphere moments and their errors from Monte Carlo ``r = 2, 4`` estimates."""
    conv = r_to_s(est[2].mean, est[4].mean, d)
    errs = r_to_s(est[2].std_err, est[4].std_err, d)
    return MomentPair(conv.s2, conv.s4, d, "monte_carlo", samples, errs.s2, errs.s4)


_PAULI = np.array([[[1, 0], [0, 1]], [[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def pauli_r2(rho, subset):
    """Exact second moment on ``subset`` from the Pauli two-design.

    Builds every Pauli string that is non-identity exactly on ``subset`` and
    averages the squared expectation values.
    """
    if set(rho.dims) != {2}:
        raise UsageError("Pauli moments need an all-qubit state")
    subset = sorted({int(p) for p in subset})
    if not subset or subset[0] < 0 or subset[-1] >= rho.n:
        raise UsageError(f"invalid subset {subset}")
    total = 0.0
    for labels in product((1, 2, 3), repeat=len(subset)):
        ops = [_PAULI[0]] * rho.n
        for p, l in zip(subset, labels):
            ops[p] = _PAULI[l]
        total += np.real(np.trace(rho.mat @ kron(*ops))) ** 2
    return total / 3 ** len(subset)

