"""Dense linear-algebra kernels for density matrices.

Everything here works on plain ``numpy`` arrays; :class:`DensityMatrix`
is a thin validated wrapper that carries the subsystem dimensions.
"""

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import NumericalError, UsageError

HERM_TOL = 1e-9
TRACE_TOL = 1e-9
PSD_TOL = -1e-9
MAX_DIM = 256


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix on ``prod(dims)``.

    Construction validates the invariants and raises
    :class:`~rmom.errors.NumericalError` when one fails. The stored array is
    made read-only so instances can be shared freely.
    """

    mat: np.ndarray
    dims: tuple

    def __post_init__(self):
        dims = tuple(int(x) for x in self.dims)
        if not dims or any(x < 2 for x in dims):
            raise UsageError(f"subsystem dimensions must be >= 2, got {dims}")
        mat = np.array(self.mat, dtype=complex)
        total = int(np.prod(dims))
        if mat.shape != (total, total):
            raise UsageError(f"matrix shape {mat.shape} does not match dims {dims}")
        if total > MAX_DIM:
            raise UsageError(f"total dimension {total} exceeds {MAX_DIM}")
        if not np.all(np.isfinite(mat)):
            raise NumericalError("density matrix has non-finite entries")
        if np.max(np.abs(mat - mat.conj().T)) > HERM_TOL:
            raise NumericalError("density matrix is not Hermitian")
        if abs(np.trace(mat) - 1) > TRACE_TOL:
            raise NumericalError(f"density matrix trace {np.trace(mat).real:.3g} != 1")
        mat = (mat + mat.conj().T) / 2
        if np.linalg.eigvalsh(mat)[0] < PSD_TOL:
            raise NumericalError("density matrix is not positive semidefinite")
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_ket(cls, psi, dims):
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), dims)

    @classmethod
    def maximally_mixed(cls, dims):
        total = int(np.prod(dims))
        return cls(np.eye(total) / total, dims)

    @property
    def n(self):
        return len(self.dims)

    @property
    def purity(self):
        return float(np.real(np.vdot(self.mat, self.mat)))

    def local_dim(self):
        """The common local dimension; raises for heterogeneous systems."""
        if len(set(self.dims)) != 1:
            raise UsageError(f"heterogeneous local dimensions {self.dims}")
        return self.dims[0]


def kron(*mats):
    """Kronecker product of any number of matrices."""
    return reduce(np.kron, [np.asarray(m) for m in mats])


def _check_parties(parties, n):
    parties = sorted({int(p) for p in parties})
    if not parties or parties[0] < 0 or parties[-1] >= n:
        raise UsageError(f"invalid subsystem selection {parties} for {n} parties")
    return parties


def partial_trace_array(mat, dims, keep):
    """Reduced matrix on ``keep`` (sorted subsystem indices) of a raw array."""
    n = len(dims)
    keep = _check_parties(keep, n)
    traced = [i for i in range(n) if i not in keep]
    t = np.asarray(mat).reshape(tuple(dims) * 2)
    # trace out from the highest index so remaining axis numbers stay valid
    for k, i in enumerate(sorted(traced, reverse=True)):
        m = n - k
        t = np.trace(t, axis1=i, axis2=i + m)
    dk = int(np.prod([dims[i] for i in keep]))
    return t.reshape(dk, dk)


def partial_trace(rho, keep):
    """Reduced state of ``rho`` on the subsystems listed in ``keep``."""
    keep = _check_parties(keep, rho.n)
    red = partial_trace_array(rho.mat, rho.dims, keep)
    return DensityMatrix(red, tuple(rho.dims[i] for i in keep))


def partial_transpose_array(mat, dims, party):
    n = len(dims)
    if not 0 <= party < n:
        raise UsageError(f"invalid party {party} for {n} parties")
    t = np.asarray(mat).reshape(tuple(dims) * 2)
    axes = list(range(2 * n))
    axes[party], axes[party + n] = axes[party + n], axes[party]
    total = int(np.prod(dims))
    return t.transpose(axes).reshape(total, total)


def partial_transpose(rho, party=-1):
    """Partial transpose on subsystem ``party`` (default: the last one)."""
    if party < 0:
        party += rho.n
    return partial_transpose_array(rho.mat, rho.dims, party)


def trace_norm(m):
    """Sum of singular values."""
    return float(np.sum(np.linalg.svd(np.asarray(m), compute_uv=False)))


def min_eigenvalue(h):
    return float(np.linalg.eigvalsh(h)[0])


def rng_for(seed, stream=0):
    """Independent generator for the stream ``(seed, stream)``.

    The pair is hashed through :class:`numpy.random.SeedSequence`, so any
    stream can be regenerated without replaying the others.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(stream),))))


def haar_unitaries(d, size, rng):
    """``size`` Haar-random ``d x d`` unitaries as an array ``(size, d, d)``.

    Ginibre matrix, then QR with the phases of ``diag(R)`` moved into ``Q``.
    Without the phase fix the distribution is not Haar.
    """
    if d < 2:
        raise UsageError("unitary dimension must be >= 2")
    z = (rng.standard_normal((size, d, d)) + 1j * rng.standard_normal((size, d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r, axis1=-2, axis2=-1)
    ph = ph / np.abs(ph)
    return q * ph[:, None, :]


def haar_unitary(d, seed=0, stream=0):
    """A single Haar-random unitary keyed by ``(seed, stream)``."""
    return haar_unitaries(d, 1, rng_for(seed, stream))[0]


def haar_ket(d, rng):
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def random_density(dims, rng, rank=None):
    """Random mixed state from a Ginibre matrix (Hilbert-Schmidt when full rank)."""
    total = int(np.prod(dims))
    rank = total if rank is None else rank
    g = rng.standard_normal((total, rank)) + 1j * rng.standard_normal((total, rank))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real, dims)
