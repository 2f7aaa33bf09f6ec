"""Generalized Gell-Mann basis, Bloch tensors and sector lengths.

The basis is normalized as ``tr(l_i l_j) = d delta_ij`` (so for ``d = 2`` it
is exactly the Pauli set), not the particle-physics ``2 delta_ij``.

Ordering of ``l_1 .. l_{d^2-1}``: symmetric off-diagonal matrices for pairs
``j < k`` in lexicographic order, then the antisymmetric ones in the same
order, then the diagonal ones by increasing size of their support.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import UsageError
from .qmat import DensityMatrix


@lru_cache(maxsize=None)
def _gellmann(d):
    if d < 2:
        raise UsageError("local dimension must be >= 2")
    mats = [np.eye(d, dtype=complex)]
    pairs = list(combinations(range(d), 2))
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = m[k, j] = 1
        mats.append(m)
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = -1j
        m[k, j] = 1j
        mats.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        mats.append(np.diag(diag * np.sqrt(2 / (l * (l + 1)))).astype(complex))
    basis = np.array(mats)
    basis[1:] *= np.sqrt(d / 2)
    basis.setflags(write=False)
    return basis


def gellmann_basis(d):
    """Array of shape ``(d*d, d, d)``; index 0 is the identity."""
    return _gellmann(int(d))


def decompose_array(mat, d, n):
    """Real tensor ``alpha[i1..in] = tr(rho l_i1 x .. x l_in)`` of shape ``(d*d,)*n``."""
    lam = gellmann_basis(d)
    t = np.asarray(mat).reshape((d,) * (2 * n))
    # contract party by party; each step swaps a (row, col) pair for a basis index
    for p in range(n):
        # t axes: [basis indices done (p)], rows p.., cols p..
        rows = n - p
        t = np.tensordot(t, lam, axes=([p, p + rows], [2, 1]))
        # new basis axis is last; move it to position p
        t = np.moveaxis(t, -1, p)
    return t.real


def reconstruct_array(alpha, d):
    n = alpha.ndim
    lam = gellmann_basis(d)
    t = np.asarray(alpha, dtype=complex)
    for _ in range(n):
        # consume the leading basis axis, append (row, col)
        t = np.tensordot(t, lam, axes=([0], [0]))
    # axes are now r1 c1 r2 c2 ...
    order = [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)]
    total = d**n
    return t.transpose(order).reshape(total, total) / total


@dataclass(frozen=True, eq=False)
class BlochTensor:
    dims: tuple
    alpha: np.ndarray

    @property
    def d(self):
        return self.dims[0]


def decompose(rho):
    """Bloch tensor of a state with a common local dimension."""
    d = rho.local_dim()
    return BlochTensor(rho.dims, decompose_array(rho.mat, d, rho.n))


def reconstruct(tensor):
    """Inverse of :func:`decompose`; validates the result as a state."""
    alpha = np.asarray(tensor.alpha, dtype=float)
    if abs(alpha.flat[0] - 1) > 1e-9:
        raise UsageError("alpha_{0..0} must equal 1")
    return DensityMatrix(reconstruct_array(alpha, tensor.d), tensor.dims)


def correlation_array(mat, d):
    """The ``(d^2-1) x (d^2-1)`` two-body block ``t_ij = tr(rho l_i x l_j)``."""
    return decompose_array(mat, d, 2)[1:, 1:]


def correlation_matrix(rho):
    if rho.n != 2:
        raise UsageError(f"correlation matrix needs a bipartite state, got {rho.n} parties")
    return correlation_array(rho.mat, rho.local_dim())


@dataclass(frozen=True, eq=False)
class SectorVector:
    """Sector lengths ``A_0 .. A_n`` plus the per-support breakdown.

    ``by_support`` maps the frozenset of parties on which a basis term acts
    non-trivially to the summed squared coefficients of those terms;
    ``one_body`` lists ``A_1`` restricted to each party.
    """

    n: int
    d: int
    A: tuple
    one_body: tuple
    by_support: dict = field(repr=False)


def sectors_from_alpha(alpha, d):
    n = alpha.ndim
    sq = alpha**2
    by_support = {}
    for mask in range(1 << n):
        idx = tuple(slice(1, None) if mask >> p & 1 else 0 for p in range(n))
        by_support[frozenset(p for p in range(n) if mask >> p & 1)] = float(np.sum(sq[idx]))
    A = [0.0] * (n + 1)
    for support, v in by_support.items():
        A[len(support)] += v
    one_body = tuple(by_support[frozenset([p])] for p in range(n))
    return SectorVector(n, d, tuple(A), one_body, by_support)


def sector_lengths(rho):
    d = rho.local_dim()
    return sectors_from_alpha(decompose_array(rho.mat, d, rho.n), d)


def qubit_second_moments(rho, subset):
    """Full or reduced second moment of Pauli-Z measured in random local bases.

    Equals the squared Pauli correlators supported exactly on ``subset``
    divided by ``3**len(subset)``.
    """
    if set(rho.dims) != {2}:
        raise UsageError("qubit second moments need an all-qubit state")
    subset = frozenset(int(p) for p in subset)
    if not subset or min(subset) < 0 or max(subset) >= rho.n:
        raise UsageError(f"invalid subset {sorted(subset)}")
    return sector_lengths(rho).by_support[subset] / 3 ** len(subset)
