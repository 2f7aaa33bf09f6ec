"""Separability criteria on sector lengths and the state families that saturate them."""

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.optimize import bisect

from .errors import UsageError
from .qmat import DensityMatrix, haar_ket, kron, partial_trace_array
from .statezoo import ket

TOL = 1e-9


@dataclass(frozen=True)
class CriterionVerdict:
    name: str
    lhs: float
    bound: float

    @property
    def gap(self):
        return self.lhs - self.bound

    @property
    def violated(self):
        return self.lhs - self.bound > TOL


def _three_party(s):
    if s.n != 3:
        raise UsageError(f"criterion needs three parties, got {s.n}")
    return s.A[1], s.A[2], s.A[3], s.d


def full_sep_test(s):
    """``A3 <= d-1 + (2d-3)/3 A1 + (d-3)/3 A2`` for fully separable states."""
    a1, a2, a3, d = _three_party(s)
    return CriterionVerdict("full_separability", a3, d - 1 + (2 * d - 3) / 3 * a1 + (d - 3) / 3 * a2)


def bisep_test(s):
    """``A2 + A3 <= (d^3-2)/2 (1 + A1)`` for states separable across some cut."""
    a1, a2, a3, d = _three_party(s)
    return CriterionVerdict("biseparability", a2 + a3, (d**3 - 2) / 2 * (1 + a1))


def legacy_sector_tests(s):
    """The older qubit bounds ``A3 <= 1`` (full) and ``A3 <= 3`` (biseparable)."""
    _, _, a3, d = _three_party(s)
    if d != 2:
        raise UsageError("legacy bounds are for qubits")
    return [CriterionVerdict("legacy_full_separability", a3, 1.0), CriterionVerdict("legacy_biseparability", a3, 3.0)]


def three_qubit_facets(a1, a2, a3):
    """Slack of the three non-trivial facets of the three-qubit polytope (>= 0 inside)."""
    return {
        "1-A1+A2-A3": 1 - a1 + a2 - a3,
        "3-A2": 3 - a2,
        "3(1+A3)-A1-A2": 3 * (1 + a3) - a1 - a2,
    }


def three_qubit_polytope_member(a1, a2, a3):
    if min(a1, a2, a3) < -TOL:
        return False
    return all(v >= -TOL for v in three_qubit_facets(a1, a2, a3).values())


def two_qudit_polytope_member(a1a, a1b, a2, d):
    """Admissible ``(A1^A, A1^B, A2)`` for some two-qudit state."""
    if d < 2:
        raise UsageError("d must be >= 2")
    checks = [
        -TOL <= a1a <= d - 1 + TOL,
        -TOL <= a1b <= d - 1 + TOL,
        -TOL <= a2 <= d * d - 1 + TOL,
        a1a + a1b + a2 <= d * d - 1 + TOL,
        (d - 1) ** 2 - (d - 1) * (a1a + a1b) + a2 >= -TOL,
    ]
    return all(checks)


def purity_sep_test(a1a, a1b, a2, d):
    """``A2 <= d-1 + min((d-1)A1^A - A1^B, (d-1)A1^B - A1^A)``."""
    bound = d - 1 + min((d - 1) * a1a - a1b, (d - 1) * a1b - a1a)
    return CriterionVerdict("purity", a2, bound)


def legacy_two_qudit_test(a2, d):
    return CriterionVerdict("legacy_two_body", a2, (d - 1) ** 2)


def _bisep_coeffs(p, a, d_sign):
    if not 0.5 <= p <= 1:
        raise UsageError(f"p={p} outside [1/2, 1]")
    lo, hi = np.sqrt(max(0.0, 1 - 1 / (2 * p))), np.sqrt(0.5)
    if not lo - 1e-12 <= a <= hi + 1e-12:
        raise UsageError(f"a={a} outside [{lo:.6g}, {hi:.6g}] for p={p}")
    if d_sign not in (1, -1):
        raise UsageError("d_sign must be +1 or -1")
    a = min(max(a, lo), hi)
    b = np.sqrt(1 - a * a)
    if p == 1:
        c = 0.0
    else:
        c = np.sqrt(max(0.0, (2 * p * a * a - 1) / (2 * (p - 1))))
    c = min(c, 1.0)
    return a, b, c, d_sign * np.sqrt(1 - c * c)


def bisep_family(p, a, d_sign=1):
    """``p |0><0| x |psi><psi| + (1-p) |1><1| x |phi><phi|`` on the biseparable facet.

    ``|psi> = a|00> + b|11>`` and ``|phi> = c|00> + d|11>`` with ``b, c, d`` fixed
    by ``p`` and ``a`` so that ``A2 + A3 = 3 (1 + A1)``.
    """
    a, b, c, dd = _bisep_coeffs(p, a, d_sign)
    psi = a * ket(2, 0, 0) + b * ket(2, 1, 1)
    phi = c * ket(2, 0, 0) + dd * ket(2, 1, 1)
    mat = p * kron(np.diag([1, 0]), np.outer(psi, psi)) + (1 - p) * kron(np.diag([0, 1]), np.outer(phi, phi))
    return DensityMatrix(mat, (2, 2, 2))


def bisep_family_sectors(p, a, d_sign=1):
    """Closed-form ``(A1, A2, A3)`` of :func:`bisep_family`."""
    a, b, c, d = _bisep_coeffs(p, a, d_sign)
    x = 2 * p * a * b
    y = 2 * (1 - p) * c * d
    a1 = (2 * p - 1) ** 2
    a2 = 1 + 2 * (x + y) ** 2 + 2 * (p * (a * a - b * b) - (1 - p) * (c * c - d * d)) ** 2
    a3 = (2 * p - 1) ** 2 + 2 * (x - y) ** 2
    return a1, a2, a3


def sep_family(p, theta, d, swap=False):
    """Separable two-qudit states saturating the purity criterion.

    ``p |00><00| + q sum_j |j><j| x |theta_0j><theta_0j|`` with
    ``q = (1-p)/(d-1)`` and ``|theta_0j> = cos(theta)|0> + sin(theta)|j>``.
    """
    if not 1 / d - 1e-12 <= p <= 1 + 1e-12:
        raise UsageError(f"p={p} outside [1/d, 1]")
    if not -1e-12 <= theta <= np.pi / 2 + 1e-12:
        raise UsageError(f"theta={theta} outside [0, pi/2]")
    q = (1 - p) / (d - 1)
    e = np.eye(d)
    mat = p * np.outer(ket(d, 0, 0), ket(d, 0, 0))
    for j in range(1, d):
        th = np.cos(theta) * e[0] + np.sin(theta) * e[j]
        mat = mat + q * kron(np.outer(e[j], e[j]), np.outer(th, th))
    if swap:
        mat = mat.reshape(d, d, d, d).transpose(1, 0, 3, 2).reshape(d * d, d * d)
    return DensityMatrix(mat, (d, d))


def sep_family_one_body(p, theta, d):
    """Closed-form ``(A1^A, A1^B)`` of the unswapped :func:`sep_family`."""
    q = (1 - p) / (d - 1)
    a1a = d * p * p + d * (d - 1) * q * q - 1
    c2 = np.cos(theta) ** 2
    a1b = a1a + 2 * d * (d - 1) * p * q * c2 + 2 * d * comb(d - 1, 2) * q * q * c2 * c2
    return a1a, a1b


def _purities(mat, dims):
    out = []
    for k in range(len(dims)):
        r = partial_trace_array(mat, dims, [k])
        out.append(float(np.real(np.vdot(r, r))))
    return out


def purity_gap(mat, dims):
    """``1 + tr(rho^2) - sum_X tr(rho_X^2)`` for a three-party matrix."""
    return 1 + float(np.real(np.vdot(mat, mat))) - sum(_purities(mat, dims))


def rank2_bisep_gap(psi, phi, p):
    """Gap for ``p|psi><psi| + (1-p)|phi><phi|`` of two pure three-qubit vectors.

    Non-positive values mean the mixture satisfies the qubit biseparability
    bound; mixtures of an ``A|BC`` and an ``AB|C`` product never exceed 0.
    """
    psi = np.asarray(psi, dtype=complex)
    phi = np.asarray(phi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    phi = phi / np.linalg.norm(phi)
    mat = p * np.outer(psi, psi.conj()) + (1 - p) * np.outer(phi, phi.conj())
    return purity_gap(mat, (2, 2, 2))


BIPARTITIONS = (0, 1, 2)  # index of the single party split off: A|BC, B|AC, C|AB


def bisep_product_ket(single, v1, v2):
    """Three-qubit ket ``v1`` (on party ``single``) times ``v2`` (the other two, in order)."""
    psi = np.kron(v1, v2).reshape(2, 2, 2)
    # axes now (single, rest0, rest1); put them back in party order
    rest = [k for k in range(3) if k != single]
    order = np.argsort([single] + rest)
    return psi.transpose(order).ravel()


def random_bisep_ket(single, rng):
    return bisep_product_ket(single, haar_ket(2, rng), haar_ket(4, rng))


def random_fixed_bisep(single, rng, terms=None):
    terms = int(rng.integers(1, 9)) if terms is None else terms
    w = rng.dirichlet(np.ones(terms))
    mat = 0
    for wk in w:
        v = random_bisep_ket(single, rng)
        mat = mat + wk * np.outer(v, v.conj())
    return DensityMatrix(mat, (2, 2, 2))


def crossing_points(gap, lo, hi, grid=2001, xtol=1e-12):
    """Parameters in ``[lo, hi]`` where the continuous ``gap`` changes sign.

    The interval is scanned on a uniform grid and each bracket is refined by
    bisection.
    """
    xs = np.linspace(lo, hi, grid)
    g = np.array([gap(x) for x in xs])
    roots = []
    for i in range(grid - 1):
        if g[i] == 0:
            roots.append(float(xs[i]))
        elif g[i] * g[i + 1] < 0:
            roots.append(float(bisect(gap, xs[i], xs[i + 1], xtol=xtol)))
    if g[-1] == 0:
        roots.append(float(xs[-1]))
    return roots
