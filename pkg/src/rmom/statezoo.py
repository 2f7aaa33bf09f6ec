"""Named states: GHZ/W mixtures, isotropic states and the bound-entangled examples.

Every constructor returns a validated :class:`~rmom.qmat.DensityMatrix`.
:func:`from_spec` resolves the JSON state formats used by the CLI.
"""

import json

import numpy as np

from .errors import UsageError
from .qmat import DensityMatrix, kron


def ket(d, *labels):
    """Computational basis vector ``|labels>`` with local dimension ``d``."""
    v = np.zeros(d ** len(labels), dtype=complex)
    idx = 0
    for l in labels:
        idx = idx * d + l
    v[idx] = 1
    return v


def _proj(v):
    return np.outer(v, v.conj())


def ghz_ket():
    return (ket(2, 0, 0, 0) + ket(2, 1, 1, 1)) / np.sqrt(2)


def w_ket():
    return (ket(2, 0, 0, 1) + ket(2, 0, 1, 0) + ket(2, 1, 0, 0)) / np.sqrt(3)


def ghz():
    return DensityMatrix.from_ket(ghz_ket(), (2, 2, 2))


def w_state():
    return DensityMatrix.from_ket(w_ket(), (2, 2, 2))


def noisy_ghz_w(g, w):
    """``g |GHZ><GHZ| + w |W><W| + (1-g-w) I/8``."""
    if g < 0 or w < 0 or g + w > 1 + 1e-12:
        raise UsageError(f"need g, w >= 0 and g + w <= 1, got g={g}, w={w}")
    mat = g * _proj(ghz_ket()) + w * _proj(w_ket()) + (1 - g - w) * np.eye(8) / 8
    return DensityMatrix(mat, (2, 2, 2))


def max_entangled_ket(d):
    return sum(ket(d, i, i) for i in range(d)) / np.sqrt(d)


def bell():
    return DensityMatrix.from_ket(max_entangled_ket(2), (2, 2))


def isotropic(p, d):
    """``p |Phi+_d><Phi+_d| + (1-p) I/d^2``; positive for ``-1/(d^2-1) <= p <= 1``."""
    if not -1 / (d * d - 1) - 1e-12 <= p <= 1 + 1e-12:
        raise UsageError(f"isotropic parameter {p} outside [-1/(d^2-1), 1]")
    mat = p * _proj(max_entangled_ket(d)) + (1 - p) * np.eye(d * d) / d**2
    return DensityMatrix(mat, (d, d))


def product_ket(d, n=2):
    return ket(d, *([0] * n))


def grid_state(edges, d):
    """Uniform mixture of ``(|ij> - |kl>)/sqrt(2)`` over ``edges``.

    Edges are ``(i, j, k, l)`` tuples with 1-based labels, as in the usual
    grid-state pictures.
    """
    if not edges:
        raise UsageError("grid state needs at least one edge")
    mat = np.zeros((d * d, d * d), dtype=complex)
    for e in edges:
        if len(e) != 4 or any(not 1 <= x <= d for x in e):
            raise UsageError(f"edge {e} out of range for d={d}")
        i, j, k, l = (x - 1 for x in e)
        if (i, j) == (k, l):
            raise UsageError(f"degenerate edge {e}")
        mat += _proj((ket(d, i, j) - ket(d, k, l)) / np.sqrt(2))
    return DensityMatrix(mat / len(edges), (d, d))


CROSS_HATCH_EDGES = ((1, 1, 2, 3), (2, 1, 3, 3), (1, 2, 3, 1), (1, 3, 3, 2))


def cross_hatch():
    return grid_state(CROSS_HATCH_EDGES, 3)


CHESSBOARD_EXAMPLE = dict(a=0.6, b=-0.6, c=1.2, d_=-1.2, m=-0.6, n=-0.6)


def chessboard(a, b, c, d_, m, n):
    """Bruss-Peres chessboard state from four unnormalized vectors."""
    if m == 0 or n == 0:
        raise UsageError("chessboard state needs m and n nonzero")
    s = a * c / n
    t = a * d_ / m
    vs = [
        [m, 0, s, 0, n, 0, 0, 0, 0],
        [0, a, 0, b, 0, c, 0, 0, 0],
        [n, 0, 0, 0, -m, 0, t, 0, 0],
        [0, b, 0, -a, 0, 0, 0, d_, 0],
    ]
    mat = sum(np.outer(v, v) for v in np.array(vs, dtype=float))
    return DensityMatrix(mat / np.trace(mat), (3, 3))


def upb_vectors():
    """The five product vectors of the Tiles unextendible product basis."""
    e = np.eye(3)
    return [
        np.kron(e[0], e[0] - e[1]) / np.sqrt(2),
        np.kron(e[0] - e[1], e[2]) / np.sqrt(2),
        np.kron(e[2], e[1] - e[2]) / np.sqrt(2),
        np.kron(e[1] - e[2], e[0]) / np.sqrt(2),
        np.kron(e.sum(0), e.sum(0)) / 3,
    ]


def upb_tiles():
    mat = np.eye(9) - sum(np.outer(v, v) for v in upb_vectors())
    return DensityMatrix(mat / 4, (3, 3))


def horodecki_3x3(p):
    """``(2 Psi+ + p sigma_+ + (5-p) sigma_-)/7`` for ``2 <= p <= 5``."""
    if not 2 <= p <= 5:
        raise UsageError(f"Horodecki parameter {p} outside [2, 5]")
    sp = sum(_proj(ket(3, i, (i + 1) % 3)) for i in range(3)) / 3
    sm = sum(_proj(ket(3, (i + 1) % 3, i)) for i in range(3)) / 3
    mat = 2 * _proj(max_entangled_ket(3)) + p * sp + (5 - p) * sm
    return DensityMatrix(mat / 7, (3, 3))


def horodecki_map(rho, party=0):
    """Apply the non-decomposable qutrit map ``Lambda`` to one party.

    ``Lambda`` flips the sign of off-diagonal entries and adds the cyclically
    shifted diagonal ``diag(a22, a33, a11)``. A negative eigenvalue of the
    output certifies entanglement. With the ``sigma_+`` / ``sigma_-``
    labelling of :func:`horodecki_3x3` the map must act on the first party
    to flag the bound-entangled range ``3 < p <= 4``; on the second party it
    sees the mirrored family instead.
    """
    if rho.dims != (3, 3):
        raise UsageError("the map acts on 3 x 3 states")
    if party not in (0, 1):
        raise UsageError("party must be 0 or 1")
    t = rho.mat.reshape(3, 3, 3, 3)  # [a, b, a', b']
    if party == 0:
        t = t.transpose(1, 0, 3, 2)
    out = -t
    for b in range(3):
        out[:, b, :, b] = t[:, b, :, b]
    for b in range(3):
        out[:, b, :, b] += t[:, (b + 1) % 3, :, (b + 1) % 3]
    if party == 0:
        out = out.transpose(1, 0, 3, 2)
    return out.reshape(9, 9)


_PAULI = [
    np.eye(2),
    np.array([[0, 1], [1, 0]]),
    np.array([[0, -1j], [1j, 0]]),
    np.diag([1.0, -1.0]),
]
PIANI_TERMS = ((0, 2), (1, 1), (2, 3), (3, 1), (3, 2), (3, 3))


def piani_4x4():
    """Six-term mixture of ``(I x s_i x s_j)|Psi+_4>`` projectors, cut ``AA'|BB'``."""
    psi = max_entangled_ket(4)
    mat = np.zeros((16, 16), dtype=complex)
    for i, j in PIANI_TERMS:
        mat += _proj(kron(np.eye(4), _PAULI[i], _PAULI[j]) @ psi)
    return DensityMatrix(mat / 6, (4, 4))


def random_pure_product(dims, rng):
    from .qmat import haar_ket

    return kron(*[haar_ket(d, rng)[:, None] for d in dims]).ravel()


def random_separable(dims, rng, terms=None):
    """Dirichlet-weighted mixture of up to eight Haar-random pure product states."""
    terms = int(rng.integers(1, 9)) if terms is None else terms
    weights = rng.dirichlet(np.ones(terms))
    mat = sum(w * _proj(random_pure_product(dims, rng)) for w in weights)
    return DensityMatrix(mat, tuple(dims))


_NAMED = {
    "bell": lambda p: bell(),
    "ghz": lambda p: ghz(),
    "w": lambda p: w_state(),
    "noisy_ghz_w": lambda p: noisy_ghz_w(p.get("g", 0.0), p.get("w", 0.0)),
    "isotropic": lambda p: isotropic(p.get("p", 1.0), int(p.get("d", 3))),
    "maximally_mixed": lambda p: DensityMatrix.maximally_mixed((int(p.get("d", 2)),) * int(p.get("n", 2))),
    "product": lambda p: DensityMatrix.from_ket(product_ket(int(p.get("d", 2)), int(p.get("n", 2))), (int(p.get("d", 2)),) * int(p.get("n", 2))),
    "cross_hatch": lambda p: cross_hatch(),
    "chessboard": lambda p: chessboard(**{k: p.get(k, v) for k, v in CHESSBOARD_EXAMPLE.items()}),
    "upb_tiles": lambda p: upb_tiles(),
    "horodecki_3x3": lambda p: horodecki_3x3(p.get("p", 3.5)),
    "piani_4x4": lambda p: piani_4x4(),
}

STATE_NAMES = tuple(sorted(_NAMED))


def named_state(name, params=None):
    try:
        build = _NAMED[name]
    except KeyError:
        raise UsageError(f"unknown state {name!r}; known: {', '.join(STATE_NAMES)}") from None
    return build(dict(params or {}))


def from_spec(spec):
    """Resolve a state spec.

    Accepts ``{"name": ..., "params": {...}}`` or a raw matrix
    ``{"dims": [...], "re": [...], "im": [...]}`` (row-major, ``im`` optional).
    A JSON string is parsed first.
    """
    if isinstance(spec, str):
        spec = json.loads(spec)
    if "name" in spec:
        return named_state(spec["name"], spec.get("params"))
    if "dims" in spec and "re" in spec:
        dims = tuple(int(x) for x in spec["dims"])
        total = int(np.prod(dims))
        re = np.asarray(spec["re"], dtype=float)
        im = np.asarray(spec.get("im", np.zeros_like(re)), dtype=float)
        if re.size != total * total or im.size != total * total:
            raise UsageError(f"raw matrix needs {total * total} entries for dims {list(dims)}")
        return DensityMatrix((re + 1j * im).reshape(total, total), dims)
    raise UsageError("state spec needs either 'name' or 'dims'/'re'")


def to_raw_spec(rho):
    return {"dims": list(rho.dims), "re": rho.mat.real.ravel().tolist(), "im": rho.mat.imag.ravel().tolist()}
