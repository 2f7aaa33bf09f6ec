import numpy as np
import pytest

from rmom.bloch import gellmann_basis
from rmom.errors import NumericalError, UsageError
from rmom.qmat import (
    DensityMatrix,
    haar_unitaries,
    haar_unitary,
    kron,
    min_eigenvalue,
    partial_trace,
    partial_transpose,
    partial_transpose_array,
    random_density,
    rng_for,
    trace_norm,
)
from rmom.statezoo import bell, chessboard, CHESSBOARD_EXAMPLE, ghz, ket

Z = np.diag([1.0, -1.0])


def test_kron_identities():
    assert np.allclose(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.allclose(kron(Z, Z), np.diag([1, -1, -1, 1]))
    lam = gellmann_basis(3)[1]
    m = kron(lam, lam)
    assert m.shape == (9, 9)
    assert abs(np.trace(m)) < 1e-12


def test_density_matrix_validation():
    with pytest.raises(NumericalError):
        DensityMatrix(np.diag([0.5, 0.6]), (2,))
    with pytest.raises(NumericalError):
        DensityMatrix(np.array([[0.5, 1], [0, 0.5]]), (2,))
    with pytest.raises(NumericalError):
        DensityMatrix(np.diag([1.5, -0.5]), (2,))
    with pytest.raises(NumericalError):
        DensityMatrix(np.array([[np.nan, 0], [0, 1]]), (2,))
    with pytest.raises(UsageError):
        DensityMatrix(np.eye(4) / 4, (3,))
    with pytest.raises(UsageError):
        DensityMatrix(np.eye(1), (1,))


def test_density_matrix_is_read_only():
    rho = DensityMatrix.maximally_mixed((2, 2))
    with pytest.raises(ValueError):
        rho.mat[0, 0] = 1


def test_partial_trace_examples():
    pb = partial_trace(bell(), [0])
    assert np.allclose(pb.mat, np.eye(2) / 2)
    prod = DensityMatrix.from_ket(ket(2, 0, 0, 0), (2, 2, 2))
    assert np.allclose(partial_trace(prod, [0, 1]).mat, np.diag([1, 0, 0, 0]))
    ga = partial_trace(ghz(), [0])
    assert np.allclose(ga.mat, np.eye(2) / 2)
    assert abs(ga.purity - 0.5) < 1e-12


def test_partial_trace_matches_einsum():
    rng = rng_for(4, 0)
    rho = random_density((2, 3, 2), rng)
    t = rho.mat.reshape(2, 3, 2, 2, 3, 2)
    oracle = np.einsum("abcdbf->acdf", t).reshape(4, 4)
    assert np.allclose(partial_trace(rho, [0, 2]).mat, oracle)


def test_partial_transpose_examples():
    assert abs(min_eigenvalue(partial_transpose(bell())) + 0.5) < 1e-12
    prod = DensityMatrix.from_ket(np.kron([0.6, 0.8j], [1, 1]), (2, 2))
    pt = partial_transpose(prod)
    assert np.allclose(np.linalg.eigvalsh(pt), np.linalg.eigvalsh(prod.mat))
    assert min_eigenvalue(partial_transpose(chessboard(**CHESSBOARD_EXAMPLE))) >= -1e-9


def test_partial_transpose_is_involution():
    rho = random_density((3, 2), rng_for(1, 1))
    once = partial_transpose(rho, 0)
    assert np.allclose(partial_transpose_array(once, (3, 2), 0), rho.mat)


def test_trace_norm_examples():
    assert abs(trace_norm(np.eye(4)) - 4) < 1e-12
    assert abs(trace_norm(np.diag([1, -1, 1])) - 3) < 1e-12
    from rmom.bloch import correlation_matrix

    assert abs(trace_norm(correlation_matrix(bell())) - 3) < 1e-12


def test_haar_unitaries_are_unitary():
    us = haar_unitaries(4, 200, rng_for(0, 0))
    err = np.abs(np.einsum("nij,nkj->nik", us, us.conj()) - np.eye(4)).max()
    assert err < 1e-12


def test_haar_first_moment():
    us = haar_unitaries(2, 100_000, rng_for(11, 0))
    x = np.abs(us[:, 0, 0]) ** 2
    se = x.std() / np.sqrt(x.size)
    assert abs(x.mean() - 0.5) < 3 * se


def test_haar_matches_clifford_two_design():
    # E|tr(U Z U^+ Z)|^2 over Haar is 4/3
    us = haar_unitaries(2, 100_000, rng_for(12, 0))
    x = np.abs(np.einsum("nij,j,nkj,ki->n", us, [1, -1], us.conj(), Z)) ** 2
    se = x.std() / np.sqrt(x.size)
    # the Clifford orbit of Z is {X, Y, Z} up to sign, a 2-design for this average
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    s = np.diag([1, 1j])
    orbit = [np.eye(2), h, s @ h]
    design = np.mean([abs(np.trace(c @ Z @ c.conj().T @ Z)) ** 2 for c in orbit])
    assert abs(design - 4 / 3) < 1e-12
    assert abs(x.mean() - design) < 3 * se


def test_haar_determinism():
    assert np.array_equal(haar_unitary(3, seed=5, stream=2), haar_unitary(3, seed=5, stream=2))
    assert not np.allclose(haar_unitary(3, seed=5, stream=2), haar_unitary(3, seed=5, stream=3))
