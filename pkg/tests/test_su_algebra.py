import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from blochbound.errors import InvalidDimensionError, ShapeError
from blochbound.su_algebra import build_basis, star_product

from conftest import PAULI_X, PAULI_Y, PAULI_Z, random_herm


def test_qubit_generators_are_pauli(qubit):
    np.testing.assert_array_equal(qubit.generators, np.array([PAULI_X, PAULI_Y, PAULI_Z]))
    assert np.all(qubit.d_dense() == 0)


def test_qubit_normalization(qubit):
    for m, n in itertools.product(range(3), repeat=2):
        tr = np.trace(qubit.generators[m] @ qubit.generators[n])
        assert tr == pytest.approx(2.0 if m == n else 0.0, abs=1e-12)


def test_qutrit_d118_matches_trace_oracle(qutrit):
    # Gell-Mann lambda_1 and lambda_8 typed in by hand
    l1 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex)
    l8 = np.diag([1, 1, -2]).astype(complex) / np.sqrt(3)
    oracle = 0.25 * np.trace((l1 @ l1 + l1 @ l1) @ l8).real
    assert oracle == pytest.approx(1 / np.sqrt(3), abs=1e-15)
    # lambda_1 is index 0 and lambda_8 index 7 under the documented ordering
    np.testing.assert_array_equal(qutrit.generators[0], l1)
    np.testing.assert_allclose(qutrit.generators[7], l8, atol=1e-15)
    assert qutrit.d_dense()[0, 0, 7] == pytest.approx(0.5773502691896258, abs=1e-14)


def test_ordering_labels():
    b = build_basis(3)
    assert b.labels == (
        "sym(0,1)", "sym(0,2)", "sym(1,2)",
        "asym(0,1)", "asym(0,2)", "asym(1,2)",
        "diag(1)", "diag(2)",
    )


@pytest.mark.parametrize("dim", [0, 1, -3])
def test_invalid_dimension(dim):
    with pytest.raises(InvalidDimensionError):
        build_basis(dim)


def test_invariants(basis):
    G = basis.generators
    n = basis.size
    assert G.shape == (n, basis.dim, basis.dim)
    np.testing.assert_allclose(G, G.conj().transpose(0, 2, 1), atol=1e-12)
    np.testing.assert_allclose(np.trace(G, axis1=1, axis2=2), 0, atol=1e-12)
    np.testing.assert_allclose(np.einsum("aij,bji->ab", G, G), 2 * np.eye(n), atol=1e-12)
    d = basis.d_dense()
    for perm in itertools.permutations(range(3)):
        np.testing.assert_allclose(d, d.transpose(perm), atol=1e-12)
    np.testing.assert_allclose(np.einsum("mmk->k", d), 0, atol=1e-10)


def test_anticommutator_expansion(basis):
    # {l_mu, l_nu} = 4/N delta 1 + 2 d_{mu nu k} l_k
    G, d, N = basis.generators, basis.d_dense(), basis.dim
    anti = np.einsum("aij,bjk->abik", G, G)
    anti = anti + anti.transpose(1, 0, 2, 3)
    rhs = 4 / N * np.einsum("ab,ij->abij", np.eye(basis.size), np.eye(N)) + 2 * np.einsum(
        "abk,kij->abij", d, G
    )
    np.testing.assert_allclose(anti, rhs, atol=1e-12)


def test_sparse_storage_above_four():
    assert not build_basis(4).is_sparse
    assert build_basis(5).is_sparse


def test_reconstruction(basis, rng):
    for _ in range(20):
        A = random_herm(rng, basis.dim)
        A0 = A - np.trace(A) / basis.dim * np.eye(basis.dim)
        coeff = np.array([0.5 * np.trace(A0 @ g).real for g in basis.generators])
        np.testing.assert_allclose(basis.to_matrix(coeff), A0, atol=1e-10)


def test_trace_of_product(basis, rng):
    a, b = rng.standard_normal((2, basis.size))
    tr = np.trace(basis.to_matrix(a) @ basis.to_matrix(b)).real
    assert tr == pytest.approx(2 * a @ b, abs=1e-10)


def test_star_product_vanishes_for_qubits(qubit, rng):
    a, b = rng.standard_normal((2, 3))
    np.testing.assert_array_equal(star_product(a, b, qubit), np.zeros(3))


def test_star_product_diag_observable(qutrit):
    # A = diag(1, -1, 0) = lambda_3; A^2 = diag(1, 1, 0) whose traceless part is lambda_8 / sqrt(3)
    A = np.diag([1.0, -1.0, 0.0])
    a = np.array([0.5 * np.trace(A @ g).real for g in qutrit.generators])
    oracle = np.array([0.25 * np.trace((A @ A + A @ A) @ g).real for g in qutrit.generators])
    np.testing.assert_allclose(oracle, [0, 0, 0, 0, 0, 0, 0, 1 / np.sqrt(3)], atol=1e-15)
    np.testing.assert_allclose(star_product(a, a, qutrit), oracle, atol=1e-12)


def test_star_product_matrix_oracle(basis, rng):
    # (a*b)_k = 1/4 Tr[{A, B} l_k] for traceless A = a.l, B = b.l
    a, b = rng.standard_normal((2, basis.size))
    A, B = basis.to_matrix(a), basis.to_matrix(b)
    oracle = np.array([0.25 * np.trace((A @ B + B @ A) @ g).real for g in basis.generators])
    np.testing.assert_allclose(star_product(a, b, basis), oracle, atol=1e-10)


def test_star_product_batched_sparse(rng):
    b5 = build_basis(5)
    a = rng.standard_normal((4, 24))
    c = rng.standard_normal((4, 24))
    batched = star_product(a, c, b5)
    rows = np.array([star_product(x, y, b5) for x, y in zip(a, c)])
    np.testing.assert_allclose(batched, rows, atol=1e-13)
    dense = np.einsum("pm,pn,mnk->pk", a, c, b5.d_dense())
    np.testing.assert_allclose(batched, dense, atol=1e-12)


def test_star_product_shape_error(qutrit):
    with pytest.raises(ShapeError):
        star_product(np.zeros(3), np.zeros(8), qutrit)


@settings(max_examples=50, deadline=None)
@given(
    a=arrays(np.float64, 8, elements=st.floats(-5, 5)),
    b=arrays(np.float64, 8, elements=st.floats(-5, 5)),
)
def test_star_product_symmetric(a, b):
    basis = build_basis(3)
    np.testing.assert_allclose(star_product(a, b, basis), star_product(b, a, basis), atol=1e-12)


def test_basis_is_read_only(qutrit):
    with pytest.raises(ValueError):
        qutrit.generators[0, 0, 0] = 5
