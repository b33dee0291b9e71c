import numpy as np
import pytest

from blochbound.codec import encode_state
from blochbound.errors import InvalidObservableError, InvalidStateError, ShapeError
from blochbound.oracle import ginibre_states, random_rotation, sample_separable, SamplerConfig, substream
from blochbound.su_algebra import build_basis
from blochbound.verify import bell_state, werner_boundary, werner_state
from blochbound.witness import (
    Verdict,
    criterion_kyfan,
    criterion_local_sum,
    extract_bipartite,
    local_sum_formula,
    optimal_bloch_bases,
    optimal_observables,
    reconstruct_bipartite,
    separability_threshold,
    subsystem_dim,
)

from conftest import PAULI_X, PAULI_Y, PAULI_Z, random_density


@pytest.mark.parametrize("dim", [2, 3])
def test_maximally_mixed(dim):
    basis = build_basis(dim)
    st = extract_bipartite(np.eye(dim * dim) / dim**2, basis)
    for v in (st.r, st.s, st.T):
        np.testing.assert_allclose(v, 0, atol=1e-15)
    rep = criterion_kyfan(st)
    assert rep.kyfan == pytest.approx(0, abs=1e-15)
    assert rep.verdict is Verdict.INCONCLUSIVE


@pytest.mark.parametrize("dim", [2, 3])
def test_product_state(dim, rng):
    basis = build_basis(dim)
    ra, rb = random_density(rng, dim), random_density(rng, dim)
    st = extract_bipartite(np.kron(ra, rb), basis)
    r, s = encode_state(ra, basis), encode_state(rb, basis)
    np.testing.assert_allclose(st.r, r, atol=1e-12)
    np.testing.assert_allclose(st.s, s, atol=1e-12)
    np.testing.assert_allclose(st.T, np.outer(r, s), atol=1e-12)


def test_bell_correlations(qubit):
    rho = bell_state(2)
    paulis = [PAULI_X, PAULI_Y, PAULI_Z]
    oracle = np.array([[np.trace(rho @ np.kron(a, b)).real for b in paulis] for a in paulis])
    np.testing.assert_allclose(oracle, np.diag([1, -1, 1]), atol=1e-15)
    st = extract_bipartite(rho, qubit)
    np.testing.assert_allclose(st.T, oracle, atol=1e-15)
    rep = criterion_kyfan(st)
    assert rep.kyfan == pytest.approx(3, abs=1e-12)
    assert rep.threshold == 1.0
    assert rep.verdict is Verdict.ENTANGLED


def test_product_pure_is_inconclusive(qubit):
    up = np.diag([1.0, 0.0])
    rep = criterion_kyfan(extract_bipartite(np.kron(up, up), qubit))
    assert rep.kyfan == pytest.approx(1.0, abs=1e-12)
    assert rep.threshold == pytest.approx(1.0, abs=1e-15)
    assert rep.verdict is Verdict.INCONCLUSIVE


@pytest.mark.parametrize("dim", [2, 3])
def test_reconstruction_and_partial_traces(dim, rng):
    basis = build_basis(dim)
    rho = random_density(rng, dim * dim)
    st = extract_bipartite(rho, basis)
    np.testing.assert_allclose(reconstruct_bipartite(st.r, st.s, st.T, basis), rho, atol=1e-10)
    r4 = rho.reshape(dim, dim, dim, dim)
    np.testing.assert_allclose(encode_state(np.einsum("ikjk->ij", r4), basis), st.r, atol=1e-12)
    np.testing.assert_allclose(encode_state(np.einsum("ikil->kl", r4), basis), st.s, atol=1e-12)


def test_extract_errors(qubit):
    with pytest.raises(ShapeError):
        extract_bipartite(np.eye(3) / 3, qubit)
    with pytest.raises(InvalidStateError):
        extract_bipartite(np.eye(4), qubit)
    with pytest.raises(ShapeError):
        subsystem_dim(6)
    assert subsystem_dim(9) == 3


def test_optimal_observables_zero_T(qubit):
    st = extract_bipartite(np.eye(4) / 4, qubit)
    pairs = optimal_observables(st, qubit)
    for (A, B), g in zip(pairs, qubit.generators):
        np.testing.assert_allclose(A, g, atol=1e-15)
        np.testing.assert_allclose(B, -g, atol=1e-15)


@pytest.mark.parametrize("dim", [2, 3])
def test_optimal_observables_orthonormal(dim, rng):
    basis = build_basis(dim)
    st = extract_bipartite(random_density(rng, dim * dim), basis)
    pairs = optimal_observables(st, basis)
    n = dim * dim - 1
    assert len(pairs) == n
    for side in (0, 1):
        X = np.array([p[side] for p in pairs])
        gram = np.einsum("pij,qji->pq", X, X).real
        np.testing.assert_allclose(gram, 2 * np.eye(n), atol=1e-10)
    U, V, sv = optimal_bloch_bases(st)
    assert np.einsum("mi,mn,ni->", U, st.T, -V) == pytest.approx(-sv.sum(), abs=1e-10)


def test_rank_deficient_completion(qubit):
    up = np.diag([1.0, 0.0])
    st = extract_bipartite(np.kron(up, up), qubit)
    U, V, sv = optimal_bloch_bases(st)
    np.testing.assert_allclose(U.T @ U, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(V.T @ V, np.eye(3), atol=1e-12)
    assert np.einsum("mi,mn,ni->", U, st.T, V) == pytest.approx(sv.sum())


def test_bell_optimal_local_sum(qubit):
    st = extract_bipartite(bell_state(2), qubit)
    pairs = optimal_observables(st, qubit)
    rep = criterion_local_sum(st, pairs, qubit)
    # 4(N^2-1)/N - 2 ||T||_KF - 0 with zero marginals
    assert rep.local_sum == pytest.approx(4 * 3 / 2 - 2 * 3, abs=1e-12)
    assert rep.verdict is Verdict.ENTANGLED
    assert rep.local_floor == 4.0


@pytest.mark.parametrize("dim", [2, 3])
def test_local_sum_formula_chain(dim, rng):
    basis = build_basis(dim)
    n = dim * dim - 1
    for _ in range(5):
        st = extract_bipartite(random_density(rng, dim * dim), basis)
        Oa, Ob = random_rotation(rng, n), random_rotation(rng, n)
        pairs = list(zip(np.tensordot(Oa, basis.generators, 1), np.tensordot(Ob, basis.generators, 1)))
        direct = criterion_local_sum(st, pairs, basis).local_sum
        assert direct == pytest.approx(local_sum_formula(st, Oa, Ob), abs=1e-9)


def test_local_sum_rejects_non_orthonormal(qubit):
    st = extract_bipartite(np.eye(4) / 4, qubit)
    pairs = [(g, g) for g in qubit.generators]
    with pytest.raises(InvalidObservableError):
        criterion_local_sum(st, [(2 * a, b) for a, b in pairs], qubit)
    with pytest.raises(InvalidObservableError):
        criterion_local_sum(st, pairs[:2], qubit)


@pytest.mark.parametrize("dim", [2, 3])
def test_separable_samples_never_flagged(dim):
    basis = build_basis(dim)
    for k in range(1, 6):
        st = sample_separable(SamplerConfig(seed=k, dim=dim, purity_class="pure"), n_terms=k, basis=basis)
        assert criterion_kyfan(st).verdict is Verdict.INCONCLUSIVE
        rep = criterion_local_sum(st, optimal_observables(st, basis), basis)
        assert rep.verdict is Verdict.INCONCLUSIVE
        assert rep.local_sum >= rep.local_floor - 1e-9


def test_werner_family():
    basis = build_basis(2)
    for p in np.linspace(0, 1, 21):
        rep = criterion_kyfan(extract_bipartite(werner_state(p), basis))
        assert rep.kyfan == pytest.approx(3 * p, abs=1e-12)
        assert rep.threshold == 1.0
        assert (rep.verdict is Verdict.ENTANGLED) == (p > 1 / 3 + 1e-9)
    assert werner_boundary() == pytest.approx(1 / 3, abs=1e-6)


def test_local_unitary_invariance(qutrit, rng):
    rho = random_density(rng, 9)
    def haar(n):
        return np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))[0]
    W = np.kron(haar(3), haar(3))
    a = criterion_kyfan(extract_bipartite(rho, qutrit))
    b = criterion_kyfan(extract_bipartite(W @ rho @ W.conj().T, qutrit))
    assert a.kyfan == pytest.approx(b.kyfan, abs=1e-9)
    assert a.threshold == pytest.approx(b.threshold, abs=1e-9)


def test_threshold_formula():
    assert separability_threshold(2, 0, 0) == 1.0
    assert separability_threshold(3, 0, 0) == 4 / 3
    assert separability_threshold(2, 1.0, 0.5) == 1.0 - 0.125


def test_report_dict(qubit):
    d = criterion_kyfan(extract_bipartite(bell_state(2), qubit)).to_dict()
    assert d["verdict"] == "ENTANGLED"
    assert isinstance(d["singular_values"], list)
