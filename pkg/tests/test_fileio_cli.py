import json

import numpy as np
import pytest

from blochbound.cli import main
from blochbound.errors import InvalidObservableError, InvalidStateError, ShapeError
from blochbound.fileio import (
    matrix_from_dict,
    matrix_to_dict,
    read_basis,
    read_matrix_file,
    write_matrix_file,
)
from blochbound.su_algebra import build_basis
from blochbound.verify import bell_state

from conftest import PAULI_X, PAULI_Y, PAULI_Z, random_density


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.fixture
def paulis(tmp_path):
    return [write_matrix_file(tmp_path / f"{n}.json", m, "observable") for n, m in zip("xyz", (PAULI_X, PAULI_Y, PAULI_Z))]


def test_matrix_roundtrip_lossless(tmp_path, rng):
    rho = random_density(rng, 3)
    back = read_matrix_file(write_matrix_file(tmp_path / "rho.json", rho, "state"))
    assert back.kind == "state" and back.dim == 3
    np.testing.assert_array_equal(back.matrix, rho)


def test_matrix_validation():
    doc = matrix_to_dict(np.eye(2), "state")
    with pytest.raises(InvalidStateError):
        matrix_from_dict(doc)
    assert matrix_from_dict(doc, validate=False).dim == 2
    with pytest.raises(InvalidObservableError):
        matrix_from_dict(matrix_to_dict(np.array([[0, 1], [0, 0]]), "observable"))
    with pytest.raises(ShapeError):
        matrix_from_dict({**matrix_to_dict(np.eye(2), "observable"), "dim": 3})
    with pytest.raises(ShapeError):
        matrix_to_dict(np.ones((2, 3)), "observable")
    with pytest.raises(ShapeError):
        matrix_from_dict(matrix_to_dict(np.eye(3) / 3, "bipartite-state"))


def test_basis_qubit_is_pauli(tmp_path, capsys):
    code, rep = run(["basis", "--dim", 2, "--out", tmp_path / "b"], capsys)
    assert code == 0 and rep["result"]["n_generators"] == 3
    dim, gens, d = read_basis(tmp_path / "b")
    assert dim == 2
    np.testing.assert_array_equal(gens, [PAULI_X, PAULI_Y, PAULI_Z])
    assert not d.any()


def test_basis_qutrit_roundtrip(tmp_path, capsys):
    assert run(["basis", "--dim", 3, "--out", tmp_path], capsys)[0] == 0
    dim, gens, d = read_basis(tmp_path)
    basis = build_basis(3)
    np.testing.assert_array_equal(gens, basis.generators)
    np.testing.assert_array_equal(d, basis.d_dense())
    assert d[0, 0, 7] == pytest.approx(1 / np.sqrt(3))


def test_basis_stdout_and_bad_dim(capsys):
    code, rep = run(["basis", "--dim", 2], capsys)
    assert code == 0 and rep["result"]["ordering"] == ["sym(0,1)", "asym(0,1)", "diag(1)"]
    assert run(["basis", "--dim", 1], capsys)[0] == 1


def test_bounds_pauli_pure(paulis, capsys):
    code, rep = run(["bounds", *paulis, "--pure"], capsys)
    assert code == 0
    b = rep["result"]["bounds"]
    assert b["lower"] == pytest.approx(2.0, abs=1e-12)
    assert b["upper"] == pytest.approx(2.0, abs=1e-12)
    assert rep["tool"] == "blochbound" and "wall_time" in rep


def test_bounds_maximally_mixed_is_trace_term(tmp_path, capsys, rng):
    # at |r| = 0 every variance equals Tr[A^2]/N - (Tr A / N)^2
    A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    A = A + A.conj().T
    f = write_matrix_file(tmp_path / "a.json", A, "observable")
    code, rep = run(["bounds", f, "--bloch-norm", 0], capsys)
    expected = np.trace(A @ A).real / 3 - (np.trace(A).real / 3) ** 2
    assert code == 0
    assert rep["result"]["bounds"]["lower"] == pytest.approx(expected, abs=1e-10)
    assert rep["result"]["bounds"]["upper"] == pytest.approx(expected, abs=1e-10)


def test_bounds_modes(tmp_path, paulis, capsys):
    code, rep = run(["bounds", *paulis[:2], "--bloch-norm", 0.5, "--mode", "qubit"], capsys)
    assert code == 0 and rep["result"]["bounds"]["method"] == "qubit"
    assert rep["result"]["bounds"]["lower"] == pytest.approx(0.75 + 1)
    g = write_matrix_file(tmp_path / "g.json", build_basis(3).generators[0], "observable")
    assert run(["bounds", g, "--bloch-norm", 0.5, "--mode", "qubit"], capsys)[0] == 1
    assert run(["bounds", g, paulis[0], "--pure"], capsys)[0] == 1
    code, rep = run(["bounds", g, "--pure", "--strict-paper"], capsys)
    assert code == 0 and rep["result"]["bounds"]["method"] == "strict-paper"


def test_bounds_verify(tmp_path, capsys):
    gens = build_basis(3).generators
    files = [write_matrix_file(tmp_path / f"g{i}.json", gens[i], "observable") for i in (0, 3, 7)]
    code, rep = run(["bounds", *files, "--bloch-norm", 0.6, "--verify", "--samples", 300, "--seed", 5], capsys)
    assert code == 0
    assert rep["result"]["oracle"]["inside_sandwich"] is True
    assert rep["seed"] == 5


def test_entangle_bell(tmp_path, capsys):
    f = write_matrix_file(tmp_path / "bell.json", bell_state(2), "bipartite-state")
    code, rep = run(["entangle", f], capsys)
    w = rep["result"]["witness"]
    assert code == 2 and w["verdict"] == "ENTANGLED"
    assert w["kyfan"] == pytest.approx(3.0, abs=1e-12) and w["threshold"] == 1.0
    assert run(["entangle", f, "--criterion", "local-sum"], capsys)[0] == 2


def test_entangle_inconclusive(tmp_path, capsys, rng):
    prod = write_matrix_file(tmp_path / "p.json", np.kron(random_density(rng, 3), random_density(rng, 3)), "state")
    assert run(["entangle", prod], capsys)[0] == 0
    mixed = write_matrix_file(tmp_path / "m.json", np.eye(4) / 4, "state")
    code, rep = run(["entangle", mixed, "--criterion", "local-sum"], capsys)
    assert code == 0 and rep["result"]["witness"]["local_sum"] == pytest.approx(6.0)


def test_entangle_bad_input(tmp_path, capsys):
    f = write_matrix_file(tmp_path / "q.json", np.eye(3) / 3, "state")
    assert run(["entangle", f], capsys)[0] == 1
    assert run(["entangle", tmp_path / "missing.json"], capsys)[0] == 1


def test_entangle_emit_observables(tmp_path, capsys):
    f = write_matrix_file(tmp_path / "bell.json", bell_state(2), "bipartite-state")
    out = tmp_path / "obs"
    code, rep = run(["entangle", f, "--emit-observables", out], capsys)
    assert code == 2
    assert len(rep["result"]["observables"]["pairs"]) == 3
    A = read_matrix_file(out / "A_001.json").matrix
    assert np.trace(A @ A).real == pytest.approx(2.0)


def test_verify_exit_code(tmp_path, capsys):
    out = tmp_path / "v.json"
    code = main(["verify", "--suite", "algebra", "--samples", "200", "--dims", "2..3", "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["result"]["passed"] and rep["inputs"]["dims"] == [2, 3]
