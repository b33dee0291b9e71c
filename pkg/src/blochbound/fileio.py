"""JSON matrix files, basis export and run reports.

A matrix file looks like::

    {"format": "blochbound-matrix/1", "kind": "state", "dim": 2,
     "re": [[1.0, 0.0], [0.0, 0.0]], "im": [[0.0, 0.0], [0.0, 0.0]]}

``kind`` is one of ``state``, ``observable`` or ``bipartite-state``; ``dim`` is
the size of the stored matrix (``N*N`` for bipartite states). Floats are
written with ``repr`` precision, which round-trips every double exactly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .codec import check_density_matrix, is_hermitian
from .errors import InvalidObservableError, ShapeError
from .su_algebra import SuBasis
from .witness import subsystem_dim

__all__ = [
    "MATRIX_FORMAT",
    "BASIS_FORMAT",
    "KINDS",
    "MatrixFile",
    "matrix_to_dict",
    "matrix_from_dict",
    "write_matrix_file",
    "read_matrix_file",
    "basis_to_dict",
    "write_basis",
    "read_basis",
    "dumps_report",
]

MATRIX_FORMAT = "blochbound-matrix/1"
BASIS_FORMAT = "blochbound-basis/1"
KINDS = ("state", "observable", "bipartite-state")


@dataclass(frozen=True, eq=False)
class MatrixFile:
    dim: int
    matrix: np.ndarray
    kind: str


def _validate(matrix, kind):
    if kind not in KINDS:
        raise ValueError(f"unknown matrix kind {kind!r}; expected one of {KINDS}")
    if kind == "observable":
        if not is_hermitian(matrix):
            raise InvalidObservableError("observable matrix is not Hermitian")
    else:
        if kind == "bipartite-state":
            subsystem_dim(matrix.shape[0])
        check_density_matrix(matrix)


def matrix_to_dict(matrix, kind: str) -> dict:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    return {
        "format": MATRIX_FORMAT,
        "kind": kind,
        "dim": int(m.shape[0]),
        "re": m.real.tolist(),
        "im": m.imag.tolist(),
    }


def matrix_from_dict(doc: dict, validate: bool = True) -> MatrixFile:
    dim = int(doc["dim"])
    kind = doc.get("kind", "observable")
    try:
        re = np.array(doc["re"], dtype=float)
        im = np.array(doc.get("im", np.zeros((dim, dim)).tolist()), dtype=float)
    except ValueError as exc:
        raise ShapeError(f"matrix arrays are not rectangular: {exc}") from None
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ShapeError(f"declared dim {dim} but arrays have shapes {re.shape} and {im.shape}")
    matrix = re + 1j * im
    if validate:
        _validate(matrix, kind)
    return MatrixFile(dim, matrix, kind)


def write_matrix_file(path, matrix, kind: str) -> Path:
    path = Path(path)
    path.write_text(json.dumps(matrix_to_dict(matrix, kind), indent=1) + "\n")
    return path


def read_matrix_file(path, validate: bool = True) -> MatrixFile:
    return matrix_from_dict(json.loads(Path(path).read_text()), validate=validate)


def basis_to_dict(basis: SuBasis) -> dict:
    d = basis.d_dense()
    idx = np.argwhere(d != 0)
    return {
        "format": BASIS_FORMAT,
        "dim": basis.dim,
        "ordering": list(basis.labels),
        "generators": [f"generator_{i:03d}.json" for i in range(basis.size)],
        "d_tensor": {
            "shape": list(d.shape),
            "entries": [[int(a), int(b), int(c), float(d[a, b, c])] for a, b, c in idx],
        },
    }


def write_basis(directory, basis: SuBasis) -> Path:
    """Write one observable file per generator plus ``basis.json`` (ordering and d-tensor)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = basis_to_dict(basis)
    for name, g in zip(manifest["generators"], basis.generators):
        write_matrix_file(directory / name, g, "observable")
    (directory / "basis.json").write_text(json.dumps(manifest, indent=1) + "\n")
    return directory


def read_basis(directory):
    """Return ``(dim, generators, d_tensor)`` as written by :func:`write_basis`."""
    directory = Path(directory)
    manifest = json.loads((directory / "basis.json").read_text())
    gens = np.array([read_matrix_file(directory / n).matrix for n in manifest["generators"]])
    d = np.zeros(manifest["d_tensor"]["shape"])
    for a, b, c, v in manifest["d_tensor"]["entries"]:
        d[a, b, c] = v
    return manifest["dim"], gens, d


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=_default) + "\n"
