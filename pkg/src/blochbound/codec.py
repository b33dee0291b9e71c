"""Conversion between matrices and Bloch vectors.

States use ``r_mu = Tr[rho l_mu]`` so that ``rho = 1/N + r.l / 2``; observables
use ``a_mu = Tr[A0 l_mu] / 2`` for the traceless part ``A0`` so that
``A0 = a.l``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidObservableError, InvalidStateError, ShapeError
from .su_algebra import SuBasis

__all__ = [
    "HERMITIAN_ATOL",
    "TRACE_ATOL",
    "PSD_ATOL",
    "DecodedState",
    "Observable",
    "max_bloch_norm",
    "is_hermitian",
    "check_density_matrix",
    "is_density_matrix",
    "encode_state",
    "decode_state",
    "encode_observable",
    "observable_from_bloch",
    "purity",
]

HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-10
PSD_ATOL = 1e-10


def max_bloch_norm(dim: int) -> float:
    """Largest state Bloch norm, ``sqrt(2 (N - 1) / N)`` (attained by pure states)."""
    return float(np.sqrt(2.0 * (dim - 1) / dim))


def _check_square(m, dim: int | None = None) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    if dim is not None and m.shape[0] != dim:
        raise ShapeError(f"expected a {dim}x{dim} matrix, got {m.shape}")
    return m


def is_hermitian(m, atol: float = HERMITIAN_ATOL) -> bool:
    """Hermiticity check, tolerance scaled by the largest entry when it exceeds 1."""
    m = np.asarray(m)
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= atol * scale)


def check_density_matrix(rho, dim: int | None = None) -> np.ndarray:
    """Return ``rho`` as a complex array or raise :class:`InvalidStateError`."""
    rho = _check_square(rho, dim).astype(complex)
    if not is_hermitian(rho):
        raise InvalidStateError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_ATOL:
        raise InvalidStateError(f"density matrix has trace {tr.real:.3g}, expected 1")
    lam = np.linalg.eigvalsh(rho)[0]
    if lam < -PSD_ATOL:
        raise InvalidStateError(f"density matrix has negative eigenvalue {lam:.3g}")
    return rho


def is_density_matrix(rho, dim: int | None = None) -> bool:
    try:
        check_density_matrix(rho, dim)
    except (InvalidStateError, ShapeError):
        return False
    return True


def encode_state(rho, basis: SuBasis) -> np.ndarray:
    """Bloch vector ``r_mu = Tr[rho l_mu]`` of a valid density matrix."""
    rho = check_density_matrix(rho, basis.dim)
    return np.einsum("kij,ji->k", basis.generators, rho).real


class DecodedState(NamedTuple):
    matrix: np.ndarray
    is_valid: bool
    min_eigenvalue: float


def decode_state(r, basis: SuBasis) -> DecodedState:
    """Matrix ``1/N + r.l / 2``.

    Decoding never fails on a correctly sized vector; positivity is reported
    through ``is_valid`` so callers can probe outside the state space.
    """
    r = np.asarray(r, dtype=float)
    if r.shape != (basis.size,):
        raise ShapeError(f"expected a Bloch vector of length {basis.size}, got {r.shape}")
    rho = np.eye(basis.dim, dtype=complex) / basis.dim + 0.5 * basis.to_matrix(r)
    lam = float(np.linalg.eigvalsh(rho)[0])
    return DecodedState(rho, lam >= -PSD_ATOL, lam)


@dataclass(frozen=True, eq=False)
class Observable:
    """A Hermitian observable with the Bloch vector of its traceless part."""

    dim: int
    matrix: np.ndarray
    bloch: np.ndarray

    @property
    def traceless(self) -> np.ndarray:
        return self.matrix - np.trace(self.matrix) / self.dim * np.eye(self.dim)


def encode_observable(A, basis: SuBasis) -> Observable:
    """Split off the trace of ``A`` and expand the rest in the generators.

    Raises
    ------
    InvalidObservableError
        If ``A`` is not Hermitian within tolerance.
    """
    A = _check_square(A, basis.dim).astype(complex)
    if not is_hermitian(A):
        raise InvalidObservableError("observable is not Hermitian")
    A0 = A - np.trace(A) / basis.dim * np.eye(basis.dim)
    a = 0.5 * np.einsum("kij,ji->k", basis.generators, A0).real
    return Observable(basis.dim, A, a)


def observable_from_bloch(a, basis: SuBasis) -> Observable:
    a = np.asarray(a, dtype=float)
    if a.shape != (basis.size,):
        raise ShapeError(f"expected a Bloch vector of length {basis.size}, got {a.shape}")
    return Observable(basis.dim, basis.to_matrix(a), a.copy())


def purity(rho) -> float:
    """``Tr[rho^2]``; equals ``1/N + |r|^2 / 2``."""
    rho = np.asarray(rho)
    return float(np.einsum("ij,ji->", rho, rho).real)
