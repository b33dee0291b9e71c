"""Generalized Gell-Mann generators of SU(N) and their symmetric structure constants.

Generator ordering (part of the file and Bloch-vector format):

1. symmetric off-diagonal generators ``E_jk + E_kj`` for ``j < k`` in
   lexicographic order of ``(j, k)``;
2. antisymmetric off-diagonal generators ``-i E_jk + i E_kj`` in the same order;
3. diagonal generators ``sqrt(2 / (l (l + 1))) diag(1, ..., 1, -l, 0, ..., 0)``
   for ``l = 1, ..., N - 1``.

For ``N = 2`` this gives the Pauli matrices in the order ``(X, Y, Z)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np
import scipy.sparse as sp

from .errors import InvalidDimensionError, ShapeError

__all__ = [
    "SuBasis",
    "build_basis",
    "gellmann_matrices",
    "star_product",
    "SPARSE_ABOVE",
]

#: d-tensors for dimensions above this are stored as a sparse (n*n, n) matrix.
SPARSE_ABOVE = 4
_D_CUTOFF = 1e-14


def gellmann_matrices(dim: int) -> tuple[np.ndarray, tuple[str, ...]]:
    """Return the ``dim**2 - 1`` generators as a ``(n, dim, dim)`` array plus labels."""
    if int(dim) != dim or dim < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {dim!r}")
    dim = int(dim)
    pairs = list(combinations(range(dim), 2))
    mats = []
    labels = []
    for j, k in pairs:
        m = np.zeros((dim, dim), dtype=complex)
        m[j, k] = m[k, j] = 1.0
        mats.append(m)
        labels.append(f"sym({j},{k})")
    for j, k in pairs:
        m = np.zeros((dim, dim), dtype=complex)
        m[j, k] = -1j
        m[k, j] = 1j
        mats.append(m)
        labels.append(f"asym({j},{k})")
    for l in range(1, dim):
        diag = np.zeros(dim)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(np.sqrt(2.0 / (l * (l + 1))) * diag).astype(complex))
        labels.append(f"diag({l})")
    return np.array(mats), tuple(labels)


def _symmetric_constants(gens: np.ndarray) -> np.ndarray:
    # d_{mu nu k} = 1/4 Tr[{l_mu, l_nu} l_k], one mu-slab at a time
    n = gens.shape[0]
    d = np.empty((n, n, n))
    for mu in range(n):
        anti = gens[mu] @ gens + gens @ gens[mu]
        d[mu] = 0.25 * np.einsum("bij,kji->bk", anti, gens).real
    d[np.abs(d) < _D_CUTOFF] = 0.0
    return d


@dataclass(frozen=True, eq=False)
class SuBasis:
    """Orthonormal SU(N) generator basis with ``Tr[l_mu l_nu] = 2 delta``.

    Attributes
    ----------
    dim : int
        Hilbert-space dimension N.
    generators : ndarray, shape (N**2 - 1, N, N)
        Read-only stack of generators in the documented order.
    labels : tuple of str
        Human-readable generator names, same order.
    d_tensor : ndarray or scipy.sparse.csr_array
        Symmetric structure constants. Dense ``(n, n, n)`` for ``N <= 4``;
        otherwise a sparse ``(n*n, n)`` matrix with row ``mu*n + nu``.
    """

    dim: int
    generators: np.ndarray
    labels: tuple[str, ...]
    d_tensor: object

    @property
    def size(self) -> int:
        """Number of generators, ``N**2 - 1``."""
        return self.dim * self.dim - 1

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.d_tensor)

    def d_dense(self) -> np.ndarray:
        """The structure constants as a dense ``(n, n, n)`` array."""
        if self.is_sparse:
            n = self.size
            return self.d_tensor.toarray().reshape(n, n, n)
        return self.d_tensor

    def to_matrix(self, components) -> np.ndarray:
        """Contract ``components`` (shape ``(..., n)``) with the generators."""
        c = np.asarray(components)
        self.check_vector(c)
        return np.tensordot(c, self.generators, axes=([-1], [0]))

    def check_vector(self, v) -> None:
        if np.shape(v)[-1:] != (self.size,):
            raise ShapeError(
                f"expected Bloch vectors of length {self.size} for N={self.dim}, "
                f"got shape {np.shape(v)}"
            )


@lru_cache(maxsize=None)
def build_basis(dim: int) -> SuBasis:
    """Build (and cache) the SU(``dim``) basis.

    Raises
    ------
    InvalidDimensionError
        If ``dim < 2``.
    """
    gens, labels = gellmann_matrices(dim)
    gens.setflags(write=False)
    d = _symmetric_constants(gens)
    n = gens.shape[0]
    if dim > SPARSE_ABOVE:
        d = sp.csr_array(d.reshape(n * n, n))
    else:
        d.setflags(write=False)
    return SuBasis(dim=int(dim), generators=gens, labels=labels, d_tensor=d)


def star_product(a, b, basis: SuBasis) -> np.ndarray:
    """Symmetric product ``(a*b)_k = sum_{mu,nu} a_mu b_nu d_{mu nu k}``.

    Both arguments may carry leading batch dimensions that broadcast together.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    basis.check_vector(a)
    basis.check_vector(b)
    if not basis.is_sparse:
        return np.einsum("...m,...n,mnk->...k", a, b, basis.d_tensor)
    n = basis.size
    outer = a[..., :, None] * b[..., None, :]
    lead = outer.shape[:-2]
    flat = outer.reshape(-1, n * n)
    out = (basis.d_tensor.T @ flat.T).T
    return np.asarray(out).reshape(*lead, n)
