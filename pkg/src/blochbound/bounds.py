"""Variance sums of observable sets and their state-independent bounds.

For observables ``A_i = a_i . l`` the variance in a state with Bloch vector
``r`` is ``2/N |a|^2 + (a*a).r - (a.r)^2``. Summing over a set gives a
quadratic function of ``r`` governed by the matrix ``sum_i a_i a_i^T`` and the
vector ``alpha = sum_i a_i*a_i``; bounding that quadratic over all ``r`` of a
given norm yields bounds that depend on the state only through ``|r|``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .codec import Observable, encode_observable, max_bloch_norm, observable_from_bloch
from .errors import (
    DegeneratePairError,
    InvalidArgumentError,
    InvalidDimensionError,
    ShapeError,
)
from .su_algebra import SuBasis, build_basis, star_product

__all__ = [
    "ObservableSet",
    "SubspaceSplit",
    "BoundsReport",
    "HornGap",
    "variance_bloch",
    "build_set",
    "split_subspace",
    "decomposed_variance_sum",
    "theorem1_bounds",
    "qubit_bounds",
    "horn_gap_check",
    "orthogonal_complete_set",
    "orthogonal_complete_sum",
    "orthogonal_complete_bounds",
    "RANK_RTOL",
    "PROPORTIONAL_TOL",
]

RANK_RTOL = 1e-10
PROPORTIONAL_TOL = 1e-9
NORM_SLACK = 1e-12
THETA_GRID = 1025
THETA_XTOL = 1e-12


def variance_bloch(a, r, basis: SuBasis):
    """Variance of ``a . l`` in the state with Bloch vector ``r``.

    Leading dimensions of ``a`` and ``r`` broadcast, so whole batches of
    observables and states can be evaluated in one call.
    """
    a = np.asarray(a, dtype=float)
    r = np.asarray(r, dtype=float)
    basis.check_vector(a)
    basis.check_vector(r)
    aa = star_product(a, a, basis)
    return (
        2.0 / basis.dim * np.sum(a * a, axis=-1)
        + np.sum(aa * r, axis=-1)
        - np.sum(a * r, axis=-1) ** 2
    )


@dataclass(frozen=True, eq=False)
class ObservableSet:
    """M observables together with ``script_A = sum a a^T`` and ``alpha = sum a*a``."""

    dim: int
    observables: tuple[Observable, ...]
    bloch: np.ndarray
    script_A: np.ndarray
    alpha: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __len__(self):
        return len(self.observables)

    @property
    def matrices(self) -> np.ndarray:
        return np.array([o.matrix for o in self.observables])


def build_set(observables, basis: SuBasis) -> ObservableSet:
    """Assemble an :class:`ObservableSet` from observables or raw Hermitian matrices."""
    obs = []
    for o in observables:
        if not isinstance(o, Observable):
            o = encode_observable(o, basis)
        if o.dim != basis.dim:
            raise ShapeError(f"observable of dimension {o.dim} in an N={basis.dim} set")
        obs.append(o)
    if not obs:
        raise InvalidArgumentError("an observable set needs at least one observable")
    bloch = np.array([o.bloch for o in obs])
    script_A = bloch.T @ bloch
    alpha = star_product(bloch, bloch, basis).sum(axis=0)
    w, v = np.linalg.eigh(script_A)
    return ObservableSet(
        dim=basis.dim,
        observables=tuple(obs),
        bloch=bloch,
        script_A=script_A,
        alpha=alpha,
        eigenvalues=w[::-1].copy(),
        eigenvectors=v[:, ::-1].copy(),
    )


@dataclass(frozen=True, eq=False)
class SubspaceSplit:
    """Orthogonal split of Bloch space into the span S1 of the a_i and its complement S0."""

    projector_S1: np.ndarray
    alpha1: np.ndarray
    alpha0: np.ndarray
    pinv_A: np.ndarray
    rank: int
    range_eigenvalues: np.ndarray  # descending, restricted to S1

    @property
    def complement_dim(self) -> int:
        return self.projector_S1.shape[0] - self.rank


def split_subspace(obs_set: ObservableSet, rtol: float = RANK_RTOL) -> SubspaceSplit:
    """Rank-revealing split; eigenvalues below ``rtol * sigma_1`` count as zero."""
    w, v = obs_set.eigenvalues, obs_set.eigenvectors
    top = w[0] if w.size else 0.0
    keep = w > rtol * top if top > 0 else np.zeros(w.shape, dtype=bool)
    vk = v[:, keep]
    projector = vk @ vk.T
    pinv = (vk / w[keep]) @ vk.T
    alpha1 = projector @ obs_set.alpha
    alpha0 = obs_set.alpha - alpha1
    return SubspaceSplit(
        projector_S1=projector,
        alpha1=alpha1,
        alpha0=alpha0,
        pinv_A=pinv,
        rank=int(keep.sum()),
        range_eigenvalues=w[keep].copy(),
    )


def decomposed_variance_sum(obs_set: ObservableSet, r, split: SubspaceSplit | None = None):
    """Sum of variances rewritten as a completed square on S1 plus a linear S0 term.

    Equal to ``sum_i variance_bloch(a_i, r)``; used to cross-check the split.
    """
    split = split or split_subspace(obs_set)
    r = np.asarray(r, dtype=float)
    r1 = r @ split.projector_S1
    r0 = r - r1
    shift = 0.5 * split.pinv_A @ split.alpha1
    x = r1 - shift
    return (
        2.0 / obs_set.dim * np.trace(obs_set.script_A)
        + 0.25 * split.alpha1 @ split.pinv_A @ split.alpha1
        - np.einsum("...i,ij,...j->...", x, obs_set.script_A, x)
        + r0 @ split.alpha0
    )


@dataclass(frozen=True)
class BoundsReport:
    lower: float
    upper: float
    C0: float
    C1: float
    C2: float
    theta_star_lower: float | None
    theta_star_upper: float | None
    eigenvalues_of_A: tuple[float, ...]
    method: str
    bloch_norm: float
    rank: int = 0
    alpha0_norm: float = 0.0
    star_ratios: tuple[float, ...] = ()
    notes: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["eigenvalues_of_A"] = list(self.eigenvalues_of_A)
        d["star_ratios"] = list(self.star_ratios)
        d["notes"] = list(self.notes)
        return d


def _check_norm(bloch_norm, dim, limit=None):
    limit = max_bloch_norm(dim) if limit is None else limit
    if not 0.0 <= bloch_norm <= limit + NORM_SLACK:
        raise InvalidArgumentError(
            f"Bloch norm {bloch_norm!r} outside [0, {limit:.6g}] for N={dim}"
        )
    return float(bloch_norm)


def _minimize_theta(f, lo: float, hi: float) -> tuple[float, float]:
    """Minimize a smooth vectorized ``f`` on ``[lo, hi]``: uniform grid, then golden section."""
    if hi <= lo:
        return lo, float(f(np.array([lo]))[0])
    grid = np.linspace(lo, hi, THETA_GRID)
    vals = f(grid)
    i = int(np.argmin(vals))
    best = (float(grid[i]), float(vals[i]))

    def scalar(t):
        return float(f(np.array([t]))[0])

    if 0 < i < THETA_GRID - 1:
        if vals[i] < vals[i - 1] and vals[i] < vals[i + 1]:
            res = minimize_scalar(
                scalar,
                bracket=(grid[i - 1], grid[i], grid[i + 1]),
                method="golden",
                tol=THETA_XTOL,
            )
            if lo <= res.x <= hi and res.fun < best[1]:
                best = (float(res.x), float(res.fun))
    else:
        j = 1 if i == 0 else THETA_GRID - 2
        cell = (min(grid[i], grid[j]), max(grid[i], grid[j]))
        res = minimize_scalar(
            scalar, bounds=cell, method="bounded", options={"xatol": THETA_XTOL}
        )
        if res.fun < best[1]:
            best = (float(res.x), float(res.fun))
    return best


def _star_ratios(obs_set: ObservableSet, basis: SuBasis) -> tuple[float, ...]:
    # |a_i * a_i| / sigma_1(a_i a_i^T); no bound is attached to this number
    out = []
    for a in obs_set.bloch:
        n2 = float(a @ a)
        out.append(float(np.linalg.norm(star_product(a, a, basis)) / n2) if n2 > 0 else 0.0)
    return tuple(out)


def theorem1_bounds(
    obs_set: ObservableSet,
    bloch_norm: float,
    *,
    strict_paper: bool = False,
    split: SubspaceSplit | None = None,
) -> BoundsReport:
    """Lower and upper bounds on ``sum_i Var(A_i)`` for any N, given only ``|r|``.

    ``lower = 2/N Tr A + C0 - C1`` and ``upper = 2/N Tr A + C0 - C2`` with

    * ``C0 = alpha1^T A^+ alpha1 / 4``
    * ``C1 = max_theta (|r| sin t + g)^2 s_max + |alpha0| |r| cos t``
    * ``C2 = min_theta (|r| sin t - g)^2 s_min - |alpha0| |r| cos t``

    where ``g = |A^+ alpha1| / 2`` and ``s_max``, ``s_min`` are the extreme
    eigenvalues of ``A`` on its range. ``theta`` splits ``|r|`` between S1
    (``sin``) and S0 (``cos``). When S0 is trivial only ``theta = pi/2`` is
    admissible; ``strict_paper=True`` optimizes over all of ``[0, pi/2]``
    regardless, which loosens the upper bound.
    """
    basis = build_basis(obs_set.dim)
    R = _check_norm(bloch_norm, obs_set.dim)
    split = split or split_subspace(obs_set)
    notes = []
    base = 2.0 / obs_set.dim * float(np.trace(obs_set.script_A))
    if split.rank == 0:
        notes.append("all observables are multiples of the identity; variances vanish")
        s_max = s_min = 0.0
    else:
        s_max = float(split.range_eigenvalues[0])
        s_min = float(split.range_eigenvalues[-1])
    g = 0.5 * float(np.linalg.norm(split.pinv_A @ split.alpha1))
    a0 = float(np.linalg.norm(split.alpha0))
    C0 = 0.25 * float(split.alpha1 @ split.pinv_A @ split.alpha1)

    def neg_f1(t):
        return -((R * np.sin(t) + g) ** 2 * s_max + a0 * R * np.cos(t))

    def f2(t):
        return (R * np.sin(t) - g) ** 2 * s_min - a0 * R * np.cos(t)

    if split.complement_dim == 0 and not strict_paper:
        lo = hi = np.pi / 2
        notes.append("observables span the full Bloch space; theta fixed at pi/2")
    else:
        lo, hi = 0.0, np.pi / 2
    t1, v1 = _minimize_theta(neg_f1, lo, hi)
    t2, C2 = _minimize_theta(f2, lo, hi)
    C1 = -v1
    return BoundsReport(
        lower=base + C0 - C1,
        upper=base + C0 - C2,
        C0=C0,
        C1=C1,
        C2=C2,
        theta_star_lower=t1,
        theta_star_upper=t2,
        eigenvalues_of_A=tuple(float(x) for x in obs_set.eigenvalues),
        method="strict-paper" if strict_paper else "theorem1",
        bloch_norm=R,
        rank=split.rank,
        alpha0_norm=a0,
        star_ratios=_star_ratios(obs_set, basis),
        notes=tuple(notes),
    )


def qubit_bounds(obs_set: ObservableSet, bloch_norm: float) -> BoundsReport:
    """Qubit bounds ``(1-|r|^2) s1 + s2 + s3 <= sum Var <= s1 + s2 + (1-|r|^2) s3``."""
    if obs_set.dim != 2:
        raise InvalidDimensionError(f"qubit bounds need N=2, got N={obs_set.dim}")
    R = _check_norm(bloch_norm, 2, limit=1.0)
    s1, s2, s3 = (float(x) for x in obs_set.eigenvalues)
    q = 1.0 - R * R
    return BoundsReport(
        lower=q * s1 + s2 + s3,
        upper=s1 + s2 + q * s3,
        C0=0.0,
        C1=R * R * s1,
        C2=R * R * s3,
        theta_star_lower=None,
        theta_star_upper=None,
        eigenvalues_of_A=(s1, s2, s3),
        method="qubit",
        bloch_norm=R,
        rank=split_subspace(obs_set).rank,
    )


class HornGap(NamedTuple):
    c1: float
    c2: float
    joint_lower: float
    gap: float


def horn_gap_check(A1, A2, bloch_norm: float) -> HornGap:
    """Compare the joint variance floor of two qubit observables with their individual floors.

    ``c_i = |a_i|^2 - |r|^2 s1(a_i a_i^T)`` and
    ``joint_lower = |a1|^2 + |a2|^2 - |r|^2 s1(a1 a1^T + a2 a2^T)``.
    The gap ``joint_lower - c1 - c2`` is strictly positive for non-parallel
    Bloch vectors and ``|r| > 0``.

    Raises
    ------
    DegeneratePairError
        If the Bloch vectors are proportional (or one vanishes).
    """
    basis = build_basis(2)
    o1 = A1 if isinstance(A1, Observable) else encode_observable(A1, basis)
    o2 = A2 if isinstance(A2, Observable) else encode_observable(A2, basis)
    if o1.dim != 2 or o2.dim != 2:
        raise InvalidDimensionError("the Horn gap check is defined for qubit observables")
    R = _check_norm(bloch_norm, 2, limit=1.0)
    a1, a2 = o1.bloch, o2.bloch
    n1, n2 = np.linalg.norm(a1), np.linalg.norm(a2)
    if n1 == 0 or n2 == 0 or abs(a1 @ a2) > (1.0 - PROPORTIONAL_TOL) * n1 * n2:
        raise DegeneratePairError("Bloch vectors are proportional; the Horn gap vanishes")
    P1, P2 = np.outer(a1, a1), np.outer(a2, a2)
    top1 = np.linalg.eigvalsh(P1)[-1]
    top2 = np.linalg.eigvalsh(P2)[-1]
    top12 = np.linalg.eigvalsh(P1 + P2)[-1]
    c1 = n1**2 - R * R * top1
    c2 = n2**2 - R * R * top2
    joint = n1**2 + n2**2 - R * R * top12
    return HornGap(float(c1), float(c2), float(joint), float(R * R * (top1 + top2 - top12)))


def orthogonal_complete_set(scale: float, rotation, basis: SuBasis) -> list[Observable]:
    """Observables ``A_i = scale * sum_j O_ij l_j`` for an orthogonal matrix ``O``."""
    O = np.asarray(rotation, dtype=float)
    if O.shape != (basis.size, basis.size):
        raise ShapeError(f"rotation must be {basis.size}x{basis.size}, got {O.shape}")
    return [observable_from_bloch(scale * row, basis) for row in O]


def orthogonal_complete_sum(scale: float, dim: int, bloch_norm: float) -> float:
    """Exact ``sum Var`` for a complete orthogonal set: ``|a|^2 (2(N^2-1)/N - |r|^2)``."""
    if not scale > 0:
        raise InvalidArgumentError(f"scale must be positive, got {scale!r}")
    R = _check_norm(bloch_norm, dim)
    return float(scale**2 * (2.0 * (dim * dim - 1) / dim - R * R))


def orthogonal_complete_bounds(scale: float, dim: int, bloch_norm: float) -> BoundsReport:
    value = orthogonal_complete_sum(scale, dim, bloch_norm)
    n = dim * dim - 1
    return BoundsReport(
        lower=value,
        upper=value,
        C0=0.0,
        C1=float(scale**2 * bloch_norm**2),
        C2=float(scale**2 * bloch_norm**2),
        theta_star_lower=None,
        theta_star_upper=None,
        eigenvalues_of_A=(float(scale**2),) * n,
        method="exact-identity",
        bloch_norm=float(bloch_norm),
        rank=n,
    )
