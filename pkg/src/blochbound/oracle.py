"""Brute-force reference machinery: trace-formula variances, random states and
observables, and numerical extremization of variance sums over state sets.

Nothing here uses the Bloch-form variance or the analytic bounds, so it can
certify them independently.

Random streams
--------------
Every random draw comes from ``substream(seed, *keys)``, a PCG64 generator
seeded with ``SeedSequence(seed, spawn_key=keys)``. Work split into numbered
chunks appends the chunk number to the keys, so results do not depend on how
chunks are distributed over workers.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize
from scipy.stats import special_ortho_group

from .codec import PSD_ATOL, max_bloch_norm
from .errors import InvalidArgumentError, SamplingExhaustedError, ShapeError
from .su_algebra import SuBasis, build_basis
from .witness import BipartiteState, extract_bipartite

__all__ = [
    "DEFAULT_SEED",
    "MAX_REJECTION_ATTEMPTS",
    "SamplerConfig",
    "ExtremaReport",
    "substream",
    "variance_direct",
    "variance_sum_direct",
    "states_from_bloch",
    "bloch_from_states",
    "haar_pure_states",
    "ginibre_states",
    "fixed_norm_states",
    "sample_states",
    "sample_state",
    "random_hermitian",
    "random_rotation",
    "separable_states",
    "sample_separable",
    "extremize_sum",
]

DEFAULT_SEED = 20240917
MAX_REJECTION_ATTEMPTS = 10**6
_REJECTION_BATCH = 4096


def substream(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for ``(seed, *keys)``; no keys means key ``(0,)``."""
    spawn_key = tuple(int(k) for k in keys) or (0,)
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=spawn_key))


def _check_purity(purity_class, dim):
    if isinstance(purity_class, str):
        if purity_class not in ("pure", "arbitrary"):
            raise InvalidArgumentError(f"unknown purity class {purity_class!r}")
        return purity_class
    x = float(purity_class)
    if not 0.0 <= x <= max_bloch_norm(dim) + 1e-12:
        raise InvalidArgumentError(f"fixed Bloch norm {x!r} out of range for N={dim}")
    return x


@dataclass(frozen=True)
class SamplerConfig:
    """What to sample and from which stream.

    ``purity_class`` is ``"pure"``, ``"arbitrary"`` or a float giving a fixed
    Bloch norm.
    """

    seed: int = DEFAULT_SEED
    n_samples: int = 1
    dim: int = 2
    purity_class: object = "arbitrary"

    def __post_init__(self):
        if self.n_samples < 1:
            raise InvalidArgumentError("n_samples must be at least 1")
        object.__setattr__(self, "purity_class", _check_purity(self.purity_class, self.dim))

    def rng(self, stream: int = 0) -> np.random.Generator:
        return substream(self.seed, stream)


def variance_direct(A, rho):
    """``Tr[A^2 rho] - Tr[A rho]^2`` on raw matrices (broadcasts over leading axes)."""
    A = np.asarray(A)
    rho = np.asarray(rho)
    if A.shape[-2:] != rho.shape[-2:] or A.shape[-1] != A.shape[-2]:
        raise ShapeError(f"incompatible shapes {A.shape} and {rho.shape}")
    A2 = A @ A
    second = np.einsum("...ij,...ji->...", A2, rho).real
    first = np.einsum("...ij,...ji->...", A, rho).real
    return second - first**2


def variance_sum_direct(mats, rhos):
    """Sum over the observable stack ``mats`` (M, N, N) for each state in ``rhos`` (..., N, N)."""
    mats = np.asarray(mats)
    rhos = np.asarray(rhos)
    sq = mats @ mats
    second = np.einsum("mij,...ji->...m", sq, rhos).real
    first = np.einsum("mij,...ji->...m", mats, rhos).real
    return np.sum(second - first**2, axis=-1)


def states_from_bloch(r, basis: SuBasis) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return np.eye(basis.dim) / basis.dim + 0.5 * basis.to_matrix(r)


def bloch_from_states(rhos, basis: SuBasis) -> np.ndarray:
    return np.einsum("kij,...ji->...k", basis.generators, np.asarray(rhos)).real


def haar_pure_states(rng, dim: int, count: int) -> np.ndarray:
    psi = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    return np.einsum("pi,pj->pij", psi, psi.conj())


def ginibre_states(rng, dim: int, count: int) -> np.ndarray:
    G = rng.standard_normal((count, dim, dim)) + 1j * rng.standard_normal((count, dim, dim))
    W = G @ G.conj().transpose(0, 2, 1)
    return W / np.trace(W, axis1=1, axis2=2).real[:, None, None]


def fixed_norm_states(
    rng, basis: SuBasis, bloch_norm: float, count: int, max_attempts: int = MAX_REJECTION_ATTEMPTS
) -> np.ndarray:
    """States with Bloch vector uniform in direction at fixed norm, rejecting non-positive ones.

    Raises
    ------
    SamplingExhaustedError
        When ``max_attempts`` consecutive candidates fail positivity.
    """
    n = basis.size
    if bloch_norm == 0:
        return np.broadcast_to(np.eye(basis.dim) / basis.dim, (count, basis.dim, basis.dim)).astype(complex)
    accepted = []
    since_last = 0
    while len(accepted) < count:
        batch = min(_REJECTION_BATCH, max_attempts - since_last)
        if batch <= 0:
            raise SamplingExhaustedError(bloch_norm, max_attempts)
        d = rng.standard_normal((batch, n))
        d *= bloch_norm / np.linalg.norm(d, axis=1, keepdims=True)
        rhos = states_from_bloch(d, basis)
        ok = np.linalg.eigvalsh(rhos)[:, 0] >= -PSD_ATOL
        idx = np.flatnonzero(ok)
        if idx.size:
            since_last = 0
            accepted.extend(rhos[idx[: count - len(accepted)]])
        else:
            since_last += batch
    return np.array(accepted)


def _draw(rng, basis: SuBasis, purity_class, count: int) -> np.ndarray:
    if purity_class == "pure":
        return haar_pure_states(rng, basis.dim, count)
    if purity_class == "arbitrary":
        return ginibre_states(rng, basis.dim, count)
    return fixed_norm_states(rng, basis, purity_class, count)


def sample_states(config: SamplerConfig, basis: SuBasis | None = None, stream: int = 0) -> np.ndarray:
    """``config.n_samples`` density matrices, shape ``(n, N, N)``, from ``substream(seed, stream)``."""
    basis = basis or build_basis(config.dim)
    if basis.dim != config.dim:
        raise ShapeError(f"basis has N={basis.dim}, config asks for N={config.dim}")
    return _draw(config.rng(stream), basis, config.purity_class, config.n_samples)


def sample_state(config: SamplerConfig, basis: SuBasis | None = None, stream: int = 0) -> np.ndarray:
    return sample_states(replace(config, n_samples=1), basis, stream)[0]


def random_hermitian(rng, dim: int, count: int, scale: float = 1.0) -> np.ndarray:
    X = rng.standard_normal((count, dim, dim)) + 1j * rng.standard_normal((count, dim, dim))
    return scale * 0.5 * (X + X.conj().transpose(0, 2, 1))


def random_rotation(rng, n: int) -> np.ndarray:
    """Haar-random matrix in SO(n)."""
    return special_ortho_group.rvs(n, random_state=rng)


def _product_mixtures(rng, basis, purity_class, terms_per_state):
    N = basis.dim
    out = []
    for k in terms_per_state:
        p = rng.dirichlet(np.ones(k))
        ra = _draw(rng, basis, purity_class, k)
        rb = _draw(rng, basis, purity_class, k)
        rho = np.einsum("t,tij,tkl->ikjl", p, ra, rb).reshape(N * N, N * N)
        out.append((rho, p, ra, rb))
    return out


def separable_states(rng, basis: SuBasis, count: int, max_terms: int = 10, purity_class="arbitrary") -> np.ndarray:
    """``count`` random separable states, each a mixture of 1..max_terms product states."""
    terms = rng.integers(1, max_terms + 1, size=count)
    return np.array([m[0] for m in _product_mixtures(rng, basis, purity_class, terms)])


def sample_separable(config: SamplerConfig, n_terms: int, basis: SuBasis | None = None, stream: int = 0) -> BipartiteState:
    """A random mixture of ``n_terms`` product states with local states from ``config.purity_class``.

    The correlation matrix is checked against ``sum_k p_k r_k s_k^T``.
    """
    if n_terms < 1:
        raise InvalidArgumentError("n_terms must be at least 1")
    basis = basis or build_basis(config.dim)
    rng = config.rng(stream)
    rho, p, ra, rb = _product_mixtures(rng, basis, config.purity_class, [n_terms])[0]
    state = extract_bipartite(rho, basis)
    expected = np.einsum("t,tm,tn->mn", p, bloch_from_states(ra, basis), bloch_from_states(rb, basis))
    if np.max(np.abs(state.T - expected)) > 1e-10:
        raise RuntimeError("correlation matrix of the mixture disagrees with sum p r s^T")
    return state


@dataclass(frozen=True)
class ExtremaReport:
    empirical_min: float
    empirical_max: float
    argmin_state: np.ndarray
    argmax_state: np.ndarray
    n_evaluations: int
    refinement_converged: bool
    min_history: tuple[float, ...] = field(default=(), repr=False)
    max_history: tuple[float, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "empirical_min": self.empirical_min,
            "empirical_max": self.empirical_max,
            "argmin_state": self.argmin_state.tolist(),
            "argmax_state": self.argmax_state.tolist(),
            "n_evaluations": self.n_evaluations,
            "refinement_converged": self.refinement_converged,
        }


def _factor_to_state(z, dim, rank):
    G = (z[: dim * rank] + 1j * z[dim * rank :]).reshape(dim, rank)
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def _state_to_factor(rho, rank):
    w, V = np.linalg.eigh(rho)
    G = V[:, ::-1][:, :rank] * np.sqrt(np.clip(w[::-1][:rank], 0.0, None))
    return np.concatenate([G.real.ravel(), G.imag.ravel()])


def _refine(r, value, objective, purity_class, basis, maxiter):
    """Local refinement over ``rho = G G^dag / Tr`` (rank 1 for pure states).

    A fixed Bloch norm is an equality constraint on the purity; the final
    point is rescaled exactly onto the sphere. Returns
    ``(r, value, evaluations, converged, history)``, history being the
    running best value.
    """
    dim = basis.dim
    rank = 1 if purity_class == "pure" else dim
    history = [value]
    if purity_class == 0:
        return r, value, 0, True, np.array(history)

    def f(z):
        v = objective(bloch_from_states(_factor_to_state(z, dim, rank), basis))
        if v < history[-1]:
            history.append(v)
        return v

    constraints = ()
    if not isinstance(purity_class, str):
        target = 1.0 / dim + 0.5 * purity_class**2

        def purity_gap(z):
            rho = _factor_to_state(z, dim, rank)
            return np.vdot(rho, rho).real - target

        constraints = ({"type": "eq", "fun": purity_gap},)
    z0 = _state_to_factor(states_from_bloch(r, basis), rank)
    res = minimize(f, z0, method="SLSQP", constraints=constraints, options={"maxiter": maxiter, "ftol": 1e-15})
    cand = bloch_from_states(_factor_to_state(res.x, dim, rank), basis)
    if not isinstance(purity_class, str):
        cand = cand * (purity_class / np.linalg.norm(cand))
    ok = np.linalg.eigvalsh(states_from_bloch(cand, basis))[0] >= -PSD_ATOL
    fc = objective(cand) if ok else np.inf
    converged = bool(res.success) and ok
    if fc <= value:
        r, value = cand, fc
    history = [h for h in history if h >= value] + [value]
    return r, value, int(res.nfev), converged, np.minimum.accumulate(history)


def extremize_sum(
    obs_set,
    purity_class,
    config: SamplerConfig,
    basis: SuBasis | None = None,
    *,
    n_starts: int = 3,
    maxiter: int = 500,
) -> ExtremaReport:
    """Empirical min and max of ``sum_i Var(A_i)`` over states of a purity class.

    Broad sampling (``config.n_samples`` states) is followed by SLSQP
    refinement from the ``n_starts`` best samples for each direction.
    Non-convergence is reported through ``refinement_converged``.
    """
    mats = obs_set.matrices if hasattr(obs_set, "matrices") else np.asarray(obs_set)
    dim = mats.shape[-1]
    basis = basis or build_basis(dim)
    purity_class = _check_purity(purity_class, dim)
    rhos = sample_states(replace(config, dim=dim, purity_class=purity_class), basis)
    vals = variance_sum_direct(mats, rhos)
    blochs = bloch_from_states(rhos, basis)
    evals = len(vals)
    order = np.argsort(vals, kind="stable")
    converged = True
    results = {}
    for sign, picks in ((1.0, order[:n_starts]), (-1.0, order[::-1][:n_starts])):

        def objective(r, sign=sign):
            return sign * float(variance_sum_direct(mats, states_from_bloch(r, basis)))

        best = None
        for i in picks:
            r, v, n_ev, ok, hist = _refine(
                blochs[i].copy(), sign * vals[i], objective, purity_class, basis, maxiter
            )
            evals += n_ev
            converged &= ok
            if best is None or v < best[1]:
                best = (r, v, hist)
        results[sign] = best
    rmin, vmin, hmin = results[1.0]
    rmax, vmax, hmax = results[-1.0]
    return ExtremaReport(
        empirical_min=float(vmin),
        empirical_max=float(-vmax),
        argmin_state=rmin,
        argmax_state=rmax,
        n_evaluations=int(evals),
        refinement_converged=bool(converged),
        min_history=tuple(hmin),
        max_history=tuple(-h for h in hmax),
    )
