"""Randomized verification suites.

Each ``check_*`` function runs one family of invariants at a requested scale
and returns a JSON-ready dict with a ``passed`` flag, the tolerance it used and
the measured errors. Randomness comes from :func:`blochbound.oracle.substream`
keyed by ``(seed, check_id, ...)``, so a report is a pure function of its
arguments. ``workers > 1`` fans fixed-size chunks out to processes; the chunk
layout does not depend on the worker count.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .bounds import (
    build_set,
    horn_gap_check,
    orthogonal_complete_set,
    orthogonal_complete_sum,
    qubit_bounds,
    theorem1_bounds,
    variance_bloch,
)
from .codec import max_bloch_norm, observable_from_bloch
from .errors import DegeneratePairError
from .oracle import (
    bloch_from_states,
    extremize_sum,
    fixed_norm_states,
    ginibre_states,
    haar_pure_states,
    random_hermitian,
    random_rotation,
    SamplerConfig,
    separable_states,
    substream,
    variance_direct,
    variance_sum_direct,
)
from .su_algebra import build_basis, star_product
from .witness import (
    Verdict,
    criterion_kyfan,
    criterion_local_sum,
    extract_bipartite,
    local_sum_formula,
    optimal_bloch_bases,
    optimal_observables,
)

CHUNK = 5000

# stream keys, one per check family
_K_ALGEBRA, _K_VARIANCE, _K_ORTHO, _K_QUBIT, _K_THEOREM1 = 1, 2, 3, 4, 5
_K_REDUCTION, _K_HORN, _K_SEPARABLE, _K_ZERO, _K_OPTIMAL = 6, 7, 8, 9, 10


def _map(fn, jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _chunks(total):
    return [(i, min(CHUNK, total - i * CHUNK)) for i in range((total + CHUNK - 1) // CHUNK)]


# ---------------------------------------------------------------- algebra


def check_algebra(dim, n_samples, seed):
    basis = build_basis(dim)
    G = basis.generators
    n = basis.size
    rng = substream(seed, _K_ALGEBRA, dim)
    herm = float(np.max(np.abs(G - G.conj().transpose(0, 2, 1))))
    trace = float(np.max(np.abs(np.trace(G, axis1=1, axis2=2))))
    gram = np.einsum("aij,bji->ab", G, G)
    ortho = float(np.max(np.abs(gram - 2 * np.eye(n))))
    d = basis.d_dense()
    sym = max(
        float(np.max(np.abs(d - d.transpose(p))))
        for p in [(1, 0, 2), (0, 2, 1), (2, 1, 0), (1, 2, 0), (2, 0, 1)]
    )
    dtrace = float(np.max(np.abs(np.einsum("mmk->k", d))))
    count = max(1, min(n_samples, 2000))
    A = random_hermitian(rng, dim, count)
    A0 = A - np.trace(A, axis1=1, axis2=2)[:, None, None] / dim * np.eye(dim)
    coeff = 0.5 * bloch_from_states(A0, basis)
    recon = float(np.max(np.abs(basis.to_matrix(coeff) - A0)))
    a = rng.standard_normal((count, n))
    b = rng.standard_normal((count, n))
    prod = np.einsum("pij,pji->p", basis.to_matrix(a), basis.to_matrix(b)).real
    inner = float(np.max(np.abs(prod - 2 * np.sum(a * b, axis=1))))
    errors = {
        "hermitian": herm,
        "traceless": trace,
        "orthonormal": ortho,
        "d_symmetric": sym,
        "d_trace_identity": dtrace,
        "reconstruction": recon,
        "trace_inner_product": inner,
    }
    tol = {
        "hermitian": 1e-12,
        "traceless": 1e-12,
        "orthonormal": 1e-12,
        "d_symmetric": 1e-12,
        "d_trace_identity": 1e-10,
        "reconstruction": 1e-10,
        "trace_inner_product": 1e-10,
    }
    return {
        "name": f"algebra N={dim}",
        "passed": all(errors[k] <= tol[k] for k in errors),
        "errors": errors,
        "tolerances": tol,
        "n_samples": count,
    }


# ---------------------------------------------------------------- bounds


def _variance_chunk(job):
    seed, dim, index, count = job
    basis = build_basis(dim)
    rng = substream(seed, _K_VARIANCE, dim, index)
    A = random_hermitian(rng, dim, count)
    half = count // 2
    rhos = np.concatenate([ginibre_states(rng, dim, count - half), haar_pure_states(rng, dim, half)])
    a = 0.5 * bloch_from_states(A, basis)
    r = bloch_from_states(rhos, basis)
    err = np.abs(variance_bloch(a, r, basis) - variance_direct(A, rhos))
    return float(err.max())


def check_variance_agreement(dim, n_pairs, seed, workers=1, tol=1e-10):
    jobs = [(seed, dim, i, c) for i, c in _chunks(n_pairs)]
    worst = max(_map(_variance_chunk, jobs, workers))
    return {
        "name": f"variance Bloch form vs trace formula N={dim}",
        "passed": worst <= tol,
        "max_abs_error": worst,
        "tolerance": tol,
        "n_pairs": n_pairs,
    }


def check_orthogonal_identity(dim, n_trials, seed, tol=1e-9):
    basis = build_basis(dim)
    rng = substream(seed, _K_ORTHO, dim)
    worst = 0.0
    for t in range(n_trials):
        O = random_rotation(rng, basis.size)
        scale = rng.uniform(0.5, 2.0)
        obs = orthogonal_complete_set(scale, O, basis)
        rho = (haar_pure_states if t % 2 else ginibre_states)(rng, dim, 1)[0]
        R = float(np.linalg.norm(bloch_from_states(rho, basis)))
        direct = float(variance_sum_direct(np.array([o.matrix for o in obs]), rho))
        worst = max(worst, abs(direct - orthogonal_complete_sum(scale, dim, min(R, max_bloch_norm(dim)))))
    out = {
        "name": f"complete orthogonal set identity N={dim}",
        "max_abs_error": worst,
        "tolerance": tol,
        "n_trials": n_trials,
    }
    passed = worst <= tol
    if dim == 2:
        # Pauli matrices: sum of variances is 3 - |r|^2
        rhos = ginibre_states(rng, 2, max(n_trials, 1))
        r = bloch_from_states(rhos, basis)
        R = np.linalg.norm(r, axis=1)
        direct = variance_sum_direct(basis.generators, rhos)
        pauli_err = float(np.max(np.abs(direct - (3.0 - R**2))))
        exact = all(orthogonal_complete_sum(1.0, 2, x) == 3.0 - x * x for x in R)
        out["pauli_max_abs_error"] = pauli_err
        out["pauli_identity_exact"] = exact
        passed = passed and exact and pauli_err <= 1e-12
    out["passed"] = passed
    return out


def _random_set(rng, basis, m, rank=None):
    """m random observables; ``rank`` limits the span of their Bloch vectors."""
    n = basis.size
    if rank is None or rank >= n:
        a = rng.standard_normal((m, n))
    else:
        frame = np.linalg.qr(rng.standard_normal((n, rank)))[0]
        a = rng.standard_normal((m, rank)) @ frame.T
    shifts = rng.standard_normal(m)
    obs = [observable_from_bloch(x, basis) for x in a]
    mats = [o.matrix + s * np.eye(basis.dim) for o, s in zip(obs, shifts)]
    return build_set(mats, basis)


def check_qubit_sandwich(n_states, seed, norms=(0.0, 0.3, 0.7, 1.0), n_sets=10, n_attain=3, tol=1e-10, attain_tol=1e-6):
    basis = build_basis(2)
    rng = substream(seed, _K_QUBIT)
    violations_q = violations_t = 0
    for _ in range(n_sets):
        s = _random_set(rng, basis, int(rng.integers(1, 7)))
        mats = s.matrices
        for x in norms:
            rhos = fixed_norm_states(rng, basis, x, n_states)
            vals = variance_sum_direct(mats, rhos)
            q = qubit_bounds(s, x)
            t = theorem1_bounds(s, x)
            violations_q += int(np.sum((vals < q.lower - tol) | (vals > q.upper + tol)))
            violations_t += int(np.sum((vals < t.lower - tol) | (vals > t.upper + tol)))
    worst_attain = 0.0
    unconverged = 0
    for k in range(n_attain):
        O = random_rotation(rng, 3)
        scales = rng.uniform(0.5, 2.0, size=3)
        s = build_set([observable_from_bloch(c * O[:, i], basis) for i, c in enumerate(scales)], basis)
        for x in norms:
            purity = "pure" if x == 1.0 else x
            ex = extremize_sum(s, purity, SamplerConfig(seed=seed, n_samples=200, dim=2))
            q = qubit_bounds(s, x)
            worst_attain = max(worst_attain, abs(ex.empirical_min - q.lower), abs(ex.empirical_max - q.upper))
            unconverged += not ex.refinement_converged
    return {
        "name": "qubit sandwich",
        "passed": violations_q == 0 and violations_t == 0 and worst_attain <= attain_tol,
        "violations_qubit": violations_q,
        "violations_theorem1": violations_t,
        "evaluations": n_sets * len(norms) * n_states,
        "tolerance": tol,
        "attainment_max_abs_error": worst_attain,
        "attainment_tolerance": attain_tol,
        "attainment_unconverged_runs": unconverged,
    }


def _theorem1_chunk(job):
    seed, dim, index, count, norms, pools = job
    basis = build_basis(dim)
    rng = substream(seed, _K_THEOREM1, dim, index)
    tol = 1e-9
    out = {"violations": 0, "lower_gap": [[] for _ in norms], "upper_gap": [[] for _ in norms]}
    for _ in range(count):
        s = _random_set(rng, basis, int(rng.integers(2, 4)))
        mats = s.matrices
        for j, (x, rhos) in enumerate(zip(norms, pools)):
            vals = variance_sum_direct(mats, rhos)
            b = theorem1_bounds(s, x)
            out["violations"] += int(np.sum((vals < b.lower - tol) | (vals > b.upper + tol)))
            out["lower_gap"][j].append(float(vals.min() - b.lower))
            out["upper_gap"][j].append(float(b.upper - vals.max()))
    return out


def check_theorem1_sandwich(dim, n_sets, n_states, seed, workers=1, fractions=(0.0, 0.25, 0.5, 0.75, 1.0)):
    """Bounds against sampled states at fixed norms (fraction 1.0 means Haar pure states)."""
    basis = build_basis(dim)
    top = max_bloch_norm(dim)
    norms, pools = [], []
    for j, f in enumerate(fractions):
        rng = substream(seed, _K_THEOREM1, dim, 10**6 + j)
        if f == 1.0:
            pools.append(haar_pure_states(rng, dim, n_states))
        else:
            pools.append(fixed_norm_states(rng, basis, f * top, n_states))
        norms.append(min(f * top, top))
    per = 100
    jobs = [(seed, dim, i, min(per, n_sets - i * per), norms, pools) for i in range((n_sets + per - 1) // per)]
    parts = _map(_theorem1_chunk, jobs, workers)
    violations = sum(p["violations"] for p in parts)
    gaps = []
    for j, x in enumerate(norms):
        lg = np.concatenate([p["lower_gap"][j] for p in parts])
        ug = np.concatenate([p["upper_gap"][j] for p in parts])
        gaps.append(
            {
                "bloch_norm": x,
                "lower_gap_mean": float(lg.mean()),
                "lower_gap_max": float(lg.max()),
                "upper_gap_mean": float(ug.mean()),
                "upper_gap_max": float(ug.max()),
            }
        )
    return {
        "name": f"theorem1 sandwich N={dim}",
        "passed": violations == 0,
        "violations": violations,
        "tolerance": 1e-9,
        "n_sets": n_sets,
        "n_states_per_norm": n_states,
        "empirical_gaps": gaps,
    }


def check_qubit_reduction(n_configs, seed, tol=1e-12):
    basis = build_basis(2)
    rng = substream(seed, _K_REDUCTION)
    worst = 0.0
    for _ in range(n_configs):
        m = int(rng.integers(1, 7))
        s = _random_set(rng, basis, m, rank=int(rng.integers(1, 4)))
        x = float(rng.uniform(0, 1))
        q, t = qubit_bounds(s, x), theorem1_bounds(s, x)
        worst = max(worst, abs(q.lower - t.lower), abs(q.upper - t.upper))
    return {
        "name": "theorem1 reduces to qubit bounds",
        "passed": worst <= tol,
        "max_abs_error": worst,
        "tolerance": tol,
        "n_configs": n_configs,
    }


def horn_gap_closed_form(a1, a2, bloch_norm):
    """Gap for two rank-one terms from the 2x2 Gram-matrix eigenvalue."""
    p, q, c = a1 @ a1, a2 @ a2, a1 @ a2
    top = 0.5 * (p + q + np.sqrt((p - q) ** 2 + 4 * c * c))
    return bloch_norm**2 * (p + q - top)


def check_horn_gap(n_pairs, seed, bloch_norm=1.0, tol=1e-10):
    basis = build_basis(2)
    rng = substream(seed, _K_HORN)
    min_gap = np.inf
    worst = 0.0
    for _ in range(n_pairs):
        a1, a2 = rng.standard_normal((2, 3))
        h = horn_gap_check(observable_from_bloch(a1, basis), observable_from_bloch(a2, basis), bloch_norm)
        closed = horn_gap_closed_form(a1, a2, bloch_norm)
        worst = max(worst, abs(h.gap - closed), abs(h.joint_lower - h.c1 - h.c2 - closed))
        min_gap = min(min_gap, h.gap)
    rejected = True
    for k in (2.0, -0.5):
        a = rng.standard_normal(3)
        try:
            horn_gap_check(observable_from_bloch(a, basis), observable_from_bloch(k * a, basis), bloch_norm)
            rejected = False
        except DegeneratePairError:
            pass
    return {
        "name": "Horn gap",
        "passed": bool(min_gap > 0 and worst <= tol and rejected),
        "min_gap": float(min_gap),
        "closed_form_max_abs_error": worst,
        "tolerance": tol,
        "proportional_pairs_rejected": rejected,
        "n_pairs": n_pairs,
    }


# ---------------------------------------------------------------- entanglement


def _separable_chunk(job):
    seed, dim, index, count = job
    basis = build_basis(dim)
    rng = substream(seed, _K_SEPARABLE, dim, index)
    purity = "pure" if index % 2 else "arbitrary"
    canonical = [(g, g) for g in basis.generators]
    flagged = {"kyfan": 0, "local_sum_optimal": 0, "local_sum_canonical": 0}
    kf_margin = ls_margin = np.inf
    for rho in separable_states(rng, basis, count, max_terms=10, purity_class=purity):
        st = extract_bipartite(rho, basis)
        kf = criterion_kyfan(st)
        opt = criterion_local_sum(st, optimal_observables(st, basis), basis)
        can = criterion_local_sum(st, canonical, basis)
        flagged["kyfan"] += kf.verdict is Verdict.ENTANGLED
        flagged["local_sum_optimal"] += opt.verdict is Verdict.ENTANGLED
        flagged["local_sum_canonical"] += can.verdict is Verdict.ENTANGLED
        kf_margin = min(kf_margin, kf.threshold - kf.kyfan)
        ls_margin = min(ls_margin, opt.local_sum - opt.local_floor)
    return flagged, float(kf_margin), float(ls_margin)


def check_separable_soundness(dim, n_states, seed, workers=1):
    jobs = [(seed, dim, i, c) for i, c in _chunks(n_states)]
    parts = _map(_separable_chunk, jobs, workers)
    flagged = {k: sum(p[0][k] for p in parts) for k in parts[0][0]}
    return {
        "name": f"no separable state flagged N={dim}",
        "passed": all(v == 0 for v in flagged.values()),
        "false_entangled": flagged,
        "min_kyfan_margin": min(p[1] for p in parts),
        "min_local_sum_margin": min(p[2] for p in parts),
        "n_states": n_states,
    }


def bell_state(dim=2):
    """Projector on ``sum_i |ii> / sqrt(N)``."""
    psi = np.eye(dim).reshape(dim * dim) / np.sqrt(dim)
    return np.outer(psi, psi)


def werner_state(p):
    """Two-qubit ``p |singlet><singlet| + (1 - p) I/4``."""
    psi = np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2)
    return p * np.outer(psi, psi) + (1 - p) * np.eye(4) / 4


def werner_boundary(xtol=1e-12):
    """Bisection for the smallest Werner weight flagged by the Ky Fan criterion."""
    basis = build_basis(2)
    lo, hi = 0.0, 1.0
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if criterion_kyfan(extract_bipartite(werner_state(mid), basis)).verdict is Verdict.ENTANGLED:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def check_bell_werner(tol=1e-6):
    basis = build_basis(2)
    bell = criterion_kyfan(extract_bipartite(bell_state(2), basis))
    p_star = werner_boundary()
    kf_err = max(
        abs(criterion_kyfan(extract_bipartite(werner_state(p), basis)).kyfan - 3 * p)
        for p in np.linspace(0, 1, 11)
    )
    return {
        "name": "Bell state and Werner boundary",
        "passed": bool(
            bell.verdict is Verdict.ENTANGLED
            and abs(bell.kyfan - 3) <= 1e-12
            and abs(bell.threshold - 1) <= 1e-12
            and abs(p_star - 1 / 3) <= tol
            and kf_err <= 1e-12
        ),
        "bell_kyfan": bell.kyfan,
        "bell_threshold": bell.threshold,
        "bell_verdict": bell.verdict.value,
        "werner_boundary": p_star,
        "werner_boundary_error": abs(p_star - 1 / 3),
        "werner_kyfan_vs_3p_max_error": kf_err,
        "tolerance": tol,
    }


def zero_marginal_states(rng, dim, count, max_terms=4):
    """Mixtures of locally rotated maximally entangled states and white noise."""
    N = dim
    phi = np.eye(N).reshape(N * N) / np.sqrt(N)
    out = []
    for _ in range(count):
        k = int(rng.integers(1, max_terms + 1))
        w = rng.dirichlet(np.ones(k + 1))
        rho = w[-1] * np.eye(N * N) / N**2
        for j in range(k):
            X = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
            U = np.linalg.qr(X)[0]
            psi = np.kron(np.eye(N), U) @ phi
            rho = rho + w[j] * np.outer(psi, psi.conj())
        out.append(rho)
    return out


def check_zero_marginals(dim, n_states, seed):
    basis = build_basis(dim)
    rng = substream(seed, _K_ZERO, dim)
    target = 2.0 * (dim - 1) / dim
    exact = True
    worst_marginal = 0.0
    for rho in zero_marginal_states(rng, dim, n_states):
        st = extract_bipartite(rho, basis)
        rep = criterion_kyfan(st)
        exact &= rep.threshold == target
        worst_marginal = max(worst_marginal, rep.r_norm, rep.s_norm)
    return {
        "name": f"threshold at zero marginals N={dim}",
        "passed": bool(exact and worst_marginal <= 1e-12),
        "threshold_equals_2(N-1)/N": bool(exact),
        "max_marginal_norm": worst_marginal,
        "n_states": n_states,
    }


def check_optimal_observables(dim, n_states, seed, tol=1e-10, chain_tol=1e-9):
    basis = build_basis(dim)
    rng = substream(seed, _K_OPTIMAL, dim)
    n = basis.size
    duality = ortho = chain = 0.0
    for rho in ginibre_states(rng, dim * dim, n_states):
        st = extract_bipartite(rho, basis)
        U, V, sv = optimal_bloch_bases(st)
        duality = max(duality, abs(np.einsum("mi,mn,ni->", U, st.T, -V) + sv.sum()))
        pairs = optimal_observables(st, basis)
        for side in (0, 1):
            X = np.array([p[side] for p in pairs])
            gram = np.einsum("pij,qji->pq", X, X).real
            ortho = max(ortho, float(np.max(np.abs(gram - 2 * np.eye(n)))))
        Oa, Ob = random_rotation(rng, n), random_rotation(rng, n)
        pairs = list(zip(np.tensordot(Oa, basis.generators, 1), np.tensordot(Ob, basis.generators, 1)))
        direct = criterion_local_sum(st, pairs, basis).local_sum
        chain = max(chain, abs(direct - local_sum_formula(st, Oa, Ob)))
    return {
        "name": f"optimal local observables N={dim}",
        "passed": bool(duality <= tol and ortho <= tol and chain <= chain_tol),
        "svd_duality_max_abs_error": float(duality),
        "orthonormality_max_abs_error": float(ortho),
        "local_sum_formula_max_abs_error": float(chain),
        "tolerance": tol,
        "n_states": n_states,
    }


# ---------------------------------------------------------------- suites

SUITES = ("algebra", "bounds", "entanglement")


def run_suite(suite, samples, seed, dims, workers=1):
    """Run one suite (or ``"all"``) and return ``{"passed": bool, "checks": [...]}``."""
    names = SUITES if suite == "all" else (suite,)
    checks = []
    small = [d for d in dims if d in (2, 3)]
    for name in names:
        if name == "algebra":
            checks += [check_algebra(d, samples, seed) for d in dims]
        elif name == "bounds":
            checks += [check_variance_agreement(d, samples, seed, workers) for d in dims]
            checks += [check_orthogonal_identity(d, max(10, samples // 100), seed) for d in small]
            if 2 in dims:
                checks.append(check_qubit_sandwich(samples, seed))
                checks.append(check_qubit_reduction(max(100, samples // 10), seed))
                checks.append(check_horn_gap(samples, seed))
            if 3 in dims:
                checks.append(
                    check_theorem1_sandwich(3, max(10, samples // 10), max(100, samples // 10), seed, workers)
                )
        elif name == "entanglement":
            checks += [check_separable_soundness(d, samples, seed, workers) for d in small]
            checks.append(check_bell_werner())
            checks += [check_zero_marginals(d, max(10, samples // 100), seed) for d in small]
            checks += [check_optimal_observables(d, max(10, samples // 100), seed) for d in small]
        else:
            raise ValueError(f"unknown suite {name!r}")
    return {"passed": all(c["passed"] for c in checks), "checks": checks}
