"""Entanglement detection from local variance sums."""
import numpy as np

from blochbound import build_basis, criterion_kyfan, criterion_local_sum, extract_bipartite, optimal_observables
from blochbound.verify import bell_state, werner_state

qubit = build_basis(2)

# Bell state: T = diag(1, -1, 1), Ky Fan norm 3 against threshold 1
bell = extract_bipartite(bell_state(2), qubit)
print(bell.T)
rep = criterion_kyfan(bell)
print(rep.verdict.value, rep.kyfan, rep.threshold)

# the optimal local observables push the variance sum below 4(N-1)
pairs = optimal_observables(bell, qubit)
print("local sum:", criterion_local_sum(bell, pairs, qubit).local_sum, "floor:", 4.0)

# Werner family: detected for p > 1/3
for p in (0.2, 0.3, 1 / 3, 0.34, 0.5, 1.0):
    r = criterion_kyfan(extract_bipartite(werner_state(p), qubit))
    print(f"p = {p:.3f}  ||T|| = {r.kyfan:.4f}  {r.verdict.value}")

# a product state is never flagged
rng = np.random.default_rng(0)
psi = rng.standard_normal(3) + 1j * rng.standard_normal(3)
psi /= np.linalg.norm(psi)
local = np.outer(psi, psi.conj())
qutrit = build_basis(3)
prod = extract_bipartite(np.kron(local, np.eye(3) / 3), qutrit)
print(criterion_kyfan(prod).verdict.value, criterion_kyfan(prod).kyfan, criterion_kyfan(prod).threshold)
