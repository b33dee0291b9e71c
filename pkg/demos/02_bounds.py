"""State-independent bounds on a sum of variances."""
import numpy as np

from blochbound import build_basis, build_set, qubit_bounds, theorem1_bounds
from blochbound.oracle import SamplerConfig, extremize_sum, fixed_norm_states, substream, variance_sum_direct

qubit = build_basis(2)
X, Y, Z = qubit.generators

# all three Pauli matrices on pure states: the sum is always 2
paulis = build_set([X, Y, Z], qubit)
print(qubit_bounds(paulis, 1.0).lower, qubit_bounds(paulis, 1.0).upper)

# two of them: 1 <= sum <= 2 on pure states
xy = build_set([X, Y], qubit)
b = qubit_bounds(xy, 1.0)
print("sigma_x, sigma_y:", b.lower, b.upper, "eigenvalues of A:", b.eigenvalues_of_A)

# the bounds narrow as the state gets more mixed
for R in np.linspace(0, 1, 6):
    b = qubit_bounds(xy, R)
    print(f"|r| = {R:.1f}: {b.lower:.3f} <= sum <= {b.upper:.3f}")

# a qutrit pair: the general bounds against sampled states
qutrit = build_basis(3)
rng = substream(1)
A1 = np.diag([1.0, 0.0, -1.0])
A2 = qutrit.generators[0] + 0.5 * qutrit.generators[3]
s = build_set([A1, A2], qutrit)
R = 0.8
rep = theorem1_bounds(s, R)
vals = variance_sum_direct(s.matrices, fixed_norm_states(rng, qutrit, R, 5000))
print(f"bounds   [{rep.lower:.4f}, {rep.upper:.4f}]")
print(f"sampled  [{vals.min():.4f}, {vals.max():.4f}]")

# local refinement gets closer to the true extrema
ex = extremize_sum(s, R, SamplerConfig(seed=1, n_samples=500, dim=3))
print(f"refined  [{ex.empirical_min:.4f}, {ex.empirical_max:.4f}]  converged: {ex.refinement_converged}")
print("report:", {k: v for k, v in rep.to_dict().items() if k in ("C0", "C1", "C2", "method")})
