"""Random states and the reproducible sampling streams."""
import numpy as np

from blochbound import build_basis
from blochbound.oracle import SamplerConfig, bloch_from_states, sample_separable, sample_states

qutrit = build_basis(3)

# three purity classes; the pure norm for N = 3 is sqrt(4/3)
for purity in ("pure", "arbitrary", 0.7):
    rhos = sample_states(SamplerConfig(seed=3, n_samples=2000, dim=3, purity_class=purity), qutrit)
    norms = np.linalg.norm(bloch_from_states(rhos, qutrit), axis=1)
    print(f"{purity!s:>9}: |r| in [{norms.min():.4f}, {norms.max():.4f}], "
          f"min eigenvalue {np.linalg.eigvalsh(rhos)[:, 0].min():.2e}")

# same seed, same states
cfg = SamplerConfig(seed=42, n_samples=5, dim=2)
print(np.array_equal(sample_states(cfg), sample_states(cfg)))

# separable mixtures: T is a sum of p r s^T with at most n_terms terms
st = sample_separable(SamplerConfig(seed=1, dim=3), n_terms=2, basis=qutrit)
print("singular values of T:", np.linalg.svd(st.T, compute_uv=False).round(6))
