"""SU(N) generators, structure constants and Bloch vectors."""
import numpy as np

from blochbound import build_basis, decode_state, encode_observable, encode_state, star_product

# qubit basis is (sigma_x, sigma_y, sigma_z)
qubit = build_basis(2)
print(qubit.labels)
print(qubit.generators)

# qutrit: 8 generators, d_{1,1,8} = 1/sqrt(3) in the usual numbering
qutrit = build_basis(3)
print(qutrit.size, qutrit.labels[0], qutrit.labels[7])
print("d[0,0,7] =", qutrit.d_dense()[0, 0, 7], "1/sqrt(3) =", 1 / np.sqrt(3))

# orthonormality Tr[l_m l_n] = 2 delta
gram = np.einsum("mij,nji->mn", qutrit.generators, qutrit.generators).real
print("max |gram - 2I| =", np.abs(gram - 2 * np.eye(8)).max())

# a state and its Bloch vector
rho = np.diag([0.5, 0.3, 0.2])
r = encode_state(rho, qutrit)
print("r =", r.round(6), "|r| =", np.linalg.norm(r))
back = decode_state(r, qutrit)
print("round trip error:", np.abs(back.matrix - rho).max(), "valid:", back.is_valid)

# not every ball point is a state: (0, 0, 2) for a qubit
bad = decode_state(np.array([0.0, 0.0, 2.0]), qubit)
print(bad.matrix.real, "valid:", bad.is_valid, "min eigenvalue:", bad.min_eigenvalue)

# an observable; the identity part drops out of its Bloch vector
A = encode_observable(np.diag([1.0, 2.0, 5.0]), qutrit)
print("a =", A.bloch.round(6))
print("a * a =", star_product(A.bloch, A.bloch, qutrit).round(6))
