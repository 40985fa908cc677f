"""
Unitaries acting on diagonal weights
====================================

Rotating a diagonal state and reading the new diagonal applies the doubly
stochastic matrix |u_sr|^2 to the weights. Such maps never lower the
Shannon entropy, and each is a mixture of permutations.
"""

import numpy as np

from tomoforge import birkhoff_decompose, from_unitary, haar_sample, reassemble, shannon

rng = np.random.default_rng(3)
N = 4
u = haar_sample(N, rng)
t = from_unitary(u)
lam = rng.dirichlet(np.ones(N))

###############################################################################
# The rotated diagonal is exactly the mapped weights.

rotated = np.real(np.diag(u.conj().T @ np.diag(lam) @ u))
print("mapped weights:", np.round(t.apply(lam), 6))
print("rotated state: ", np.round(rotated, 6))
print(f"entropy {shannon(lam):.4f} -> {shannon(t.apply(lam)):.4f}")

###############################################################################
# A few permutations, suitably weighted, rebuild the matrix.

terms = birkhoff_decompose(t)
for w, perm in terms:
    print(f"  {w:.4f} x {perm}")
print(f"{len(terms)} terms (at most {N * N - 2 * N + 2}), "
      f"residual {np.abs(reassemble(terms, N) - t.entries).max():.1e}")
