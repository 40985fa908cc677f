"""
Reconstructing a state from rotated diagonal measurements
==========================================================

A measurement in a fixed basis only sees the diagonal of a density matrix.
Rotating the basis before measuring reveals the rest. Three routes are
compared on the same random qutrit.
"""

import numpy as np

from tomoforge import (StateOracle, build_basis, finite_reconstruct, mc_reconstruct,
                       projector_protocol, random_density, trace_norm)

rng = np.random.default_rng(1)
N = 3
rho = random_density(N, rng)
basis = build_basis(N)

###############################################################################
# One frame per off-diagonal generator, plus the identity frame, is enough.

oracle = StateOracle(rho)
exact = finite_reconstruct(oracle, basis)
print(f"finite protocol: {exact.queries} frames, error {trace_norm(exact.matrix - rho):.1e}")

###############################################################################
# Asking only for single-outcome probabilities needs N^2 numbers.

oracle = StateOracle(rho)
scalar = projector_protocol(oracle.projector, N)
print(f"projector protocol: {scalar.queries} numbers, error {trace_norm(scalar.matrix - rho):.1e}")

###############################################################################
# Averaging over Haar-random frames also determines the state; the error
# falls like one over the square root of the number of frames.

for samples in (1000, 10000, 100000):
    est = mc_reconstruct(StateOracle(rho), N, samples, seed=2, project=True)
    print(f"Monte-Carlo, {samples:>6} frames: error {trace_norm(est.matrix - rho):.2e}, "
          f"physical after projection: {trace_norm(est.projected - rho):.2e}")
