"""
Learning a system by looking only at an apparatus
=================================================

A qubit interacts for a while with a second qubit that plays the role of the
apparatus. Only apparatus expectations are recorded; they are linear in the
system's state. One generic coupling already gives three equations for the
three unknowns, and more couplings improve the conditioning. A coupling
that touches a single system observable only reveals that observable.
"""

import numpy as np

from tomoforge import (CoupledConfig, build_design, observe, random_configs, random_density,
                       recover_system, trace_norm)

rng = np.random.default_rng(4)
rho_s, rho_m = random_density(2, rng), random_density(2, rng)

for count in (1, 2, 4):
    cfgs = random_configs(2, 2, count, seed=40)
    design = build_design(cfgs, rho_m)
    rec = recover_system(design, observe(cfgs, rho_s, rho_m), full=False)
    if rec.rho_S is None:
        print(f"{count} coupling(s): rank {rec.rank} of 3, only part of the state is determined")
    else:
        print(f"{count} coupling{'s' if count > 1 else ''}: rank {rec.rank}, condition {rec.condition:.1f}, "
              f"error {trace_norm(rec.rho_S - rho_s):.1e}")

couplings = np.zeros((4, 4))
couplings[1, 2] = 0.9  # system sigma_z times apparatus sigma_x
weak = CoupledConfig(2, 2, np.diag([0.0, 1.0]), np.diag([0.0, 1.0]), couplings)
rec = recover_system(build_design([weak], rho_m), observe([weak], rho_s, rho_m), full=False)
print(f"sigma_z coupling only: rank {rec.rank}, determined direction {np.round(rec.determined[0], 6)}")
