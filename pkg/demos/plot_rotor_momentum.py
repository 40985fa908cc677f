"""
Reading a rotor's momentum from an oscillator
==============================================

A rotor switched on to an oscillator for a finite time leaves an imprint on
the oscillator's position that is proportional to the rotor's mean momentum.
After the switch-off the imprint is a fixed combination of the two free
solutions, so a least-squares fit reads the momentum back.
"""

import numpy as np

from tomoforge import CouplingProfile, b_expectation, recover_momentum, solve_modes

profile = CouplingProfile("bump", lambda0=0.8, T=5.0)
modes = solve_modes(profile, 20.0, h=1e-3)
print(f"Wronskian drift over t in [0, 20]: {modes.wronskian_drift:.1e}")
print(f"imprint coefficients: l1 = {modes.lambda1:.6f}, l2 = {modes.lambda2:.6f}")

for n in (-2, 0, 3):
    fit = recover_momentum(b_expectation(profile, n, 20.0))
    print(f"level {n:+d}: fitted momentum {fit.momentum:+.9f}")

###############################################################################
# A superposition of levels gives the average.

p = np.array([0.2, 0.5, 0.3])
fit = recover_momentum(b_expectation(profile, p, 20.0))
print(f"mixture: fitted {fit.momentum:.9f}, expected {p @ np.arange(3):.9f}")
