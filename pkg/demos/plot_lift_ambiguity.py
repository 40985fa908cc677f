"""
How much does the diagonal leave undecided?
============================================

Many density matrices share a diagonal. The largest trace distance between
two of them measures what a single-basis measurement cannot tell apart.
"""

import numpy as np

from tomoforge import delta_rho, sample_lift, trace_norm

###############################################################################
# For a qubit the answer is 2 sqrt(l1 l2): largest for equal weights, zero
# for a pure diagonal.

for lam in (0.0, 0.1, 0.25, 0.5):
    res = delta_rho([lam, 1 - lam])
    print(f"l1 = {lam:.2f}: delta = {res.delta:.6f}, formula {2 * np.sqrt(lam * (1 - lam)):.6f}")

###############################################################################
# With three levels the optimiser finds the diameter of the lift set;
# random lifts stay inside it.

w = [0.5, 0.3, 0.2]
res = delta_rho(w)
lifts = [sample_lift(w, seed=s).matrix for s in range(30)]
spread = max(0.5 * trace_norm(a - b) for a in lifts for b in lifts)
print(f"three levels: delta = {res.delta:.6f} after {res.evaluations} evaluations; "
      f"30 random lifts span {spread:.3f}")
