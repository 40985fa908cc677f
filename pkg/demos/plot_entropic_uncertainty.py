"""
Entropic uncertainty on the line, the circle and SU(2)
=======================================================

The position and momentum entropies of a wave packet sum to at least
1 + ln pi, with equality for Gaussians. The same kind of bound holds on the
circle and on SU(2), where the momentum side is a list of Fourier
coefficients.
"""

import math

import numpy as np

from tomoforge import GridFunction, entropy_sum_rn, group_entropy_check, hy_check_rn, u1_check
from tomoforge.entropy import LINE_FUNCTIONS, random_band_limited_circle
from tomoforge.spin import basis_function, random_band_limited

for name, fn in LINE_FUNCTIONS.items():
    psi = GridFunction.on_line(fn, 24.0, 4096)
    e = entropy_sum_rn(psi)
    print(f"{name:>9}: S_x + S_p - (1 + ln pi) = {e.slack:.2e}, "
          f"Hausdorff-Young slack at p = 1.5: {hy_check_rn(psi, 1.5).slack:.2e}")

rng = np.random.default_rng(6)
r = u1_check(random_band_limited_circle(256, rng), 1.5)
print(f"circle: entropy slack {r.entropy_slack:.4f}, Hausdorff-Young slack {r.hy_slack:.4f}")

###############################################################################
# On SU(2) the entropy of the individual coefficients is not enough: a single
# matrix element of the spin-1/2 representation already beats it. Weighting
# by the representation dimensions restores the bound.

res = group_entropy_check(basis_function(0.5, 0, 0), 0.5)
print(f"d^1/2_00: entrywise slack {res.slack:.5f} (1/2 - ln 2 = {0.5 - math.log(2):.5f}), "
      f"weighted slack {res.weighted_slack:.5f}")
res = group_entropy_check(random_band_limited(2, rng), 2)
print(f"random, j <= 2: entrywise slack {res.slack:.3f}, weighted slack {res.weighted_slack:.3f}")
