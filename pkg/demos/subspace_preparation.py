"""
Preparing an effective spin 1/2
===============================

Measuring an equatorial coherent spin-10 state with the probe along x leaves
a distribution with two peaks at +-sigma~.  Inside that pair everything runs
like a spin 1/2 with coupling 2 g sigma~.
"""

import numpy as np

from revspin import HalfInt, subspace_prepare
from revspin.prep import renormalized_g, two_component_approximation

s = j = HalfInt(20)
g, varphi, m = 0.25, 0.0, HalfInt(10)
res = subspace_prepare(s, j, g, varphi, m)

print("p'_m =", round(res.probability, 5))
print("peaks:", [str(p) for p in res.peaks], " arctan estimate:", round(res.sigma_estimate, 3))
print("probability outside the peak pair:", round(res.leaked, 4))
for sigma, r in zip(s.projections(), res.distribution):
    print(f"{str(sigma):>4} {'#' * int(round(200 * r))}")

approx = two_component_approximation(res, j, varphi)
print("overlap with the two-component form:", round(abs(approx.overlap(res.state)) ** 2, 4))
print("effective spin-1/2 coupling g' =", renormalized_g(g, res.peaks[0]))
print("weights on +-sigma~:", np.round(res.distribution[[6, 14]], 4))
