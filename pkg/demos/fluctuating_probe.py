"""
A probe without a definite spin
===============================

If the probe is in a superposition of j = 1/2 and j = 3/2, the reversing
measurement (pi - theta, pi - phi) on outcome -m still undoes outcome m.
The naive choice (pi - theta, -phi) on the same outcome does not, because
the sign (-1)^(j + m) differs between components.
"""

import math

from revspin import HalfInt, ProbeSuperposition, fluct_reversal_check

probe = ProbeSuperposition({HalfInt(1): 2**-0.5, HalfInt(3): 2**-0.5})
for m, r in fluct_reversal_check(probe, math.pi / 5, math.pi / 7, 0.3).items():
    print(f"m={str(m):>4}  good ratio {r.good:.6f}  naive ratio {r.bad:.6f}")
