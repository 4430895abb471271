"""
How the probe spin changes things
=================================

The average squared fidelity after one measurement oscillates in j while it
decays; after the reversing measurement it decays without oscillation.  The
exact-recovery probability q falls off roughly exponentially.
"""

import math

from revspin import HalfInt, MeasurementParams, SpinState
from revspin import reverse

base = MeasurementParams(HalfInt(1), math.pi / 6, math.pi / 6, 0.25)
state = SpinState.equal(HalfInt(1))
print("oscillation period in j:", round(reverse.oscillation_period(base), 3))

print("   j   <F^2>_1   <F^2>_2        q   q (large j)")
for j in (1, 2, 5, 10, 20, 50, 100):
    p = base.replace(j=HalfInt(2 * j))
    print(
        f"{j:4d}  {reverse.avg_sq_fidelity_first(state, p):8.4f}  {reverse.avg_sq_fidelity_joint(state, p):8.4f}"
        f"  {reverse.recovery_probability(p):8.5f}  {reverse.asymptotic_recovery(p):8.5f}"
    )
