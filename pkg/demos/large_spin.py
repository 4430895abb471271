"""
Larger measured spins and cat states
====================================

For s > 1/2 exact recovery is gone, but in the weak-coupling regime the
fidelity stays high near m + m' = 0.  How near depends on the S_z variance:
an x-cat behaves like a coherent state, a z-cat does not.
"""

import math

from revspin import HalfInt, MeasurementParams, cat_state, coherent_x_state, joint_measure, measure
from revspin import reverse
from revspin.prep import spin_variance

s = HalfInt(20)
params = MeasurementParams(HalfInt(100), math.pi / 12, math.pi / 4, 0.01)
print("weak-coupling ratio (small is good):", round(reverse.weak_condition_margin(params, s), 4))
print("delta m~ =", round(reverse.weak_width(params, s), 3))

for name, state in (
    ("coherent-x", coherent_x_state(s)),
    ("x-cat", cat_state("x", s, 0.6, 0.8j)),
    ("z-cat", cat_state("z", s, 1, 1)),
):
    first = measure(state, params).average_fidelity()
    joint = joint_measure(state, params)
    qp = reverse.approx_recovery_probability(state, params, joint=joint)
    print(f"{name:11s} Var={spin_variance(state)[1]:6.2f}  F1={first:.4f}  F2={joint.average_fidelity():.4f}  q'={qp:.5f}")
