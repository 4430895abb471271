"""
Undoing a spin-1/2 measurement
==============================

A spin-10 probe reads out a spin-1/2 system.  The second measurement, with
the probe turned to (pi - theta, pi - phi), restores the input exactly
whenever its outcome is the negative of the first one.
"""

import math

import numpy as np

from revspin import MeasurementParams, HalfInt, SpinState, joint_measure, measure
from revspin import reverse

params = MeasurementParams(HalfInt(20), math.pi / 6, math.pi / 6, 0.25)
state = SpinState.equal(HalfInt(1))

# the first measurement alone disturbs the state
first = measure(state, params)
print("average fidelity after the first measurement:", round(first.average_fidelity(), 4))

# adding the reversing measurement
joint = joint_measure(state, params)
print("average fidelity after both:", round(joint.average_fidelity(), 4))

# every pair (m, -m) gives fidelity 1; their total probability is q
print("F on the m' = -m line:", np.round(joint.fidelity[:, ::-1].diagonal(), 12))
print("q  =", round(reverse.recovery_probability(params), 4))
print("q' =", round(reverse.approx_recovery_probability(state, params), 4))
print("delta m =", round(reverse.recovery_width(params), 4))

# near-recovery: F_{mm'} only depends on m + m'
for total in range(0, 5):
    print(f"m + m' = {total}: F = {reverse.spin_fidelity_closed_form(state, params, total):.4f}")
