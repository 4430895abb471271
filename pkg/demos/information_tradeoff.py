"""
Information versus fidelity
===========================

Two orthogonal hypotheses, gamma = pi/6.  After outcome m we can either stop
or run the reversing measurement.  The reversal gives back fidelity on the
pairs (m, -m) but also erases all information gained there.
"""

import math

import numpy as np

from revspin import HalfInt, MeasurementParams, analyze_joint, make_hypothesis_pair

params = MeasurementParams(HalfInt(20), math.pi / 6, math.pi / 6, 0.25)
rec = analyze_joint(make_hypothesis_pair(math.pi / 6), params)

print("   m      p(m)   I(m)   F(m)   I'(m)  F'(m)")
for i, m in enumerate(rec.outcomes):
    print(
        f"{str(m):>4}  {rec.p[i]:.2e}  {rec.info[i]:.3f}  {rec.fidelity[i]:.3f}"
        f"  {rec.info_expected[i]:.3f}  {rec.fidelity_expected[i]:.3f}"
    )

# on the recovery line nothing is learned
print("max I(m, -m):", np.max(np.abs(rec.joint_info[:, ::-1].diagonal())))
gain = (rec.info_expected > rec.info) & (rec.fidelity_expected > rec.fidelity)
print("outcomes where reversing raises both I and F:", [str(m) for m, g in zip(rec.outcomes, gain) if g])
