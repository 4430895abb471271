"""
Checking the closed forms by brute force
========================================

The oracle builds the full probe x system state, rotates the probe with a
matrix exponential of J_y, applies exp(-2ig J_z S_z) and reads the result.
"""

import numpy as np

from revspin import HalfInt, MeasurementParams, SpinState, coefficients, oracle

rng = np.random.default_rng(0)
s = HalfInt(3)
state = SpinState.from_amplitudes(s, rng.normal(size=4) + 1j * rng.normal(size=4))

for tj in (1, 4, 8):
    p = MeasurementParams(HalfInt(tj), 1.2, -0.4, 0.7)
    closed = coefficients(p, s).table * state.amplitudes[None, :]
    brute = oracle.evolve((p.theta, p.phi), state, p.j, p.g).amplitudes
    print(f"j={p.j}: max deviation {np.max(np.abs(closed - brute)):.1e}")
