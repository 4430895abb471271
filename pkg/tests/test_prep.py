import math

import numpy as np
import pytest

from revspin import prep
from revspin.measure import MeasurementParams, measure
from revspin.reverse import joint_measure
from revspin.spincore import HalfInt, SpinState, rotate_state


def test_coherent_x():
    st = prep.coherent_x_state(HalfInt(1))
    assert np.allclose(st.amplitudes, [1 / math.sqrt(2)] * 2)
    st = prep.coherent_x_state(HalfInt(20))
    assert prep.spin_variance(st) == pytest.approx((0.0, 5.0), abs=1e-12)


def test_coherent_x_is_a_rotated_top_state():
    s = HalfInt(7)
    ref = rotate_state(SpinState.basis(s, s), math.pi / 2, 0.0)
    assert abs(ref.overlap(prep.coherent_x_state(s))) == pytest.approx(1.0, abs=1e-12)


def test_cat_states():
    s = HalfInt(20)
    xcat = prep.cat_state("x", s, 1, 1)
    zcat = prep.cat_state("z", s, 1, 1)
    assert prep.spin_variance(xcat)[1] == pytest.approx(5.0, abs=1e-10)
    assert prep.spin_variance(zcat)[1] == pytest.approx(100.0, abs=1e-12)
    degenerate = prep.cat_state("x", s, 1, 0)
    assert abs(degenerate.overlap(prep.coherent_x_state(s))) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        prep.cat_state("y", s, 1, 1)
    with pytest.raises(ValueError):
        prep.cat_state("z", s, 0, 0)


def test_equatorial_coherent_state():
    phi = 0.7
    st = prep.prepare_coherent_equatorial(HalfInt(1), phi)
    expect = np.array([np.exp(-0.5j * phi), np.exp(0.5j * phi)]) / math.sqrt(2)
    assert np.allclose(st.amplitudes, expect, atol=1e-15)
    s = HalfInt(9)
    ref = rotate_state(SpinState.basis(s, s), math.pi / 2, phi)
    assert abs(ref.overlap(prep.prepare_coherent_equatorial(s, phi))) == pytest.approx(1.0, abs=1e-12)


def test_subspace_preparation_frozen():
    res = prep.subspace_prepare(HalfInt(20), HalfInt(20), 0.25, 0.0, HalfInt(10))
    assert res.peaks == (HalfInt(8), HalfInt(-8))
    assert res.probability == pytest.approx(0.015706770, abs=1e-8)
    assert res.sigma_estimate == pytest.approx(4.18879, abs=1e-5)
    assert res.distribution.sum() == pytest.approx(1.0, abs=1e-12)
    closed = prep.rho_closed_form(HalfInt(20), HalfInt(20), 0.25, HalfInt(10))
    assert np.max(np.abs(res.distribution - closed)) < 1e-12
    assert 0 < res.leaked < 0.2


def test_two_component_form_phase():
    res = prep.subspace_prepare(HalfInt(20), HalfInt(20), 0.25, 0.3, HalfInt(10))
    approx = prep.two_component_approximation(res, HalfInt(20), 0.3)
    assert abs(approx.overlap(res.state)) ** 2 == pytest.approx(1 - res.leaked, abs=1e-12)


def test_subspace_reduction_is_exact():
    s = HalfInt(20)
    sigma = HalfInt(16)
    amps = np.zeros(s.dim, dtype=complex)
    amps[2] = 0.6
    amps[-3] = 0.8j
    st = SpinState(s, amps)
    p = MeasurementParams(HalfInt(14), 1.0, 0.4, 0.05)
    half = prep.reduce_to_half(st, sigma)
    hp = prep.reduced_params(p, sigma)
    assert hp.g == pytest.approx(0.8)
    a, b = measure(st, p), measure(half, hp)
    assert np.max(np.abs(a.p - b.p)) < 1e-10
    assert np.max(np.abs(a.fidelity - b.fidelity)) < 1e-10
    ja, jb = joint_measure(st, p), joint_measure(half, hp)
    assert np.max(np.abs(ja.p - jb.p)) < 1e-10
    assert np.max(np.abs(ja.fidelity - jb.fidelity)) < 1e-10


def test_renormalized_g_rejects_zero():
    with pytest.raises(ValueError):
        prep.renormalized_g(0.1, HalfInt(0))
