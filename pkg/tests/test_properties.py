import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from revspin import reverse as R
from revspin.cli import format_angle, format_float, parse_angle
from revspin.measure import MeasurementParams, coefficients, measure, reversibility_condition
from revspin.spincore import HalfInt, SpinState, half_int_parse, rotate_state, wigner_matrix

HALF = HalfInt(1)

twice_j = st.integers(min_value=1, max_value=16)
twice_s = st.integers(min_value=1, max_value=6)
angles = st.floats(min_value=0.05, max_value=math.pi - 0.05)
phis = st.floats(min_value=-math.pi, max_value=math.pi)
couplings = st.floats(min_value=0.01, max_value=1.5)
components = st.floats(min_value=-1, max_value=1)


@st.composite
def states(draw, s_twice=twice_s):
    s = HalfInt(draw(s_twice))
    re = draw(st.lists(components, min_size=s.dim, max_size=s.dim))
    im = draw(st.lists(components, min_size=s.dim, max_size=s.dim))
    amps = np.array(re) + 1j * np.array(im)
    assume(np.linalg.norm(amps) > 1e-3)
    return SpinState.from_amplitudes(s, amps)


@st.composite
def params(draw):
    return MeasurementParams(HalfInt(draw(twice_j)), draw(angles), draw(phis), draw(couplings))


@given(st.integers(-200, 200))
def test_half_int_round_trip(t):
    assert half_int_parse(str(HalfInt(t))).twice == t


@given(st.integers(0, 30), st.floats(0, math.pi))
def test_small_d_orthogonal(t, theta):
    d = wigner_matrix(HalfInt(t), theta)
    assert np.max(np.abs(d @ d.T - np.eye(t + 1))) < 1e-11


@given(states(), angles, phis)
def test_rotation_preserves_norm(state, theta, phi):
    out = rotate_state(state, theta, phi)
    assert abs(np.linalg.norm(out.amplitudes) - 1) < 1e-12


@given(params(), twice_s)
def test_completeness(p, ts):
    a = coefficients(p, HalfInt(ts)).table
    assert np.max(np.abs(np.sum(np.abs(a) ** 2, axis=0) - 1)) < 1e-12


@settings(max_examples=50)
@given(states(), params())
def test_probabilities_sum_to_one(state, p):
    assert abs(measure(state, p).p.sum() - 1) < 1e-12
    jt = R.joint_measure(state, p)
    assert abs(jt.p.sum() - 1) < 1e-12
    assert np.max(np.abs(jt.marginal_first() - measure(state, p).p)) < 1e-12


@settings(max_examples=50)
@given(states(st.just(1)), params())
def test_spin_half_exact_recovery(state, p):
    assume(reversibility_condition(p, HALF))
    jt = R.joint_measure(state, p)
    line = jt.fidelity[:, ::-1].diagonal()
    live = jt.recovery_line() > 1e-300
    assert np.all(np.abs(line[live] - 1) < 1e-12)
    for m, ph in R.recovery_phases(p).items():
        assert abs(abs(ph) - 1) < 1e-12


@settings(max_examples=50)
@given(params(), twice_s)
def test_symmetry_identities(p, ts):
    assert R.symmetry_check(p, HalfInt(ts)) < 1e-12


@given(
    st.booleans(),
    st.one_of(
        st.floats(0, 1e6, allow_nan=False).map(lambda x: repr(x)),
        st.tuples(st.integers(0, 99), st.integers(1, 64)).map(lambda t: f"{t[0]}pi/{t[1]}"),
        st.integers(1, 64).map(lambda d: f"pi/{d}"),
    ),
)
def test_angle_round_trip(neg, body):
    text = ("-" if neg else "") + body
    x = parse_angle(text)
    assert parse_angle(format_angle(x)) == x


@given(st.floats(allow_nan=False, allow_infinity=False, min_value=-1e300, max_value=1e300))
def test_csv_float_format(x):
    text = format_float(x)
    assert "," not in text
    if x == 0:
        assert text == "0"
        return
    back = float(text)
    assert abs(back - x) <= 1e-11 * abs(x)
    uses_exp = "e" in text
    assert uses_exp == (abs(x) < 1e-4 or abs(x) >= 1e6)
