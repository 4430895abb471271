import math

import numpy as np
import pytest

from revspin import reverse as R
from revspin.measure import MeasurementParams, coefficients, measure
from revspin.prep import coherent_x_state
from revspin.spincore import HalfInt, SpinState

HALF = HalfInt(1)
FIG1 = MeasurementParams(HalfInt(20), math.pi / 6, math.pi / 6, 0.25)
WEAK = MeasurementParams(HalfInt(100), math.pi / 12, math.pi / 4, 0.01)


def random_state(rng, s: HalfInt) -> SpinState:
    return SpinState.from_amplitudes(s, rng.normal(size=s.dim) + 1j * rng.normal(size=s.dim))


def test_reversing_params():
    rp = R.reversing_params(FIG1)
    assert rp.theta == pytest.approx(5 * math.pi / 6)
    assert rp.phi == pytest.approx(5 * math.pi / 6)


@pytest.mark.parametrize("twice_s", [1, 2, 5])
def test_symmetry_identities(twice_s):
    assert R.symmetry_check(FIG1, HalfInt(twice_s)) < 1e-12
    p = MeasurementParams(HalfInt(7), 2.2, -2.9, 0.8)
    assert R.symmetry_check(p, HalfInt(twice_s)) < 1e-12


def test_symmetry_survives_phi_near_minus_pi():
    # pi - phi leaves (-pi, pi] here; the second table must not fold it
    p = MeasurementParams(HalfInt(5), 1.0, -3.0, 0.4)
    st = SpinState.from_amplitudes(HALF, [0.3, 0.9j])
    jt = R.joint_measure(st, p)
    assert np.allclose(jt.fidelity[:, ::-1].diagonal(), 1.0, atol=1e-12)


def test_joint_marginal_equals_first_measurement():
    st = random_state(np.random.default_rng(1), HalfInt(3))
    jt = R.joint_measure(st, FIG1)
    assert jt.p.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(jt.marginal_first() - measure(st, FIG1).p)) < 1e-12


def test_joint_frozen_entry():
    jt = R.joint_measure(SpinState.equal(HALF), FIG1)
    p, f = jt[(HalfInt(2), HalfInt(0))]
    assert p == pytest.approx(0.00021159517655164686, abs=1e-15)
    assert f == pytest.approx(0.9907142323489005, abs=1e-12)


def test_fidelity_depends_only_on_outcome_sum():
    st = SpinState.from_amplitudes(HALF, [0.8, 0.6 * np.exp(0.4j)])
    jt = R.joint_measure(st, FIG1)
    sums = jt.outcome_sums()
    for total in np.unique(sums):
        vals = jt.fidelity[sums == total]
        assert np.ptp(vals) < 1e-12
        assert vals[0] == pytest.approx(R.spin_fidelity_closed_form(st, FIG1, total), abs=1e-10)


def test_final_state_restores_input():
    st = SpinState.from_amplitudes(HALF, [0.2 - 0.5j, 0.7])
    phases = R.recovery_phases(FIG1)
    for m in FIG1.j.projections():
        out, phase = R.final_state(st, FIG1, m, -m)
        assert abs(st.overlap(out)) == pytest.approx(1.0, abs=1e-12)
        assert abs(phase) == pytest.approx(1.0, abs=1e-12)
        assert abs(phases[m]) == pytest.approx(1.0, abs=1e-12)


def test_product_ratio():
    p = MeasurementParams(HalfInt(6), 0.9, 0.4, 0.3)
    for m in p.j.projections():
        assert np.allclose(R.product_ratio(p, HALF, m), 1.0, atol=1e-12)
        # beyond spin 1/2 the product is only symmetric under sigma -> -sigma
        r = R.product_ratio(p, HalfInt(4), m)
        assert np.allclose(r, r[::-1], atol=1e-12)
        assert abs(r[1] - 1) > 1e-3


def test_recovery_probability_frozen_and_state_independent():
    assert R.recovery_probability(FIG1) == pytest.approx(0.12630764530878288, abs=1e-14)
    rng = np.random.default_rng(7)
    for _ in range(5):
        jt = R.joint_measure(random_state(rng, HALF), FIG1)
        assert jt.recovery_line().sum() == pytest.approx(R.recovery_probability(FIG1), abs=1e-12)
    with pytest.raises(ValueError):
        R.recovery_probability(FIG1, SpinState.equal(HalfInt(2)))


def test_recovery_width_and_phase():
    assert R.recovery_width(FIG1) == pytest.approx(2.309931432185996, abs=1e-12)
    assert R.fidelity_phase(FIG1) == pytest.approx(0.22868480801326097, abs=1e-14)
    e_plus, e_minus = R._e_pm(FIG1)
    assert (e_plus, e_minus) == pytest.approx((0.4730790431930417, 0.350072089233728), abs=1e-14)


def test_width_marks_the_095_contour():
    st = SpinState.equal(HALF)
    dm = R.recovery_width(FIG1)
    assert R.quadratic_fidelity_bound(st, FIG1, HalfInt(2 * 0), HalfInt(0)) == 1.0
    assert 1 - R._quadratic_coefficient(st, FIG1) * dm**2 == pytest.approx(0.95, abs=1e-14)


def test_singular_e_ratios():
    p = MeasurementParams(HalfInt(4), math.pi / 2, -0.25, 0.25)
    with pytest.raises(ZeroDivisionError):
        R.recovery_width(p)


def test_weak_width_scaling():
    s = HalfInt(20)
    base = R.weak_width(WEAK, s)
    assert base == pytest.approx(6.00587279883, abs=1e-9)
    assert R.weak_width(WEAK.replace(g=0.005), s) == pytest.approx(2 * base)
    assert R.weak_width(WEAK, HalfInt(40)) == pytest.approx(base / 2)
    with pytest.raises(ZeroDivisionError):
        R.weak_width(WEAK.replace(theta=0.0), s)


def test_weak_condition_examples():
    assert R.weak_condition_margin(WEAK, HalfInt(20)) == pytest.approx(0.0502, abs=1e-4)
    assert R.weak_condition_holds(WEAK, HalfInt(20))
    assert not R.weak_condition_holds(MeasurementParams(HalfInt(100), math.pi / 4, 0.0, 0.5), HalfInt(20))


def test_weak_condition_extreme_regime():
    # s = j = 1e8 and g = 1e-8 are out of reach of the lattice; evaluate the ratio directly
    s, j, g = 1e8, 1e8, 1e-8
    for theta, ok in ((1e-9, True), (1e-10, True), (1e-8, False)):
        st = math.sin(theta)
        rhs = ((1 - abs(st)) / (math.sqrt(2) * st)) ** 2 / (s**4 * j**2)
        assert (g**4 / rhs <= R.WEAK_FACTOR) is ok


def test_quadratic_error_in_weak_regime():
    st = coherent_x_state(HalfInt(20))
    jt = R.joint_measure(st, WEAK)
    approx = R.quadratic_fidelity_table(st, WEAK)
    near = (np.abs(jt.outcome_sums()) <= 6) & (jt.p > 1e-12)
    assert np.max(np.abs(jt.fidelity - approx)[near]) < 1e-3


def test_average_squared_fidelity_closed_forms():
    st = SpinState.from_amplitudes(HALF, [0.9, 0.3 + 0.3j])
    for twice in range(1, 51):
        p = FIG1.replace(j=HalfInt(twice))
        assert R.avg_sq_fidelity_first(st, p) == pytest.approx(measure(st, p).average_squared_fidelity(), abs=1e-10)
        assert R.avg_sq_fidelity_joint(st, p) == pytest.approx(R.joint_measure(st, p).average_squared_fidelity(), abs=1e-10)


def test_asymptotic_recovery_improves_with_j():
    errs = []
    for j in (20, 100):
        p = FIG1.replace(j=HalfInt(2 * j))
        exact = R.recovery_probability(p)
        errs.append(abs(R.asymptotic_recovery(p) - exact) / exact)
    assert errs[1] < errs[0]


def test_peaks_near_prediction():
    jt = R.joint_measure(SpinState.equal(HALF), FIG1)
    i, k = np.unravel_index(np.argmax(jt.p), jt.p.shape)
    m, mp = 10 - i, 10 - k
    assert min(abs(m - a) + abs(mp - b) for a, b in R.predicted_peaks(FIG1)) <= 2


def test_weak_average_fidelity_expansion():
    st = coherent_x_state(HalfInt(4))
    p = MeasurementParams(HalfInt(10), 1.0, 0.3, 0.002)
    exact_first = measure(st, p).average_fidelity()
    exact_joint = R.joint_measure(st, p).average_fidelity()
    assert abs(R.avg_fidelity_weak(st, p, "first") - exact_first) < 1e-4
    assert abs(R.avg_fidelity_weak(st, p, "joint") - exact_joint) < 1e-4
    with pytest.raises(ValueError):
        R.avg_fidelity_weak(st, p, "both")


@pytest.mark.parametrize("twice_j,twice_s", [(1, 1), (4, 3), (8, 6)])
def test_left_inverse(twice_j, twice_s):
    p = MeasurementParams(HalfInt(twice_j), 1.1, 0.5, 0.35)
    s = HalfInt(twice_s)
    a = coefficients(p, s).table
    for i, m in enumerate(p.j.projections()):
        li = R.left_inverse_measurement(p, s, m)
        assert np.max(np.abs(li.r0 @ np.diag(a[i]) - li.kappa * np.eye(s.dim))) < 1e-10
        total = li.r0.conj().T @ li.r0 + li.r1.conj().T @ li.r1
        assert np.max(np.abs(total - np.eye(s.dim))) < 1e-12
    with pytest.raises(ValueError):
        R.left_inverse_measurement(p, s, p.j, kappa=2.0)


def test_recovery_report():
    rep = R.recovery_report(SpinState.equal(HALF), FIG1)
    assert rep.q == pytest.approx(0.1263, abs=1e-4)
    assert round(rep.q_prime, 2) == 0.57
    assert len(rep.phase_per_m) == 21
    big = R.recovery_report(coherent_x_state(HalfInt(20)), WEAK)
    assert big.q is None and big.phase_per_m == {}


def test_spin_half_only_functions():
    with pytest.raises(ValueError):
        R.avg_sq_fidelity_first(SpinState.equal(HalfInt(2)), FIG1)
