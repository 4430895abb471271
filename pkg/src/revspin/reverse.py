"""Reversing measurements and the metrics that quantify recovery.

The reversing measurement of {T_m(theta, phi)} is {T_m(pi - theta, pi - phi)}.
For a spin-1/2 system the pair of outcomes (m, -m) restores the original
state exactly; for larger spins it does so approximately, and the weak-
interaction expansions below describe how well.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Literal, NamedTuple, Optional

import numpy as np

from .measure import (
    MeasurementParams,
    TOL_COND,
    chi,
    coefficients,
    raw_coefficient_table,
    reversibility_condition,
)
from .prep import spin_variance
from .spincore import HalfInt, HalfIntLike, SpinState, as_half_int, index_of, projection_values

HALF = HalfInt(1)
FIDELITY_THRESHOLD = 0.95
WEAK_FACTOR = 0.1


def _require_half(s: HalfInt, what: str) -> None:
    if s != HALF:
        raise ValueError(f"{what} is only defined for a spin-1/2 system (got s = {s})")


def _arg(z: complex) -> float:
    """Argument in (-pi, pi]."""
    a = math.atan2(z.imag, z.real)
    return math.pi if a <= -math.pi else a


def reversing_params(params: MeasurementParams) -> MeasurementParams:
    """(j, pi - theta, pi - phi, g), with phi folded into (-pi, pi]."""
    return params.replace(theta=math.pi - params.theta, phi=math.pi - params.phi)


def _second_table(params: MeasurementParams, s: HalfInt) -> np.ndarray:
    # literal pi - phi keeps the phase identity with the first measurement exact
    return raw_coefficient_table(params.j, s, math.pi - params.theta, math.pi - params.phi, params.g)


def symmetry_check(params: MeasurementParams, s: HalfIntLike) -> float:
    """Largest violation of the two reflection identities of the coefficients.

    a_{m' s}(pi - theta, pi - phi) = exp(-i m' pi) a_{-m', -s}(theta, phi)
    a_{m' s}(pi - theta, -phi)     = (-1)^{j + m'} a_{m', -s}(theta, phi)
    """
    s = as_half_int(s)
    j = params.j
    a = raw_coefficient_table(j, s, params.theta, params.phi, params.g)
    mp = projection_values(j)
    lhs1 = raw_coefficient_table(j, s, math.pi - params.theta, math.pi - params.phi, params.g)
    rhs1 = np.exp(-1j * mp * math.pi)[:, None] * a[::-1, ::-1]
    lhs2 = raw_coefficient_table(j, s, math.pi - params.theta, -params.phi, params.g)
    signs = np.array([(-1.0) ** ((j.twice + t) // 2) for t in range(j.twice, -j.twice - 1, -2)])
    rhs2 = signs[:, None] * a[:, ::-1]
    return float(max(np.max(np.abs(lhs1 - rhs1)), np.max(np.abs(lhs2 - rhs2))))


@dataclass(frozen=True)
class JointTable:
    """Statistics of a first measurement followed by a second one.

    ``p[i, k]`` and ``fidelity[i, k]`` are indexed by the first outcome
    m = j - i and the second outcome m' = j - k.
    """

    state: SpinState
    params_first: MeasurementParams
    params_second: MeasurementParams
    p: np.ndarray
    fidelity: np.ndarray
    amplitudes: np.ndarray = field(repr=False)

    @property
    def outcomes(self) -> list[HalfInt]:
        return self.params_first.j.projections()

    def __getitem__(self, key) -> tuple[float, float]:
        m, mp = (as_half_int(k) for k in key)
        i = index_of(self.params_first.j, m)
        k = index_of(self.params_second.j, mp)
        return float(self.p[i, k]), float(self.fidelity[i, k])

    def average_fidelity(self) -> float:
        return float(np.sum(self.p * self.fidelity))

    def average_squared_fidelity(self) -> float:
        return float(np.sum(self.p * self.fidelity**2))

    def marginal_first(self) -> np.ndarray:
        return self.p.sum(axis=1)

    def outcome_sums(self) -> np.ndarray:
        """m + m' for every entry, as floats."""
        m = projection_values(self.params_first.j)
        mp = projection_values(self.params_second.j)
        return m[:, None] + mp[None, :]

    def recovery_line(self) -> np.ndarray:
        """p_{m,-m} for m = j..-j."""
        return self.p[:, ::-1].diagonal().copy()


def joint_measure(
    state: SpinState, params: MeasurementParams, second: Optional[MeasurementParams] = None
) -> JointTable:
    """Joint outcome statistics of {T_m(theta, phi)} then the reversing measurement.

    ``second`` replaces the default reversing measurement when given.
    """
    s = state.s
    a = coefficients(params, s).table
    if second is None:
        b = _second_table(params, s)
        second = reversing_params(params)
    else:
        b = coefficients(second, s).table
    # amp[i, k, sigma] = b_{m'_k sigma} a_{m_i sigma} c_sigma
    amp = a[:, None, :] * b[None, :, :] * state.amplitudes[None, None, :]
    w = state.weights
    p = np.einsum("ks,is,s->ik", np.abs(b) ** 2, np.abs(a) ** 2, w)
    overlap = np.einsum("ks,is,s->ik", b, a, w)
    safe = np.where(p < 1e-300, 1.0, p)
    fid = np.where(p < 1e-300, 0.0, np.minimum(np.abs(overlap) / np.sqrt(safe), 1.0))
    return JointTable(state, params, second, p, fid, amp)


def final_state(
    state: SpinState, params: MeasurementParams, m: HalfIntLike, mp: HalfIntLike
) -> tuple[SpinState, complex]:
    """State after outcomes (m, m') and its phase relative to ``state``.

    The phase is <psi|psi_out> / |<psi|psi_out>|; when the outcomes restore
    the state exactly it is the recovery phase exp(i alpha).
    """
    m, mp = as_half_int(m), as_half_int(mp)
    s = state.s
    a = coefficients(params, s).table[index_of(params.j, m)]
    b = _second_table(params, s)[index_of(params.j, mp)]
    vec = b * a * state.amplitudes
    norm = np.linalg.norm(vec)
    if norm**2 < 1e-300:
        raise ZeroDivisionError(f"outcomes ({m}, {mp}) have vanishing joint probability")
    out = SpinState(s, vec / norm)
    ov = state.overlap(out)
    phase = ov / abs(ov) if abs(ov) > 0 else complex(1.0)
    return out, phase


def product_ratio(params: MeasurementParams, s: HalfIntLike, m: HalfIntLike) -> np.ndarray:
    """Diagonal of T_{-m}(pi-theta, pi-phi) T_m(theta, phi) divided by its first entry.

    All ones exactly when the product is proportional to the identity.
    """
    s = as_half_int(s)
    m = as_half_int(m)
    a = coefficients(params, s).table[index_of(params.j, m)]
    b = _second_table(params, s)[index_of(params.j, -m)]
    diag = a * b
    return diag / diag[0]


def recovery_phases(params: MeasurementParams) -> dict[HalfInt, complex]:
    """exp(i alpha) = exp(i m pi) a_{m,-1/2} a_{m,1/2} / |...| for each m."""
    a = coefficients(params, HALF).table
    out = {}
    for i, m in enumerate(params.j.projections()):
        prod = a[i, 1] * a[i, 0]
        out[m] = cmath.exp(1j * m.value * math.pi) * prod / abs(prod) if abs(prod) > 0 else complex("nan")
    return out


def recovery_probability(params: MeasurementParams, state: Optional[SpinState] = None) -> float:
    """Total probability q = sum_m |a_{m,-1/2} a_{m,1/2}|^2 of exact recovery.

    Does not depend on the state; passing one only checks it is spin 1/2.
    """
    if state is not None:
        _require_half(state.s, "exact recovery probability")
    a = coefficients(params, HALF).table
    return float(np.sum(np.abs(a[:, 0] * a[:, 1]) ** 2))


def _e_pm(params: MeasurementParams) -> tuple[float, float]:
    chi_p = chi(HALF, params)
    chi_m = chi(-HALF, params)
    if min(1 + chi_p, 1 + chi_m, 1 - chi_p, 1 - chi_m) <= TOL_COND:
        raise ZeroDivisionError("chi_{+-1/2} = +-1: fidelity ratios are singular")
    return (1 - chi_p) / (1 + chi_p), (1 - chi_m) / (1 + chi_m)


def fidelity_phase(params: MeasurementParams) -> float:
    """Per-unit-of-(m+m') relative phase f, in (-pi, pi]."""
    st = math.sin(params.theta)
    sg = math.sin(params.g)
    z = complex(1 - st**2 * (math.cos(params.phi) ** 2 + sg**2), math.sin(2 * params.theta) * math.cos(params.phi) * sg)
    return _arg(z)


def recovery_width(params: MeasurementParams) -> float:
    """Half-width delta m in m + m' inside which F_{mm'} >= 0.95 (spin 1/2)."""
    e_plus, e_minus = _e_pm(params)
    f = fidelity_phase(params)
    denom = math.log(e_plus / e_minus) ** 2 + 4 * f**2
    if denom == 0:
        raise ZeroDivisionError("no information is gained: the recovery width is unbounded")
    return math.sqrt(8 / 5) / math.sqrt(denom)


def spin_fidelity_closed_form(state: SpinState, params: MeasurementParams, total: float) -> float:
    """F_{mm'} of a spin-1/2 state as a function of m + m' only."""
    _require_half(state.s, "closed-form F_{mm'}")
    e_plus, e_minus = _e_pm(params)
    f = fidelity_phase(params)
    wp, wm = state.weights
    num = wp**2 * e_plus**total + wm**2 * e_minus**total + 2 * wp * wm * (e_plus * e_minus) ** (total / 2) * math.cos(
        total * f
    )
    den = wp * e_plus**total + wm * e_minus**total
    return math.sqrt(max(num, 0.0)) / math.sqrt(den)


def approx_recovery_probability(
    state: SpinState,
    params: MeasurementParams,
    threshold: float = FIDELITY_THRESHOLD,
    joint: Optional[JointTable] = None,
) -> float:
    """q' = total probability of outcome pairs with F_{mm'} >= threshold."""
    if joint is None:
        joint = joint_measure(state, params)
    return float(np.sum(joint.p[joint.fidelity >= threshold]))


def weak_width(params: MeasurementParams, s: HalfIntLike) -> float:
    """Weak-coupling half-width (1 / (2 sqrt(10) s)) sqrt(1 - sin^2 t cos^2 p) / |g sin t|."""
    s = as_half_int(s)
    st = math.sin(params.theta)
    denom = abs(params.g * st)
    if denom <= 0 or s.twice == 0:
        raise ZeroDivisionError("weak width needs g != 0, sin(theta) != 0 and s > 0")
    return math.sqrt(1 - st**2 * math.cos(params.phi) ** 2) / (2 * math.sqrt(10) * s.value * denom)


def weak_condition_margin(params: MeasurementParams, s: HalfIntLike) -> float:
    """g^4 divided by the largest g^4 the weak-coupling expansion tolerates.

    Small values (see ``weak_condition_holds``) mean the fourth-order
    correction to F_{m,-m} is negligible.
    """
    s = as_half_int(s)
    st = math.sin(params.theta)
    if abs(st) <= 0:
        raise ZeroDivisionError("sin(theta) = 0")
    rhs = ((1 - abs(st * math.cos(params.phi))) / (math.sqrt(2) * st)) ** 2 / (s.value**4 * params.j.value**2)
    return params.g**4 / rhs


def weak_condition_holds(params: MeasurementParams, s: HalfIntLike, factor: float = WEAK_FACTOR) -> bool:
    return weak_condition_margin(params, s) <= factor


def _quadratic_coefficient(state: SpinState, params: MeasurementParams) -> float:
    # F ~ 1 - coef * (m + m')^2
    if state.s == HALF:
        wp, wm = state.weights
        return wp * wm / (5 * recovery_width(params) ** 2)
    _, var = spin_variance(state)
    return var / state.s.value**2 / (20 * weak_width(params, state.s) ** 2)


def quadratic_fidelity_bound(state: SpinState, params: MeasurementParams, m: HalfIntLike, mp: HalfIntLike) -> float:
    """Second-order expansion of F_{mm'} in m + m'.

    Spin 1/2 uses the exact width delta m; larger spins use the
    weak-coupling width weighted by the S_z variance of the state.
    """
    total = as_half_int(m).value + as_half_int(mp).value
    return 1 - _quadratic_coefficient(state, params) * total**2


def quadratic_fidelity_table(state: SpinState, params: MeasurementParams) -> np.ndarray:
    """``quadratic_fidelity_bound`` over the whole (m, m') lattice."""
    mv = projection_values(params.j)
    total = mv[:, None] + mv[None, :]
    return 1 - _quadratic_coefficient(state, params) * total**2


def h_factor(params: MeasurementParams) -> float:
    return 1 - math.sin(params.theta) ** 2 * math.sin(params.g) ** 2


def k_factor(params: MeasurementParams) -> float:
    return 2 * _arg(complex(math.cos(params.g), -math.sin(params.g) * math.cos(params.theta)))


def avg_sq_fidelity_first(state: SpinState, params: MeasurementParams) -> float:
    """sum_m p_m F_m^2 in closed form (spin 1/2)."""
    _require_half(state.s, "average squared fidelity")
    wp, wm = state.weights
    j = params.j.value
    return wp**2 + wm**2 + 2 * wp * wm * h_factor(params) ** j * math.cos(j * k_factor(params))


def avg_sq_fidelity_joint(state: SpinState, params: MeasurementParams) -> float:
    """sum_{mm'} p_{mm'} F_{mm'}^2 in closed form (spin 1/2); no oscillation in j."""
    _require_half(state.s, "average squared fidelity")
    wp, wm = state.weights
    return wp**2 + wm**2 + 2 * wp * wm * h_factor(params) ** (2 * params.j.value)


def oscillation_period(params: MeasurementParams) -> float:
    """Period 2 pi / |k| in j of the first-measurement squared fidelity."""
    return 2 * math.pi / abs(k_factor(params))


def asymptotic_variance_factor(params: MeasurementParams) -> float:
    return 1 - (chi(HALF, params) ** 2 + chi(-HALF, params) ** 2) / 2


def asymptotic_recovery(params: MeasurementParams) -> float:
    """Large-j Gaussian estimate of q, decaying exponentially in j."""
    v = asymptotic_variance_factor(params)
    j = params.j.value
    diff = chi(HALF, params) - chi(-HALF, params)
    return math.exp(-j * diff**2 / (2 * v)) / math.sqrt(2 * math.pi * j * v)


def avg_fidelity_weak(state: SpinState, params: MeasurementParams, stage: Literal["first", "joint"]) -> float:
    """Second-order-in-g average fidelity after the first or both measurements."""
    _, var = spin_variance(state)
    j = params.j.value
    g2 = params.g**2
    st2 = math.sin(params.theta) ** 2
    if stage == "joint":
        return 1 - 2 * g2 * j * var * st2
    if stage == "first":
        return 1 - g2 * j * var * (st2 + 2 * j * math.cos(params.theta) ** 2)
    raise ValueError(f"stage must be 'first' or 'joint', got {stage!r}")


class LeftInverse(NamedTuple):
    r0: np.ndarray
    r1: np.ndarray
    kappa: complex


def left_inverse_measurement(
    params: MeasurementParams, s: HalfIntLike, m: HalfIntLike, kappa: Optional[complex] = None
) -> LeftInverse:
    """Two-outcome measurement {R0, R1} whose outcome 0 undoes T_m exactly.

    R0 = kappa diag(1 / a_{m sigma}) and R1 = sqrt(I - R0^dagger R0).  The
    default kappa = min_sigma |a_{m sigma}| is the largest admissible one.
    """
    s = as_half_int(s)
    a = coefficients(params, s).table[index_of(params.j, as_half_int(m))]
    if np.min(np.abs(a)) <= TOL_COND:
        raise ValueError(f"T_{m} is not invertible: min |a_m sigma| = {np.min(np.abs(a)):.3g}")
    if kappa is None:
        kappa = float(np.min(np.abs(a)))
    inv = kappa / a
    weights = np.abs(inv) ** 2
    if np.max(weights) > 1 + 1e-12:
        raise ValueError(f"|kappa| = {abs(kappa):.6g} too large: R0^dagger R0 exceeds the identity")
    r0 = np.diag(inv)
    r1 = np.diag(np.sqrt(np.clip(1 - weights, 0.0, None))).astype(complex)
    return LeftInverse(r0, r1, complex(kappa))


@dataclass(frozen=True)
class RecoveryReport:
    """Recovery metrics of the reversing measurement for one state.

    ``q`` and ``phase_per_m`` describe exact recovery and exist only for
    spin 1/2; ``width`` is delta m there and the weak-coupling width
    otherwise.
    """

    q: Optional[float]
    q_prime: float
    width: float
    phase_per_m: dict[HalfInt, complex]


def recovery_report(
    state: SpinState, params: MeasurementParams, threshold: float = FIDELITY_THRESHOLD
) -> RecoveryReport:
    joint = joint_measure(state, params)
    q_prime = approx_recovery_probability(state, params, threshold, joint)
    if state.s == HALF:
        return RecoveryReport(recovery_probability(params), q_prime, recovery_width(params), recovery_phases(params))
    return RecoveryReport(None, q_prime, weak_width(params, state.s), {})


@dataclass(frozen=True)
class AsymptoticsReport:
    h: float
    k: float
    v: float
    avg_sq_fid_first: float
    avg_sq_fid_joint: float
    q_asymptotic: float


def asymptotics_report(state: SpinState, params: MeasurementParams) -> AsymptoticsReport:
    return AsymptoticsReport(
        h=h_factor(params),
        k=k_factor(params),
        v=asymptotic_variance_factor(params),
        avg_sq_fid_first=avg_sq_fidelity_first(state, params),
        avg_sq_fid_joint=avg_sq_fidelity_joint(state, params),
        q_asymptotic=asymptotic_recovery(params),
    )


def predicted_peaks(params: MeasurementParams) -> list[tuple[float, float]]:
    """Locations (-j chi_{+-1/2}, +j chi_{-+1/2}) of the two joint-probability peaks."""
    j = params.j.value
    cp, cm = chi(HALF, params), chi(-HALF, params)
    return [(-j * cp, j * cm), (-j * cm, j * cp)]


def is_reversible(params: MeasurementParams, s: HalfIntLike) -> bool:
    return bool(reversibility_condition(params, s))
