"""The probe-based measurement {T_m(theta, phi)} of a spin-s system.

A spin-j probe prepared along (theta, phi) interacts with the system through
exp(-2i g J_z S_z), is rotated by exp(-i J_y pi/2) and read out in the J_z
basis.  Every outcome m acts on the system as the diagonal operator

    T_m = sum_sigma a_{m sigma} |sigma><sigma|

so the whole measurement is described by the coefficient table a_{m' sigma}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, NamedTuple, Optional

import numpy as np

from .spincore import (
    HalfInt,
    HalfIntLike,
    SpinState,
    as_half_int,
    check_projection,
    index_of,
    projection_values,
    wigner_small_d,
)

TOL_COND = 1e-9
P_FLOOR = 1e-300


def wrap_angle(phi: float) -> float:
    """Map an angle into (-pi, pi]."""
    out = math.remainder(phi, 2 * math.pi)
    if out <= -math.pi:
        out += 2 * math.pi
    return out


@dataclass(frozen=True)
class MeasurementParams:
    """Probe spin ``j``, probe angles ``theta``/``phi`` and coupling ``g``.

    ``phi`` is folded into (-pi, pi]; a 2*pi shift only changes every
    coefficient by the common sign (-1)^{2j}.
    """

    j: HalfInt
    theta: float
    phi: float
    g: float

    def __post_init__(self):
        j = as_half_int(self.j)
        if j.twice < 0:
            raise ValueError(f"probe spin must be non-negative, got {j}")
        theta = float(self.theta)
        if theta < -1e-12 or theta > math.pi + 1e-12:
            raise ValueError(f"theta must lie in [0, pi], got {theta}")
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "theta", min(max(theta, 0.0), math.pi))
        object.__setattr__(self, "phi", wrap_angle(float(self.phi)))
        object.__setattr__(self, "g", float(self.g))

    def replace(self, **changes) -> "MeasurementParams":
        kw = dict(j=self.j, theta=self.theta, phi=self.phi, g=self.g)
        kw.update(changes)
        return MeasurementParams(**kw)


def chi(sigma: HalfIntLike, params: MeasurementParams) -> float:
    """Bias sin(theta) cos(2 g sigma + phi) of the outcome distribution."""
    sigma = as_half_int(sigma)
    return math.sin(params.theta) * math.cos(2 * params.g * sigma.value + params.phi)


def chi_values(params: MeasurementParams, s: HalfInt) -> np.ndarray:
    return np.sin(params.theta) * np.cos(2 * params.g * projection_values(s) + params.phi)


def _ipow(z: np.ndarray, n: int) -> np.ndarray:
    """z**n for a non-negative integer n by repeated squaring (0**0 = 1)."""
    result = np.ones_like(z)
    base = z.copy()
    while n:
        if n & 1:
            result = result * base
        base = base * base
        n >>= 1
    return result


def _log_binom_root(j: HalfInt, mp_twice: int) -> float:
    # log of 2^-j sqrt((2j)! / ((j+m')! (j-m')!))
    jpm = (j.twice + mp_twice) // 2
    jmm = (j.twice - mp_twice) // 2
    return 0.5 * (math.lgamma(j.twice + 1) - math.lgamma(jpm + 1) - math.lgamma(jmm + 1)) - j.value * math.log(2)


def _z_factors(theta: float, phi: float, g: float, sigma_values: np.ndarray):
    x = 2 * g * np.asarray(sigma_values, dtype=float) + phi
    lo = np.exp(-0.5j * x) * math.cos(theta / 2)
    hi = np.exp(0.5j * x) * math.sin(theta / 2)
    return lo + hi, lo - hi


def coefficient_a(params: MeasurementParams, mp: HalfIntLike, sigma: HalfIntLike) -> complex:
    """Closed-form a^{(j)}_{m' sigma}(theta, phi)."""
    mp, sigma = as_half_int(mp), as_half_int(sigma)
    j = params.j
    check_projection(j, mp)
    zp, zm = _z_factors(params.theta, params.phi, params.g, np.array([sigma.value]))
    n_plus = (j.twice - mp.twice) // 2
    n_minus = (j.twice + mp.twice) // 2
    value = math.exp(_log_binom_root(j, mp.twice)) * _ipow(zp, n_plus) * _ipow(zm, n_minus)
    return complex(value[0])


def coefficient_a_from_rotations(params: MeasurementParams, mp: HalfIntLike, sigma: HalfIntLike) -> complex:
    """a_{m' sigma} from its defining sum over intermediate probe projections m.

    sum_m exp(-i m (2 g sigma + phi)) d_{m j}(theta) d_{m' m}(pi/2)
    """
    mp, sigma = as_half_int(mp), as_half_int(sigma)
    j = params.j
    check_projection(j, mp)
    x = 2 * params.g * sigma.value + params.phi
    total = 0j
    for m in j.projections():
        total += (
            np.exp(-1j * m.value * x)
            * wigner_small_d(j, m, j, params.theta)
            * wigner_small_d(j, mp, m, math.pi / 2)
        )
    return complex(total)


@lru_cache(maxsize=256)
def _table(j_twice: int, s_twice: int, theta: float, phi: float, g: float) -> np.ndarray:
    j = HalfInt(j_twice)
    zp, zm = _z_factors(theta, phi, g, projection_values(HalfInt(s_twice)))
    rows = []
    for mp_twice in range(j_twice, -j_twice - 1, -2):
        pref = math.exp(_log_binom_root(j, mp_twice))
        rows.append(pref * _ipow(zp, (j_twice - mp_twice) // 2) * _ipow(zm, (j_twice + mp_twice) // 2))
    table = np.array(rows, dtype=complex)
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class CoefficientSet:
    """Table a[m', sigma]: rows m' = j..-j, columns sigma = s..-s."""

    params: MeasurementParams
    s: HalfInt
    table: np.ndarray = field(repr=False)

    @property
    def outcomes(self) -> list[HalfInt]:
        return self.params.j.projections()

    def __getitem__(self, key) -> complex:
        mp, sigma = key
        return complex(self.table[index_of(self.params.j, as_half_int(mp)), index_of(self.s, as_half_int(sigma))])

    def column_norms(self) -> np.ndarray:
        return np.sum(np.abs(self.table) ** 2, axis=0)


def raw_coefficient_table(j: HalfIntLike, s: HalfIntLike, theta: float, phi: float, g: float) -> np.ndarray:
    """Coefficient table for angles taken literally (phi is not wrapped).

    Needed where the overall sign (-1)^{2j} picked up by a 2*pi shift of
    phi matters, e.g. for phase identities between measurements.
    """
    j, s = as_half_int(j), as_half_int(s)
    return _table(j.twice, s.twice, float(theta), float(phi), float(g))


def coefficients(params: MeasurementParams, s: HalfIntLike) -> CoefficientSet:
    s = as_half_int(s)
    return CoefficientSet(params, s, _table(params.j.twice, s.twice, params.theta, params.phi, params.g))


def coefficient_magnitude_sq(params: MeasurementParams, mp: HalfIntLike, sigma: HalfIntLike) -> float:
    """Binomial form of |a_{m' sigma}|^2 in terms of chi_sigma."""
    mp = as_half_int(mp)
    j = params.j
    check_projection(j, mp)
    c = chi(sigma, params)
    n_plus = (j.twice - mp.twice) // 2
    n_minus = (j.twice + mp.twice) // 2
    log_binom = math.lgamma(j.twice + 1) - math.lgamma(n_plus + 1) - math.lgamma(n_minus + 1)
    up = (1 + c) / 2
    down = (1 - c) / 2
    return math.exp(log_binom) * (up**n_plus if n_plus else 1.0) * (down**n_minus if n_minus else 1.0)


def binomial_moments(params: MeasurementParams, sigma: HalfIntLike) -> tuple[float, float]:
    """Mean -j chi and variance j (1 - chi^2) / 2 of the m' distribution."""
    c = chi(sigma, params)
    j = params.j.value
    return -j * c, j * (1 - c * c) / 2


def clt_approximation(params: MeasurementParams, sigma: HalfIntLike, mp: HalfIntLike) -> float:
    """Gaussian stand-in for |a_{m' sigma}|^2 at large j."""
    mean, var = binomial_moments(params, sigma)
    if var <= 0:
        raise ZeroDivisionError("degenerate distribution: chi_sigma = +-1 gives zero variance")
    x = as_half_int(mp).value - mean
    return math.exp(-x * x / (2 * var)) / math.sqrt(2 * math.pi * var)


class Condition(NamedTuple):
    """Outcome of an admissibility test: ``holds`` plus a human-readable reason."""

    holds: bool
    diagnostic: str
    magnitude: float

    def __bool__(self) -> bool:
        return self.holds


def information_condition(params: MeasurementParams, s: HalfIntLike, tol: float = TOL_COND) -> Condition:
    """Whether outcome probabilities can depend on the measured state at all."""
    s = as_half_int(s)
    sin_t = abs(math.sin(params.theta))
    if sin_t <= tol:
        return Condition(False, f"sin(theta) vanishes (|sin theta| = {sin_t:.3g})", sin_t)
    sin_g = abs(math.sin(params.g))
    if sin_g <= tol:
        return Condition(False, f"sin(g) vanishes (|sin g| = {sin_g:.3g})", sin_g)
    third_applies = s.twice == 1 or (s.twice > 1 and abs(math.cos(params.g)) <= tol)
    if third_applies:
        val = abs(math.sin((s.twice - 1) * params.g + params.phi))
        if val <= tol:
            return Condition(False, f"sin((2s-1)g + phi) vanishes (|value| = {val:.3g})", val)
        return Condition(True, "information condition satisfied", min(sin_t, sin_g, val))
    return Condition(True, "information condition satisfied", min(sin_t, sin_g))


def reversibility_condition(params: MeasurementParams, s: HalfIntLike, tol: float = TOL_COND) -> Condition:
    """Whether no coefficient a_{m sigma} vanishes, i.e. every T_m is invertible."""
    s = as_half_int(s)
    sin_gap = abs(abs(math.sin(params.theta)) - 1.0)
    worst = math.inf
    for sigma in s.projections():
        cos_gap = abs(abs(math.cos(2 * params.g * sigma.value + params.phi)) - 1.0)
        if sin_gap <= tol and cos_gap <= tol:
            return Condition(
                False,
                f"sin(theta) = +-1 and cos(2 g sigma + phi) = +-1 at sigma = {sigma}",
                max(sin_gap, cos_gap),
            )
        worst = min(worst, max(sin_gap, cos_gap))
    return Condition(True, "reversibility condition satisfied", worst)


def measurement_operator(params: MeasurementParams, s: HalfIntLike, m: HalfIntLike) -> np.ndarray:
    """Diagonal matrix of T_m(theta, phi) in the S_z basis."""
    cs = coefficients(params, s)
    return np.diag(cs.table[index_of(params.j, as_half_int(m))])


class Outcome(NamedTuple):
    m: HalfInt
    p: float
    fidelity: float
    post: Optional[SpinState]


@dataclass(frozen=True)
class OutcomeTable:
    """Per-outcome probability, fidelity and post-measurement amplitudes.

    ``post`` rows are normalized except where ``vanishing`` is set; those
    outcomes have p below 1e-300 and carry a zero row.
    """

    state: SpinState
    params: MeasurementParams
    p: np.ndarray
    fidelity: np.ndarray
    post: np.ndarray = field(repr=False)
    vanishing: np.ndarray = field(repr=False)

    @property
    def outcomes(self) -> list[HalfInt]:
        return self.params.j.projections()

    def __len__(self) -> int:
        return self.p.shape[0]

    def __getitem__(self, m: HalfIntLike) -> Outcome:
        m = as_half_int(m)
        i = index_of(self.params.j, m)
        post = None if self.vanishing[i] else SpinState(self.state.s, self.post[i])
        return Outcome(m, float(self.p[i]), float(self.fidelity[i]), post)

    def __iter__(self) -> Iterator[Outcome]:
        for m in self.outcomes:
            yield self[m]

    def average_fidelity(self) -> float:
        return float(np.sum(self.p * self.fidelity))

    def average_squared_fidelity(self) -> float:
        return float(np.sum(self.p * self.fidelity**2))


def measure(state: SpinState, params: MeasurementParams) -> OutcomeTable:
    """Apply {T_m(theta, phi)} to ``state`` and tabulate every outcome."""
    a = coefficients(params, state.s).table
    c = state.amplitudes
    w = state.weights
    p = (np.abs(a) ** 2) @ w
    vanishing = p < P_FLOOR
    safe = np.where(vanishing, 1.0, p)
    post = a * c[None, :] / np.sqrt(safe)[:, None]
    post[vanishing] = 0.0
    fid = np.abs(a @ w) / np.sqrt(safe)
    fid[vanishing] = 0.0
    return OutcomeTable(state, params, p, np.minimum(fid, 1.0), post, vanishing)


def expected_outcome(state: SpinState, params: MeasurementParams) -> float:
    """Mean outcome -j sum_sigma chi_sigma |c_sigma|^2."""
    return float(-params.j.value * np.sum(chi_values(params, state.s) * state.weights))
