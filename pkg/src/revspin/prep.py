"""State preparation: coherent and cat states, and the two-peak subspace protocol.

Measuring {T_m(pi/2, 0)} on an equatorial coherent state leaves a spin
distribution concentrated on a symmetric pair +-sigma~.  A state confined to
that pair behaves exactly like a spin 1/2 with coupling g' = 2 g sigma~.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .measure import MeasurementParams, coefficients
from .spincore import HalfInt, HalfIntLike, SpinState, as_half_int, index_of, projection_values, wigner_small_d

HALF = HalfInt(1)


def spin_variance(state: SpinState) -> tuple[float, float]:
    """Mean and variance of sigma under |c_sigma|^2."""
    sig = projection_values(state.s)
    w = state.weights
    mean = float(np.sum(sig * w))
    return mean, float(np.sum(sig**2 * w) - mean**2)


def _rotated_column(s: HalfInt, top: HalfInt) -> np.ndarray:
    return np.array([wigner_small_d(s, sigma, top, math.pi / 2) for sigma in s.projections()], dtype=complex)


def coherent_x_state(s: HalfIntLike) -> SpinState:
    """exp(-i S_y pi/2)|s>, the S_x = +s eigenstate."""
    s = as_half_int(s)
    return SpinState.from_amplitudes(s, _rotated_column(s, s))


def cat_state(axis: Literal["x", "z"], s: HalfIntLike, c_plus: complex, c_minus: complex) -> SpinState:
    """c+ |S_axis = +s> + c- |S_axis = -s>, renormalized.

    The x-axis components are exp(-i S_y pi/2) applied to |s> and |-s>.
    """
    s = as_half_int(s)
    if axis == "x":
        plus, minus = _rotated_column(s, s), _rotated_column(s, -s)
    elif axis == "z":
        plus = np.zeros(s.dim, dtype=complex)
        minus = np.zeros(s.dim, dtype=complex)
        plus[0] = 1.0
        minus[-1] = 1.0
    else:
        raise ValueError(f"axis must be 'x' or 'z', got {axis!r}")
    if s.twice == 0:
        raise ValueError("a cat state needs s > 0")
    return SpinState.from_amplitudes(s, complex(c_plus) * plus + complex(c_minus) * minus)


def prepare_coherent_equatorial(s: HalfIntLike, varphi: float) -> SpinState:
    """Coherent state along (cos varphi, sin varphi, 0): binomial amplitudes with phases exp(-i sigma varphi)."""
    s = as_half_int(s)
    sig = projection_values(s)
    log_mag = np.array(
        [
            0.5 * (math.lgamma(s.twice + 1) - math.lgamma((s.twice + t) // 2 + 1) - math.lgamma((s.twice - t) // 2 + 1))
            - s.value * math.log(2)
            for t in range(s.twice, -s.twice - 1, -2)
        ]
    )
    amps = np.exp(log_mag) * np.exp(-1j * sig * varphi)
    return SpinState(s, amps / np.linalg.norm(amps))


@dataclass(frozen=True)
class PrepResult:
    """Outcome of the subspace-preparation measurement.

    ``distribution`` is rho_m(sigma) over sigma = s..-s.  ``peaks`` are the
    lattice maxima (+sigma~, -sigma~); ``sigma_estimate`` is the arctan
    approximation and ``leaked`` the probability outside the peak pair.
    """

    outcome_m: HalfInt
    probability: float
    state: SpinState
    initial: SpinState = field(repr=False)
    distribution: np.ndarray = field(repr=False)
    peaks: tuple[HalfInt, HalfInt]
    sigma_estimate: float
    leaked: float


def sigma_peak_estimate(j: HalfIntLike, g: float, m: HalfIntLike) -> float:
    """(1/g) arctan sqrt((j + m) / (j - m)), valid for g << pi/2 < g s."""
    j, m = as_half_int(j), as_half_int(m)
    num, den = j.value + m.value, j.value - m.value
    angle = math.pi / 2 if den == 0 else math.atan(math.sqrt(num / den))
    return angle / g


def rho_closed_form(s: HalfIntLike, j: HalfIntLike, g: float, m: HalfIntLike) -> np.ndarray:
    """rho_m(sigma) from its product form (binomials times cos/sin powers), normalized."""
    s, j, m = as_half_int(s), as_half_int(j), as_half_int(m)
    sig = projection_values(s)
    n_cos = (j.twice - m.twice) // 2
    n_sin = (j.twice + m.twice) // 2
    binom_s = np.array(
        [
            math.exp(math.lgamma(s.twice + 1) - math.lgamma((s.twice + t) // 2 + 1) - math.lgamma((s.twice - t) // 2 + 1))
            for t in range(s.twice, -s.twice - 1, -2)
        ]
    )
    cos2 = np.cos(g * sig) ** 2
    sin2 = np.sin(g * sig) ** 2
    raw = binom_s * (cos2**n_cos if n_cos else 1.0) * (sin2**n_sin if n_sin else 1.0)
    return raw / raw.sum()


def subspace_prepare(s: HalfIntLike, j: HalfIntLike, g: float, varphi: float, m: HalfIntLike) -> PrepResult:
    """Measure {T_m(pi/2, 0)} on the equatorial coherent state and keep outcome m."""
    s, j, m = as_half_int(s), as_half_int(j), as_half_int(m)
    initial = prepare_coherent_equatorial(s, varphi)
    a = coefficients(MeasurementParams(j, math.pi / 2, 0.0, g), s).table[index_of(j, m)]
    unnorm = a * initial.amplitudes
    p = float(np.sum(np.abs(unnorm) ** 2))
    if p < 1e-300:
        raise ZeroDivisionError(f"outcome {m} has vanishing probability")
    state = SpinState(s, unnorm / math.sqrt(p))
    rho = state.weights
    labels = s.projections()
    best = max(range(s.dim), key=lambda i: (round(rho[i], 15), abs(labels[i].twice), labels[i].twice))
    top = abs(labels[best])
    leaked = 1.0 - float(rho[index_of(s, top)] + (rho[index_of(s, -top)] if top.twice else 0.0))
    return PrepResult(m, p, state, initial, rho, (top, -top), sigma_peak_estimate(j, g, m), max(leaked, 0.0))


def two_component_approximation(result: PrepResult, j: HalfIntLike, varphi: float) -> SpinState:
    """(exp(-i s~ varphi)|s~> + (-1)^{j+m} exp(i s~ varphi)|-s~>) / sqrt(2)."""
    j = as_half_int(j)
    s = result.state.s
    top = result.peaks[0]
    if top.twice == 0:
        raise ValueError("the distribution peaks at sigma = 0; no two-component form")
    sign = -1.0 if ((j.twice + result.outcome_m.twice) // 2) % 2 else 1.0
    amps = np.zeros(s.dim, dtype=complex)
    amps[index_of(s, top)] = np.exp(-1j * top.value * varphi)
    amps[index_of(s, -top)] = sign * np.exp(1j * top.value * varphi)
    return SpinState(s, amps / math.sqrt(2))


def renormalized_g(g: float, sigma_tilde: HalfIntLike) -> float:
    """Effective spin-1/2 coupling g' = 2 g sigma~ inside span{|+-sigma~>}."""
    sigma_tilde = as_half_int(sigma_tilde)
    if sigma_tilde.twice == 0:
        raise ValueError("sigma~ must be nonzero")
    return 2 * g * sigma_tilde.value


def reduce_to_half(state: SpinState, sigma_tilde: HalfIntLike) -> SpinState:
    """The spin-1/2 state (c_{sigma~}, c_{-sigma~}) of a state supported on +-sigma~."""
    sigma_tilde = as_half_int(sigma_tilde)
    if sigma_tilde.twice <= 0:
        raise ValueError("sigma~ must be positive")
    amps = state.amplitudes
    pair = np.array([amps[index_of(state.s, sigma_tilde)], amps[index_of(state.s, -sigma_tilde)]])
    return SpinState(HALF, pair)


def reduced_params(params: MeasurementParams, sigma_tilde: HalfIntLike) -> MeasurementParams:
    return params.replace(g=renormalized_g(params.g, sigma_tilde))
