"""Spin-1/2 measurement with a probe whose spin j is in a superposition.

An outcome m only receives amplitude from components with j - |m| a
non-negative integer, so each operator is a primed sum over j of the
definite-spin operators weighted by b_j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple

import numpy as np

from .measure import raw_coefficient_table
from .spincore import HalfInt, HalfIntLike, as_half_int, index_of

HALF = HalfInt(1)


@dataclass(frozen=True)
class ProbeSuperposition:
    """Amplitudes b_j over probe spins j (normalized)."""

    components: Mapping[HalfInt, complex]

    def __post_init__(self):
        comps = {as_half_int(j): complex(b) for j, b in dict(self.components).items()}
        if not comps:
            raise ValueError("probe superposition needs at least one component")
        for j in comps:
            if j.twice < 0:
                raise ValueError(f"negative probe spin {j}")
        norm = sum(abs(b) ** 2 for b in comps.values())
        if abs(norm - 1) > 1e-12:
            raise ValueError(f"sum |b_j|^2 = {norm!r}, expected 1")
        object.__setattr__(self, "components", dict(sorted(comps.items())))

    @classmethod
    def single(cls, j: HalfIntLike) -> "ProbeSuperposition":
        return cls({as_half_int(j): 1.0})

    def contributing(self, m: HalfIntLike) -> list[HalfInt]:
        """Components j >= |m| with j - |m| integer."""
        m = as_half_int(m)
        return [j for j in self.components if j.twice >= abs(m.twice) and (j.twice - m.twice) % 2 == 0]

    def outcomes(self) -> list[HalfInt]:
        """Every m reachable by some component, descending."""
        twice = set()
        for j in self.components:
            twice.update(range(-j.twice, j.twice + 1, 2))
        return [HalfInt(t) for t in sorted(twice, reverse=True)]


def fluct_operator(
    probe: ProbeSuperposition, theta: float, phi: float, g: float, m: HalfIntLike, s: HalfIntLike = HALF
) -> np.ndarray:
    """Diagonal 2x2 operator sum'_j b_j diag(a^{(j)}_{m,1/2}, a^{(j)}_{m,-1/2}).

    Angles are used literally (phi is not folded) so that products with a
    reversing measurement keep their exact phases.
    """
    if as_half_int(s) != HALF:
        raise ValueError("fluctuating-probe operators are defined for a spin-1/2 system only")
    m = as_half_int(m)
    js = probe.contributing(m)
    if not js:
        raise ValueError(f"no probe component can produce outcome {m}")
    diag = np.zeros(2, dtype=complex)
    for j in js:
        diag += probe.components[j] * raw_coefficient_table(j, HALF, theta, phi, g)[index_of(j, m)]
    return np.diag(diag)


def completeness_sum(probe: ProbeSuperposition, theta: float, phi: float, g: float) -> np.ndarray:
    """sum_m T_m^dagger T_m over every reachable outcome.

    Equals the identity for a definite probe spin.  For a superposition the
    cross terms between components survive and the sum is not the identity.
    """
    total = np.zeros((2, 2), dtype=complex)
    for m in probe.outcomes():
        t = fluct_operator(probe, theta, phi, g, m)
        total += t.conj().T @ t
    return total


class ReversalRatios(NamedTuple):
    good: complex
    bad: complex


def _ratio(product: np.ndarray, m: HalfInt, label: str) -> complex:
    d = np.diag(product)
    if abs(d[1]) < 1e-300:
        raise ZeroDivisionError(f"{label} product has a vanishing diagonal entry at m = {m}")
    return complex(d[0] / d[1])


def fluct_reversal_check(
    probe: ProbeSuperposition, theta: float, phi: float, g: float
) -> dict[HalfInt, ReversalRatios]:
    """Diagonal-entry ratios of the two candidate reversal products, per outcome m.

    good: T_{-m}(pi - theta, pi - phi) T_m(theta, phi)
    bad:  T_m(pi - theta, -phi) T_m(theta, phi)
    A ratio of 1 means the product is proportional to the identity.
    """
    out = {}
    for m in probe.outcomes():
        first = fluct_operator(probe, theta, phi, g, m)
        good = fluct_operator(probe, math.pi - theta, math.pi - phi, g, -m) @ first
        bad = fluct_operator(probe, math.pi - theta, -phi, g, m) @ first
        out[m] = ReversalRatios(_ratio(good, m, "reversal"), _ratio(bad, m, "same-outcome reversal"))
    return out
