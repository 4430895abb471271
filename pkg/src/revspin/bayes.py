"""Information gain versus fidelity loss for two equally likely hypotheses.

The system is known to be in one of two orthogonal spin-1/2 states |a>, |b>
with prior 1/2 each.  Bayes' rule turns the outcome statistics of the first
and of the reversing measurement into posterior entropies (in bits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .measure import MeasurementParams, measure
from .reverse import joint_measure
from .spincore import HalfInt, SpinState

H0 = 1.0
P_SKIP = 1e-15


@dataclass(frozen=True)
class HypothesisPair:
    gamma: float
    state_a: SpinState
    state_b: SpinState
    prior: tuple[float, float] = (0.5, 0.5)


def make_hypothesis_pair(gamma: float) -> HypothesisPair:
    """|a> = cos(g/2)|1/2> + sin(g/2)|-1/2>, |b> = -sin(g/2)|1/2> + cos(g/2)|-1/2>."""
    if not 0 < gamma < math.pi / 2:
        raise ValueError(f"gamma must lie in (0, pi/2), got {gamma}")
    c, s = math.cos(gamma / 2), math.sin(gamma / 2)
    half = HalfInt(1)
    return HypothesisPair(gamma, SpinState(half, [c, s]), SpinState(half, [-s, c]))


def binary_entropy(p) -> np.ndarray:
    """Entropy in bits of a two-point distribution (p, 1 - p), 0 log 0 = 0."""
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    out = np.zeros_like(p)
    for q in (p, 1 - p):
        nz = q > 0
        out[nz] -= q[nz] * np.log2(q[nz])
    return out


def _posterior(pa: np.ndarray, pb: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    total = 0.5 * pa + 0.5 * pb
    safe = np.where(total > 0, total, 1.0)
    post_a = np.where(total > 0, 0.5 * pa / safe, 0.5)
    return total, post_a


@dataclass(frozen=True)
class InfoRecord:
    """Per-outcome and per-pair probabilities, information (bits) and fidelities.

    First-measurement arrays are indexed by m = j - i; joint arrays by
    (m, m') and the expectations I'(m), F'(m) by m.  Outcomes listed in
    ``skipped`` had p(m) below 1e-15 and carry NaN expectations.
    """

    params: MeasurementParams
    p: np.ndarray
    posterior_a: np.ndarray
    info: np.ndarray
    fidelity: np.ndarray
    joint_p: Optional[np.ndarray] = field(default=None, repr=False)
    joint_posterior_a: Optional[np.ndarray] = field(default=None, repr=False)
    joint_info: Optional[np.ndarray] = field(default=None, repr=False)
    joint_fidelity: Optional[np.ndarray] = field(default=None, repr=False)
    info_expected: Optional[np.ndarray] = None
    fidelity_expected: Optional[np.ndarray] = None
    skipped: tuple[HalfInt, ...] = ()

    @property
    def outcomes(self) -> list[HalfInt]:
        return self.params.j.projections()

    def expected_info_first(self) -> float:
        return float(np.sum(self.p * self.info))

    def expected_info_joint(self) -> float:
        return float(np.sum(self.joint_p * self.joint_info))


def analyze_first(pair: HypothesisPair, params: MeasurementParams) -> InfoRecord:
    """Bayesian update after the first measurement alone."""
    ta = measure(pair.state_a, params)
    tb = measure(pair.state_b, params)
    p, post_a = _posterior(ta.p, tb.p)
    info = H0 - binary_entropy(post_a)
    fid = ta.fidelity * post_a + tb.fidelity * (1 - post_a)
    return InfoRecord(params, p, post_a, info, fid)


def analyze_joint(pair: HypothesisPair, params: MeasurementParams) -> InfoRecord:
    """Add the reversing measurement: I(m, m'), F(m, m') and their expectations given m."""
    first = analyze_first(pair, params)
    ja = joint_measure(pair.state_a, params)
    jb = joint_measure(pair.state_b, params)
    pj, post_a = _posterior(ja.p, jb.p)
    info = H0 - binary_entropy(post_a)
    fid = ja.fidelity * post_a + jb.fidelity * (1 - post_a)

    keep = first.p >= P_SKIP
    safe = np.where(keep, first.p, 1.0)
    cond = pj / safe[:, None]
    info_exp = np.where(keep, np.sum(cond * info, axis=1), np.nan)
    fid_exp = np.where(keep, np.sum(cond * fid, axis=1), np.nan)
    skipped = tuple(m for m, k in zip(params.j.projections(), keep) if not k)
    return InfoRecord(
        params,
        first.p,
        first.posterior_a,
        first.info,
        first.fidelity,
        joint_p=pj,
        joint_posterior_a=post_a,
        joint_info=info,
        joint_fidelity=fid,
        info_expected=info_exp,
        fidelity_expected=fid_exp,
        skipped=skipped,
    )
