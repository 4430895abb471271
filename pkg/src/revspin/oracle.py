"""Brute-force probe (x) system simulator.

Nothing here uses the Wigner k-sum or the closed-form coefficients: the
probe rotations come from a scaling-and-squaring Taylor series of the
ladder-operator generators, and the Ising coupling from explicit phases.
It exists to check the closed forms at desk-scale dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spincore import HalfInt, HalfIntLike, SpinState, as_half_int, index_of, projection_values

MAX_JOINT_DIM = 4096
SERIES_TOL = 1e-18


def spin_operators(j: HalfIntLike) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(J_x, J_y, J_z) in units of hbar, descending J_z basis."""
    j = as_half_int(j)
    m = projection_values(j)
    jv = j.value
    # <m+1| J_+ |m> sits one row above m in descending order
    raise_ = np.zeros((j.dim, j.dim))
    for col in range(1, j.dim):
        raise_[col - 1, col] = math.sqrt(jv * (jv + 1) - m[col] * (m[col] + 1))
    lower = raise_.T
    jx = (raise_ + lower) / 2
    jy = (raise_ - lower) / 2j
    jz = np.diag(m)
    return jx.astype(complex), jy, jz.astype(complex)


def jy_generator(j: HalfIntLike) -> np.ndarray:
    """Real antisymmetric G with J_y = i G, so exp(-i J_y theta) = exp(theta G)."""
    _, jy, _ = spin_operators(j)
    return (jy / 1j).real


def expm_series(a: np.ndarray, tol: float = SERIES_TOL) -> np.ndarray:
    """Matrix exponential by scaling and squaring a truncated Taylor series."""
    a = np.asarray(a)
    norm = np.max(np.sum(np.abs(a), axis=1)) if a.size else 0.0
    squarings = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    scaled = a / (2.0**squarings)
    result = np.eye(a.shape[0], dtype=a.dtype)
    term = np.eye(a.shape[0], dtype=a.dtype)
    for k in range(1, 200):
        term = term @ scaled / k
        result = result + term
        if np.max(np.abs(term)) < tol:
            break
    for _ in range(squarings):
        result = result @ result
    return result


def rotation_y(j: HalfIntLike, theta: float) -> np.ndarray:
    """exp(-i J_y theta) from the series."""
    return expm_series(theta * jy_generator(j))


@dataclass(frozen=True)
class JointState:
    """Probe (x) system amplitudes, rows m = j..-j, columns sigma = s..-s."""

    j: HalfInt
    s: HalfInt
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


def probe_state(j: HalfIntLike, theta: float, phi: float) -> np.ndarray:
    """exp(-i J_z phi) exp(-i J_y theta) |j, j>."""
    j = as_half_int(j)
    top = np.zeros(j.dim)
    top[0] = 1.0
    vec = rotation_y(j, theta) @ top
    return np.exp(-1j * projection_values(j) * phi) * vec


def evolve(probe_init: tuple[float, float], system: SpinState, j: HalfIntLike, g: float) -> JointState:
    """Prepare the probe, couple it by exp(-2i g J_z S_z), then rotate it by pi/2 about y."""
    j = as_half_int(j)
    if j.dim * system.s.dim > MAX_JOINT_DIM:
        raise ValueError(f"joint dimension {j.dim * system.s.dim} exceeds the oracle cap {MAX_JOINT_DIM}")
    theta, phi = probe_init
    probe = probe_state(j, theta, phi)
    joint = np.outer(probe, system.amplitudes)
    m = projection_values(j)
    sigma = projection_values(system.s)
    joint = np.exp(-2j * g * np.outer(m, sigma)) * joint
    joint = rotation_y(j, math.pi / 2) @ joint
    return JointState(j, system.s, joint)


def projective_probe_measurement(joint: JointState, m: HalfIntLike) -> tuple[float, SpinState]:
    """Project the probe onto J_z = m; return probability and system state."""
    row = joint.amplitudes[index_of(joint.j, as_half_int(m))]
    p = float(np.sum(np.abs(row) ** 2))
    if p <= 0.0:
        raise ZeroDivisionError(f"outcome {m} has zero probability")
    return p, SpinState(joint.s, row / math.sqrt(p))


def two_stage(
    system: SpinState, j: HalfIntLike, g: float, first: tuple[float, float], second: tuple[float, float]
) -> tuple[np.ndarray, np.ndarray]:
    """Joint probabilities and fidelities of two sequential probe measurements.

    A fresh probe is prepared for the second stage.  Returns arrays indexed
    [first outcome, second outcome] in descending order.
    """
    j = as_half_int(j)
    outcomes = j.projections()
    probs = np.zeros((j.dim, j.dim))
    fids = np.zeros((j.dim, j.dim))
    stage1 = evolve(first, system, j, g)
    for a, m in enumerate(outcomes):
        row = stage1.amplitudes[a]
        p1 = float(np.sum(np.abs(row) ** 2))
        if p1 < 1e-300:
            continue
        post = SpinState(system.s, row / math.sqrt(p1))
        stage2 = evolve(second, post, j, g)
        for b, mp in enumerate(outcomes):
            row2 = stage2.amplitudes[b]
            p2 = float(np.sum(np.abs(row2) ** 2))
            probs[a, b] = p1 * p2
            if p2 >= 1e-300:
                fids[a, b] = abs(np.vdot(system.amplitudes, row2)) / math.sqrt(p2)
    return probs, fids
