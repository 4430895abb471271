"""Half-integer bookkeeping, spin states and Wigner small-d matrices.

All spin labels are stored as twice their value so that projections index
arrays exactly.  Amplitude vectors are ordered by descending projection:
index 0 holds sigma = s, the last entry holds sigma = -s.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence, Union

import numpy as np

NORM_TOL = 1e-12
# above this 2j the alternating k-sum loses more than ~1e-12 to cancellation
KSUM_MAX_TWICE = 20

_HALF_INT_RE = re.compile(r"^\s*(-?\d+)(?:/(\d+))?\s*$")


@dataclass(frozen=True, order=True)
class HalfInt:
    """An exact integer or half-odd-integer, stored as ``twice`` its value."""

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, (int, np.integer)) or isinstance(self.twice, bool):
            raise TypeError(f"HalfInt.twice must be an integer, got {self.twice!r}")
        object.__setattr__(self, "twice", int(self.twice))

    @classmethod
    def parse(cls, text: str) -> "HalfInt":
        return half_int_parse(text)

    @property
    def value(self) -> float:
        return self.twice / 2

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __add__(self, other: "HalfInt") -> "HalfInt":
        return HalfInt(self.twice + as_half_int(other).twice)

    def __sub__(self, other: "HalfInt") -> "HalfInt":
        return HalfInt(self.twice - as_half_int(other).twice)

    def __abs__(self) -> "HalfInt":
        return HalfInt(abs(self.twice))

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def __repr__(self) -> str:
        return f"HalfInt({self})"

    def projections(self) -> list["HalfInt"]:
        """Projections j, j-1, ..., -j of a spin ``self``, descending."""
        if self.twice < 0:
            raise ValueError(f"spin must be non-negative, got {self}")
        return [HalfInt(t) for t in range(self.twice, -self.twice - 1, -2)]

    @property
    def dim(self) -> int:
        return self.twice + 1


HalfIntLike = Union[HalfInt, int, str, Fraction]


def half_int_parse(text: str) -> HalfInt:
    """Parse ``"INT"`` or ``"INT/2"`` (odd numerator) into a HalfInt."""
    m = _HALF_INT_RE.match(text)
    if m is None:
        raise ValueError(f"malformed half-integer: {text!r}")
    num = int(m.group(1))
    if m.group(2) is None:
        return HalfInt(2 * num)
    if m.group(2) != "2":
        raise ValueError(f"only denominators of 2 are allowed: {text!r}")
    if num % 2 == 0:
        raise ValueError(f"even numerator over 2 must be written as an integer: {text!r}")
    return HalfInt(num)


def as_half_int(x: HalfIntLike) -> HalfInt:
    """Coerce an exact spin label.  Floats are rejected on purpose."""
    if isinstance(x, HalfInt):
        return x
    if isinstance(x, str):
        return half_int_parse(x)
    if isinstance(x, bool):
        raise TypeError("booleans are not spin labels")
    if isinstance(x, (int, np.integer)):
        return HalfInt(2 * int(x))
    if isinstance(x, Fraction):
        if (2 * x).denominator != 1:
            raise ValueError(f"{x} is not a half-integer")
        return HalfInt(int(2 * x))
    raise TypeError(f"cannot interpret {x!r} as a half-integer")


def check_projection(j: HalfInt, m: HalfInt) -> None:
    if j.twice < 0:
        raise ValueError(f"spin must be non-negative, got {j}")
    if abs(m.twice) > j.twice or (j.twice - m.twice) % 2:
        raise ValueError(f"{m} is not a valid projection of spin {j}")


def index_of(j: HalfInt, m: HalfInt) -> int:
    """Array index of projection ``m`` in the descending layout of spin ``j``."""
    check_projection(j, m)
    return (j.twice - m.twice) // 2


def projection_values(j: HalfInt) -> np.ndarray:
    """Float projections j, ..., -j (for arithmetic only, never as labels)."""
    return np.arange(j.twice, -j.twice - 1, -2) / 2.0


@dataclass(frozen=True)
class SpinState:
    """Normalized pure state of a spin ``s`` in the S_z basis (descending)."""

    s: HalfInt
    amplitudes: np.ndarray

    def __post_init__(self):
        s = as_half_int(self.s)
        object.__setattr__(self, "s", s)
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.shape[0] != s.dim:
            raise ValueError(f"spin {s} needs {s.dim} amplitudes, got shape {amps.shape}")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, s: HalfIntLike, amplitudes: Sequence[complex]) -> "SpinState":
        """Build a state, rescaling ``amplitudes`` to unit norm."""
        amps = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("zero vector cannot be normalized")
        return cls(as_half_int(s), amps / norm)

    @classmethod
    def basis(cls, s: HalfIntLike, sigma: HalfIntLike) -> "SpinState":
        s = as_half_int(s)
        amps = np.zeros(s.dim, dtype=complex)
        amps[index_of(s, as_half_int(sigma))] = 1.0
        return cls(s, amps)

    @classmethod
    def equal(cls, s: HalfIntLike) -> "SpinState":
        """Real equal-weight superposition of all S_z eigenstates."""
        s = as_half_int(s)
        return cls(s, np.full(s.dim, 1 / math.sqrt(s.dim), dtype=complex))

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def sigmas(self) -> list[HalfInt]:
        return self.s.projections()

    def __len__(self) -> int:
        return self.amplitudes.shape[0]

    def __iter__(self) -> Iterator[complex]:
        return iter(self.amplitudes)

    def overlap(self, other: "SpinState") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "SpinState") -> float:
        return abs(self.overlap(other))


def _pow0(x: float, n: int) -> float:
    # 0**0 := 1 at the theta = 0, pi endpoints
    return 1.0 if n == 0 else x**n


def _ksum(j: HalfInt, mp: HalfInt, m: HalfInt, theta: float) -> float:
    # integer offsets: jpm = j + m, etc.
    jpm = (j.twice + m.twice) // 2
    jmmp = (j.twice - mp.twice) // 2
    m_minus_mp = (m.twice - mp.twice) // 2
    c = math.cos(theta / 2)
    s = math.sin(theta / 2)
    log_root = 0.5 * (
        math.lgamma(jpm + 1)
        + math.lgamma(j.twice - jpm + 1)
        + math.lgamma((j.twice + mp.twice) // 2 + 1)
        + math.lgamma(jmmp + 1)
    )
    total = 0.0
    for k in range(max(0, m_minus_mp), min(jpm, jmmp) + 1):
        log_den = (
            math.lgamma(jpm - k + 1)
            + math.lgamma(k + 1)
            + math.lgamma(jmmp - k + 1)
            + math.lgamma(k - m_minus_mp + 1)
        )
        sign = -1.0 if (k - m_minus_mp) % 2 else 1.0
        pc = _pow0(c, j.twice - 2 * k + m_minus_mp)
        ps = _pow0(s, 2 * k - m_minus_mp)
        total += sign * math.exp(log_root - log_den) * pc * ps
    return total


@lru_cache(maxsize=64)
def _jy_eigen(j_twice: int) -> tuple[np.ndarray, np.ndarray]:
    # J_y is tridiagonal; <m+1|J_y|m> = -i/2 sqrt(j(j+1) - m(m+1)) in the descending basis
    j = j_twice / 2
    m = j - np.arange(1, j_twice + 1)
    off = np.sqrt(j * (j + 1) - m * (m + 1)) / 2
    jy = np.zeros((j_twice + 1, j_twice + 1), dtype=complex)
    idx = np.arange(j_twice)
    jy[idx, idx + 1] = -1j * off
    jy[idx + 1, idx] = 1j * off
    w, v = np.linalg.eigh(jy)
    return w, v


def _spectral_matrix(j_twice: int, theta: float) -> np.ndarray:
    w, v = _jy_eigen(j_twice)
    return ((v * np.exp(-1j * w * theta)) @ v.conj().T).real


def wigner_small_d(j: HalfIntLike, mp: HalfIntLike, m: HalfIntLike, theta: float) -> float:
    """d^{(j)}_{m' m}(theta) = <j m'| exp(-i J_y theta) |j m>.

    For 2j <= 20 this is the finite k-sum with sign (-1)^(k - m + m') and
    factorials taken through log-gamma.  The sum alternates, so beyond that
    the value comes from the eigendecomposition of J_y instead.
    """
    j, mp, m = as_half_int(j), as_half_int(mp), as_half_int(m)
    check_projection(j, mp)
    check_projection(j, m)
    if j.twice <= KSUM_MAX_TWICE:
        return _ksum(j, mp, m, theta)
    return float(_spectral_matrix(j.twice, theta)[index_of(j, mp), index_of(j, m)])


def wigner_matrix(j: HalfIntLike, theta: float) -> np.ndarray:
    """Real (2j+1)x(2j+1) matrix D[i, k] = d^{(j)}_{m'_i m_k}(theta), descending order."""
    j = as_half_int(j)
    if j.twice > KSUM_MAX_TWICE:
        return _spectral_matrix(j.twice, theta)
    labels = j.projections()
    out = np.empty((j.dim, j.dim))
    for a, mp in enumerate(labels):
        for b, m in enumerate(labels):
            out[a, b] = _ksum(j, mp, m, theta)
    return out


def rotate_state(state: SpinState, theta: float, phi: float) -> SpinState:
    """Apply exp(-i S_z phi) exp(-i S_y theta) to ``state``."""
    d = wigner_matrix(state.s, theta)
    phases = np.exp(-1j * projection_values(state.s) * phi)
    amps = phases * (d @ state.amplitudes)
    # renormalize away round-off only; the rotation is orthogonal
    return SpinState(state.s, amps / np.linalg.norm(amps))
