import math
from fractions import Fraction

import numpy as np
import pytest

from revspin import oracle
from revspin.spincore import (
    HalfInt,
    SpinState,
    as_half_int,
    half_int_parse,
    index_of,
    projection_values,
    rotate_state,
    wigner_matrix,
    wigner_small_d,
)


@pytest.mark.parametrize("text,twice", [("21/2", 21), ("-3/2", -3), ("0", 0), ("7", 14), ("-1/2", -1)])
def test_half_int_parse(text, twice):
    h = half_int_parse(text)
    assert h.twice == twice
    assert half_int_parse(str(h)) == h


@pytest.mark.parametrize("text", ["4/2", "1/3", "1.5", "", "x", "1/2/2", "- 1/2"])
def test_half_int_parse_rejects(text):
    with pytest.raises(ValueError):
        half_int_parse(text)


def test_as_half_int_accepts_exact_types_only():
    assert as_half_int(Fraction(3, 2)) == HalfInt(3)
    assert as_half_int(2) == HalfInt(4)
    assert as_half_int("5/2") == HalfInt(5)
    with pytest.raises(TypeError):
        as_half_int(1.5)
    with pytest.raises(TypeError):
        as_half_int(True)


def test_projection_layout_descends():
    j = HalfInt(3)
    assert [str(m) for m in j.projections()] == ["3/2", "1/2", "-1/2", "-3/2"]
    assert np.array_equal(projection_values(j), [1.5, 0.5, -0.5, -1.5])
    assert index_of(j, HalfInt(-1)) == 2
    with pytest.raises(ValueError):
        index_of(j, HalfInt(2))


def test_spin_state_norm_is_checked():
    with pytest.raises(ValueError):
        SpinState(HalfInt(1), [1.0, 1.0])
    st = SpinState.from_amplitudes(HalfInt(1), [1.0, 1.0])
    assert np.allclose(st.weights, [0.5, 0.5])
    with pytest.raises(ValueError):
        st.amplitudes[0] = 0.0


def test_small_d_identity_at_zero():
    for twice in range(0, 9):
        assert np.allclose(wigner_matrix(HalfInt(twice), 0.0), np.eye(twice + 1), atol=1e-15)


def test_small_d_spin_half():
    th = 0.83
    assert wigner_small_d(HalfInt(1), HalfInt(1), HalfInt(1), th) == pytest.approx(math.cos(th / 2), abs=1e-15)
    assert wigner_small_d(HalfInt(1), HalfInt(1), HalfInt(-1), th) == pytest.approx(-math.sin(th / 2), abs=1e-15)


def test_small_d_spin_one_off_diagonal_sign():
    # d^1_{0,1}(pi/2) = +1/sqrt2 and d^1_{1,0}(pi/2) = -1/sqrt2, as the generator exponential gives
    root = 1 / math.sqrt(2)
    assert wigner_small_d(HalfInt(2), HalfInt(0), HalfInt(2), math.pi / 2) == pytest.approx(root, abs=1e-15)
    assert wigner_small_d(HalfInt(2), HalfInt(2), HalfInt(0), math.pi / 2) == pytest.approx(-root, abs=1e-15)
    brute = oracle.rotation_y(HalfInt(2), math.pi / 2)
    assert brute[1, 0].real == pytest.approx(root, abs=1e-14)


def test_small_d_frozen_value():
    assert wigner_small_d(HalfInt(4), HalfInt(2), HalfInt(-2), 0.7) == pytest.approx(0.29743752219212394, abs=1e-14)


@pytest.mark.parametrize("twice", [1, 2, 3, 6, 9])
def test_small_d_matches_generator_exponential(twice):
    for th in (0.4, 1.7, 3.0):
        assert np.max(np.abs(wigner_matrix(HalfInt(twice), th) - oracle.rotation_y(HalfInt(twice), th))) < 1e-12


def test_small_d_is_orthogonal_for_large_j():
    d = wigner_matrix(HalfInt(100), 1.1)
    assert np.max(np.abs(d @ d.T - np.eye(101))) < 1e-10


def test_rotate_state_spin_half():
    up = SpinState.basis(HalfInt(1), HalfInt(1))
    phi = 0.6
    st = rotate_state(up, math.pi / 2, phi)
    expect = np.array([np.exp(-0.5j * phi), np.exp(0.5j * phi)]) / math.sqrt(2)
    assert np.allclose(st.amplitudes, expect, atol=1e-15)
