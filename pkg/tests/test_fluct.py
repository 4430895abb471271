import math

import numpy as np
import pytest

from revspin.fluct import ProbeSuperposition, completeness_sum, fluct_operator, fluct_reversal_check
from revspin.measure import MeasurementParams, measurement_operator
from revspin.spincore import HalfInt

TWO = ProbeSuperposition({HalfInt(1): 2**-0.5, HalfInt(3): 2**-0.5})


def test_probe_validation():
    with pytest.raises(ValueError):
        ProbeSuperposition({HalfInt(1): 1.0, HalfInt(3): 1.0})
    with pytest.raises(ValueError):
        ProbeSuperposition({})
    assert [str(m) for m in TWO.outcomes()] == ["3/2", "1/2", "-1/2", "-3/2"]
    assert TWO.contributing(HalfInt(3)) == [HalfInt(3)]
    assert TWO.contributing(HalfInt(-1)) == [HalfInt(1), HalfInt(3)]
    with pytest.raises(ValueError):
        fluct_operator(TWO, 1.0, 0.3, 0.2, HalfInt(5))


def test_single_component_reduces_to_definite_spin():
    probe = ProbeSuperposition.single(HalfInt(5))
    p = MeasurementParams(HalfInt(5), 1.0, 0.3, 0.2)
    for m in p.j.projections():
        assert np.allclose(fluct_operator(probe, 1.0, 0.3, 0.2, m), measurement_operator(p, HalfInt(1), m), atol=1e-15)
    assert np.max(np.abs(completeness_sum(probe, 1.0, 0.3, 0.2) - np.eye(2))) < 1e-12


def test_completeness_fails_for_superposition():
    dev = np.max(np.abs(completeness_sum(TWO, math.pi / 5, math.pi / 7, 0.3) - np.eye(2)))
    assert dev == pytest.approx(0.6928872088281288, abs=1e-12)


def test_reversal_ratios():
    ratios = fluct_reversal_check(TWO, math.pi / 5, math.pi / 7, 0.3)
    for r in ratios.values():
        assert abs(r.good - 1) < 1e-10
    bad = ratios[HalfInt(1)].bad
    assert bad == pytest.approx(0.2959451869712035 - 0.2930243196283909j, abs=1e-12)
    assert abs(bad - 1) > 1e-3
    # only one component reaches |m| = 3/2, so the naive variant works there
    assert abs(ratios[HalfInt(3)].bad - 1) < 1e-12
