"""Reversible measurements of a spin-s system read out through a spin-j probe.

The probe is prepared along (theta, phi), couples to the system through
exp(-2ig J_z S_z), and is read out in J_z.  Each outcome m acts on the
system as a diagonal operator; a second measurement with the probe along
(pi - theta, pi - phi) can undo the first one.
"""

from .spincore import HalfInt, SpinState, as_half_int, half_int_parse, rotate_state, wigner_matrix, wigner_small_d
from .measure import (
    CoefficientSet,
    MeasurementParams,
    OutcomeTable,
    coefficient_a,
    coefficients,
    information_condition,
    measure,
    measurement_operator,
    reversibility_condition,
)
from .reverse import (
    JointTable,
    final_state,
    joint_measure,
    recovery_probability,
    recovery_report,
    reversing_params,
)
from .prep import cat_state, coherent_x_state, prepare_coherent_equatorial, subspace_prepare
from .bayes import analyze_first, analyze_joint, make_hypothesis_pair
from .fluct import ProbeSuperposition, fluct_operator, fluct_reversal_check

__version__ = "0.1.0"
