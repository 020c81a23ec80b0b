"""Reproducing-kernel spaces of Cauchy transforms of measures on the unit circle."""

from .errors import *  # noqa: F401,F403
from .trigpoly import AnalyticPoly, TrigPoly, cesaro_nonneg_approx, eval_trig, fejer_riesz_factor
from .measure import (
    CircleMeasure,
    Density,
    MomentSequence,
    Piece,
    classical_decompose_oracle,
    moments,
    random_measure,
    rn_derivative_oracle,
)
from .transform import (
    ContractiveFunction,
    Extremeness,
    b_from_measure,
    cauchy,
    clark_measure,
    fatou_scan,
    herglotz,
    is_extreme,
    mobius_gauge,
    radial_trace,
    szego_distance,
)
from .kernel import (
    DEFAULT_SEED,
    Domination,
    KernelGram,
    KernelMethod,
    coeff_kernel,
    default_points,
    dominates_rk,
    gram,
    kernel_eval,
    psd_check,
)
from .spaces import (
    SpacePair,
    complementary_kernel,
    lattice_split,
    pythagoras_check,
    shift_action_check,
    shift_operator,
    toeplitz_residual,
)
from .forms import FormDecomposition, FormPair, parallel_sum, resolvent_identity_residual, rn_extract, simon_decompose
from .decompose import (
    Invariance,
    Strategy,
    ac_mass_trace,
    halfcircle_example,
    invariance_classifier,
    lebesgue_decompose,
)
from .kernelpair import FiniteKernel, kernel_lebesgue, orthogonal_split_check

__version__ = "0.1.0"
