"""fracmax: fractional maximal operators, q-variation and lattice ball geometry.

A desk-scale numerical laboratory.  The library side provides exact (or
certified lower-bound) evaluation of discrete and continuous fractional
maximal operators together with the geometric and variational quantities
they are measured against; the experiment side provides seeded,
replayable verification harnesses for the governing inequalities.
"""

__version__ = "0.1.0"

from .core import EvaluationWindow, GradientField, LatticeFunction, gradient, lp_norm
from .omega import ConvexBody, OmegaConstants, count_lattice, count_lattice_plus, enumerate_ball, estimate_constants, gauge
from .discrete import (
    MaximalResult,
    RadiusSet,
    argmax_radius_set,
    frac_integral,
    frac_max_1d_centered,
    frac_max_1d_uncentered,
    frac_max_nd_centered,
    frac_max_nd_uncentered,
)
from .variation import Partition, VariationValue, riesz_derivative_norm, var_q_discrete, var_q_partition
from .continuous import PiecewiseLinear1D, StepFunction1D, frac_max_cont, mollification_convergence, mollify

__all__ = [
    "EvaluationWindow",
    "LatticeFunction",
    "GradientField",
    "gradient",
    "lp_norm",
    "ConvexBody",
    "OmegaConstants",
    "gauge",
    "count_lattice",
    "count_lattice_plus",
    "enumerate_ball",
    "estimate_constants",
    "MaximalResult",
    "RadiusSet",
    "frac_max_1d_uncentered",
    "frac_max_1d_centered",
    "frac_max_nd_centered",
    "frac_max_nd_uncentered",
    "argmax_radius_set",
    "frac_integral",
    "Partition",
    "VariationValue",
    "var_q_discrete",
    "var_q_partition",
    "riesz_derivative_norm",
    "StepFunction1D",
    "PiecewiseLinear1D",
    "frac_max_cont",
    "mollify",
    "mollification_convergence",
]
