"""Constrained variational solvers, Newton refinement and frequency continuation."""

from src.minimize.continuation import ExcitationThreshold, continue_family, excitation_threshold
from src.minimize.curves import (
    HCurveReport,
    JCurveReport,
    c_curve,
    central_derivatives,
    check_h_properties,
    check_j_properties,
    h_curve,
    j_curve,
    mass_curve,
    mass_identity_errors,
    normalized_curves,
)
from src.minimize.homogeneous import homogeneous_from_profile, solve_homogeneous
from src.minimize.newton import (
    lminus_matrix,
    lplus_matrix,
    newton_refine,
    profile_residual,
    second_order_check,
)
from src.minimize.normalized import solve_normalized
from src.minimize.profiles import (
    ContinuationCurve,
    CurveName,
    CurveSample,
    Family,
    ScalarCurve,
    WaveProfile,
)
from src.minimize.seeds import SeedKind, anticontinuum_seed, make_seed, sech_seed
from src.minimize.shape import Centering, ShapeReport, szego_witness_check

__all__ = [
    "Centering",
    "ContinuationCurve",
    "CurveName",
    "CurveSample",
    "ExcitationThreshold",
    "Family",
    "HCurveReport",
    "JCurveReport",
    "ScalarCurve",
    "SeedKind",
    "ShapeReport",
    "WaveProfile",
    "anticontinuum_seed",
    "c_curve",
    "central_derivatives",
    "check_h_properties",
    "check_j_properties",
    "continue_family",
    "excitation_threshold",
    "h_curve",
    "homogeneous_from_profile",
    "j_curve",
    "lminus_matrix",
    "lplus_matrix",
    "make_seed",
    "mass_curve",
    "mass_identity_errors",
    "newton_refine",
    "normalized_curves",
    "profile_residual",
    "sech_seed",
    "second_order_check",
    "solve_homogeneous",
    "solve_normalized",
    "szego_witness_check",
]
