"""Discrete heat semigroup and the positivity-improving / Perron-Frobenius checks."""

from src.semigroup.kernel import HeatKernel, apply_heat_semigroup, heat_kernel
from src.semigroup.positivity import (
    PerronFrobeniusReport,
    PositivityReport,
    check_positivity_improving,
    ground_state_pf_check,
)

__all__ = [
    "HeatKernel",
    "PerronFrobeniusReport",
    "PositivityReport",
    "apply_heat_semigroup",
    "check_positivity_improving",
    "ground_state_pf_check",
    "heat_kernel",
]
