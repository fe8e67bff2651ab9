"""Linearized operators, spectra, Morse indices and the stability criteria."""

from src.spectra.criteria import (
    VKResult,
    s_function,
    slope_criterion,
    slope_from_j,
    vk_analysis,
    vk_inner_product,
)
from src.spectra.operators import LinearizedPair, assemble_pair
from src.spectra.spectrum import (
    MorseIndices,
    OperatorReport,
    SpectrumMethod,
    block_identity_error,
    linearized_spectrum,
    max_real_part,
    morse_indices,
    operator_report,
    quadruple_symmetry_error,
)
from src.spectra.verdict import StabilityReport, Verdict, stability_verdict

__all__ = [
    "LinearizedPair",
    "MorseIndices",
    "OperatorReport",
    "SpectrumMethod",
    "StabilityReport",
    "VKResult",
    "Verdict",
    "assemble_pair",
    "block_identity_error",
    "linearized_spectrum",
    "max_real_part",
    "morse_indices",
    "operator_report",
    "quadruple_symmetry_error",
    "s_function",
    "slope_criterion",
    "slope_from_j",
    "stability_verdict",
    "vk_analysis",
    "vk_inner_product",
]
