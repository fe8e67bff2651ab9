"""Discrete Szego rearrangement and its brute-force oracles."""

from src.rearrange.szego import (
    PermutationReport,
    Sequence1D,
    SzegoReport,
    check_permutation_inequality,
    check_szego,
    edge_energy,
    is_bell_shaped,
    symmetric_decreasing_rearrangement,
)

__all__ = [
    "PermutationReport",
    "Sequence1D",
    "SzegoReport",
    "check_permutation_inequality",
    "check_szego",
    "edge_energy",
    "is_bell_shaped",
    "symmetric_decreasing_rearrangement",
]
