"""Truncated Z^d lattices, fields, the discrete Laplacian and the energy functionals."""

from src.lattice.functionals import (
    FunctionalValues,
    functionals,
    homogeneous_quotient,
    norm_lp,
    potential_sum,
    tent_witness,
)
from src.lattice.grid import Boundary, Field, Grid, boundary_layer_mass, embed
from src.lattice.operators import apply_laplacian, dirichlet_form, laplacian_matrix

__all__ = [
    "Boundary",
    "Field",
    "FunctionalValues",
    "Grid",
    "apply_laplacian",
    "boundary_layer_mass",
    "dirichlet_form",
    "embed",
    "functionals",
    "homogeneous_quotient",
    "laplacian_matrix",
    "norm_lp",
    "potential_sum",
    "tent_witness",
]
