"""Mass, potential, kinetic energy, H and J of a lattice field."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from src.lattice.grid import Field, Grid
from src.lattice.operators import dirichlet_form


@dataclass(frozen=True)
class FunctionalValues:
    """P, V, kinetic, H = kinetic - V/(sigma+1) and J = kinetic + omega*P."""

    P: float
    V: float
    kinetic: float
    H: float
    J: float
    sigma: float
    omega: float

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


def potential_sum(f: Field, sigma: float) -> float:
    # |u| keeps fractional powers real
    return float(np.sum(np.abs(f.values) ** (2.0 * sigma + 2.0)))


def functionals(f: Field, sigma: float, omega: float = 0.0) -> FunctionalValues:
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    mass = float(np.sum(f.values**2))
    potential = potential_sum(f, sigma)
    kinetic = dirichlet_form(f)
    return FunctionalValues(
        P=mass,
        V=potential,
        kinetic=kinetic,
        H=kinetic - potential / (sigma + 1.0),
        J=kinetic + omega * mass,
        sigma=sigma,
        omega=omega,
    )


def norm_lp(f: Field, p: float) -> float:
    """l^p norm; p = inf gives the max-norm."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if np.isinf(p):
        return float(np.max(np.abs(f.values)))
    return float(np.sum(np.abs(f.values) ** p) ** (1.0 / p))


def homogeneous_quotient(f: Field, sigma: float, omega: float) -> float:
    """J[u] / ||u||_{2 sigma + 2}^2, invariant under u -> t u."""
    scale = norm_lp(f, 2.0 * sigma + 2.0)
    if scale == 0.0:
        raise ValueError("quotient undefined for the zero field")
    return functionals(f, sigma, omega).J / scale**2


def tent_witness(grid: Grid, lam: float) -> Field:
    """Trial sequence c (N^{-d/2} - |k|_1 N^{-1-d/2}) on |k|_1 <= N-1, scaled to mass lam.

    Its H is negative once N is large, whenever sigma < 2/d.
    """
    n, d = grid.half_width, grid.dimension
    k1 = grid.l1_distance()
    values = np.where(k1 <= n - 1, n ** (-d / 2) - k1 * n ** (-1 - d / 2), 0.0)
    values = np.clip(values, 0.0, None)
    values *= np.sqrt(lam / np.sum(values**2))
    return Field(grid, values)
