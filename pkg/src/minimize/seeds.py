"""Initial fields for the solvers."""

from __future__ import annotations

import enum

import numpy as np

from src.lattice import Field, Grid


class SeedKind(enum.StrEnum):
    DELTA = "delta"
    GAUSSIAN = "gaussian"
    OFFSITE = "offsite"


def make_seed(grid: Grid, kind: SeedKind | str = SeedKind.DELTA, width: float = 1.0) -> Field:
    """Unnormalized nonnegative seed; solvers rescale it onto their constraint."""
    kind = SeedKind(kind)
    if kind is SeedKind.DELTA:
        return Field.delta(grid)
    if kind is SeedKind.GAUSSIAN:
        r2 = np.sum(grid.coordinates() ** 2, axis=1).reshape(grid.shape)
        return Field(grid, np.exp(-r2 / (2.0 * width**2)))
    # two equal sites: the origin and its neighbour along the first axis
    neighbour = (1,) + (0,) * (grid.dimension - 1)
    values = Field.delta(grid).values + Field.delta(grid, neighbour).values
    return Field(grid, values)


def jitter(seed: Field, amplitude: float, rng: np.random.Generator) -> Field:
    """Multiplicative noise on the support; breaks exact mirror symmetry of a seed."""
    if amplitude <= 0:
        return seed
    noise = 1.0 + amplitude * rng.uniform(-1.0, 1.0, size=seed.grid.shape)
    return seed.with_values(np.abs(seed.values) * noise)


def anticontinuum_seed(grid: Grid, sigma: float, omega: float) -> Field:
    """Exact single-site solution of the omega -> inf limit: phi_0 = (omega + 2d)^{1/(2 sigma)}."""
    return Field.delta(grid, amplitude=(omega + 2.0 * grid.dimension) ** (0.5 / sigma))


def sech_seed(grid: Grid, omega: float) -> Field:
    """Continuum cubic soliton sqrt(2 omega) sech(sqrt(omega) |n|) sampled on the lattice."""
    r = np.sqrt(np.sum(grid.coordinates() ** 2, axis=1)).reshape(grid.shape)
    return Field(grid, np.sqrt(2.0 * omega) / np.cosh(np.sqrt(omega) * r))
