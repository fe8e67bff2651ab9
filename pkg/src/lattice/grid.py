"""Lattice geometry and real-valued fields on a truncated box of Z^d."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

# Supported lattice dimensions
MAX_DIMENSION = 3


class Boundary(enum.StrEnum):
    ZERO = "zero"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class Grid:
    """Box {n in Z^d : |n_i| <= N} with a fixed boundary convention."""

    dimension: int
    half_width: int
    boundary: Boundary = Boundary.ZERO

    def __post_init__(self) -> None:
        if not 1 <= self.dimension <= MAX_DIMENSION:
            raise ValueError(f"dimension must be in 1..{MAX_DIMENSION}, got {self.dimension}")
        if self.half_width < 1:
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    @property
    def side(self) -> int:
        return 2 * self.half_width + 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.side,) * self.dimension

    @property
    def size(self) -> int:
        return self.side**self.dimension

    @property
    def origin(self) -> tuple[int, ...]:
        """Array index of the lattice site n = 0."""
        return (self.half_width,) * self.dimension

    def array_index(self, site: tuple[int, ...]) -> tuple[int, ...]:
        if len(site) != self.dimension:
            raise ValueError(f"site {site} has wrong dimension for {self.dimension}-d grid")
        if any(abs(k) > self.half_width for k in site):
            raise ValueError(f"site {site} lies outside the box |n_i| <= {self.half_width}")
        return tuple(k + self.half_width for k in site)

    def coordinates(self) -> np.ndarray:
        """Lattice indices of every site, shape (size, d), row-major order."""
        axis = range(-self.half_width, self.half_width + 1)
        return np.array(list(itertools.product(axis, repeat=self.dimension)), dtype=int)

    def sup_distance(self) -> np.ndarray:
        """max_i |n_i| for every site, laid out on the grid shape."""
        axis = np.abs(np.arange(-self.half_width, self.half_width + 1))
        grids = np.meshgrid(*([axis] * self.dimension), indexing="ij")
        return np.maximum.reduce(grids) if self.dimension > 1 else grids[0]

    def l1_distance(self) -> np.ndarray:
        axis = np.abs(np.arange(-self.half_width, self.half_width + 1))
        grids = np.meshgrid(*([axis] * self.dimension), indexing="ij")
        return np.sum(grids, axis=0)

    def doubled(self) -> Grid:
        return Grid(self.dimension, 2 * self.half_width, self.boundary)


@dataclass(frozen=True, eq=False)
class Field:
    """Real scalar per lattice site, stored on the grid shape (row-major when flattened)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.size != self.grid.size:
            raise ValueError(
                f"field has {values.size} values, grid {self.grid.shape} needs {self.grid.size}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        values = values.reshape(self.grid.shape).copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: Grid) -> Field:
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid: Grid, value: float) -> Field:
        return cls(grid, np.full(grid.shape, value))

    @classmethod
    def delta(
        cls, grid: Grid, site: tuple[int, ...] | None = None, amplitude: float = 1.0
    ) -> Field:
        """amplitude * e_site; the origin by default."""
        values = np.zeros(grid.shape)
        index = grid.origin if site is None else grid.array_index(site)
        values[index] = amplitude
        return cls(grid, values)

    @property
    def vector(self) -> np.ndarray:
        return self.values.ravel()

    def with_values(self, values: np.ndarray) -> Field:
        return Field(self.grid, values)

    def __getitem__(self, site: tuple[int, ...] | int) -> float:
        key = (site,) if isinstance(site, int) else site
        return float(self.values[self.grid.array_index(key)])


def embed(field: Field, grid: Grid) -> Field:
    """Place a field in the center of a larger (or equal) box, zero elsewhere."""
    if grid.dimension != field.grid.dimension:
        raise ValueError("cannot embed across dimensions")
    offset = grid.half_width - field.grid.half_width
    if offset < 0:
        raise ValueError("target grid is smaller than the field's grid")
    values = np.zeros(grid.shape)
    window = tuple(slice(offset, offset + field.grid.side) for _ in range(grid.dimension))
    values[window] = field.values
    return Field(grid, values)


def boundary_layer_mass(field: Field, width: int = 2) -> float:
    """Mass sum u_n^2 over the sites with |n|_inf >= N - width."""
    mask = field.grid.sup_distance() >= field.grid.half_width - width
    return float(np.sum(field.values[mask] ** 2))
