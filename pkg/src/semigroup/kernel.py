"""Heat kernel K_j(t) of the 1-d discrete Laplacian and the semigroup e^{t Delta}.

K_j(t) = e^{-2t} t^j sum_k t^{2k} / (k! (k+j)!), even in j. Higher dimensions act
axis by axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from src.core.logger import get_logger
from src.lattice.grid import Boundary, Field, Grid

log = get_logger("semigroup.kernel")

# Series truncation: stop once the next term is below this fraction of the partial sum
SERIES_RTOL = 1e-18

# Safety cap on series length
MAX_SERIES_TERMS = 10_000


@dataclass(frozen=True, eq=False)
class HeatKernel:
    t: float
    cutoff: int
    coefficients: np.ndarray  # K_0 .. K_cutoff
    truncation_bound: float

    def at(self, offsets: np.ndarray | int) -> np.ndarray:
        """K at arbitrary integer offsets; zero beyond the cutoff."""
        idx = np.abs(np.asarray(offsets))
        out = np.zeros(idx.shape)
        inside = idx <= self.cutoff
        out[inside] = self.coefficients[idx[inside]]
        return out

    @property
    def total(self) -> float:
        return float(self.coefficients[0] + 2.0 * np.sum(self.coefficients[1:]))


def _coefficient(t: float, j: int) -> float:
    # Leading term in log space; later terms by the ratio t^2 / ((k+1)(k+j+1))
    term = math.exp(-2.0 * t + j * math.log(t) - math.lgamma(j + 1))
    total = term
    for k in range(MAX_SERIES_TERMS):
        ratio = t * t / ((k + 1) * (k + j + 1))
        term *= ratio
        total += term
        if ratio < 1.0 and term < SERIES_RTOL * total:
            break
    return total


def heat_kernel(t: float, cutoff: int) -> HeatKernel:
    if t <= 0:
        raise ValueError(f"heat kernel needs t > 0, got {t}")
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    coefficients = np.array([_coefficient(t, j) for j in range(cutoff + 1)])
    coefficients.setflags(write=False)
    total = coefficients[0] + 2.0 * np.sum(coefficients[1:])
    return HeatKernel(
        t=t,
        cutoff=cutoff,
        coefficients=coefficients,
        truncation_bound=max(0.0, 1.0 - float(total)),
    )


def tail_cutoff(t: float) -> int:
    """Offset beyond which K_j(t) is below double precision relative to K_0."""
    return int(math.ceil(6.0 * t)) + 40


@lru_cache(maxsize=256)
def heat_operator(grid: Grid, t: float) -> np.ndarray:
    """1-d matrix of e^{t Delta} on one axis of the box.

    Periodic boxes wrap the kernel. Zero boxes use odd images about the two walls just
    outside the box, which reproduces the exponential of the truncated Laplacian.
    """
    side = grid.side
    i = np.arange(side)[:, None]
    j = np.arange(side)[None, :]
    if grid.boundary is Boundary.PERIODIC:
        period = side
        kernel = heat_kernel(t, tail_cutoff(t) + period)
        images = kernel.cutoff // period + 1
        matrix = sum(kernel.at(i - j + q * period) for q in range(-images, images + 1))
    else:
        period = 2 * (side + 1)
        kernel = heat_kernel(t, tail_cutoff(t) + period)
        images = kernel.cutoff // period + 1
        matrix = sum(
            kernel.at(i - j + q * period) - kernel.at(i + j + 2 + q * period)
            for q in range(-images, images + 1)
        )
    matrix = np.asarray(matrix, dtype=float)
    matrix.setflags(write=False)
    return matrix


def apply_axis_operators(operators: np.ndarray, values: np.ndarray, dimension: int) -> np.ndarray:
    """Apply a stack of 1-d operators (M, side, side) to a stack of fields (M, *shape)."""
    out = values
    for axis in range(dimension):
        moved = np.moveaxis(out, axis + 1, -1)
        moved = np.einsum("mij,m...j->m...i", operators, moved)
        out = np.moveaxis(moved, -1, axis + 1)
    return out


def apply_heat_semigroup(f: Field, t: float) -> Field:
    if t <= 0:
        raise ValueError(f"semigroup time must be positive, got {t}")
    operator = heat_operator(f.grid, float(t))
    out = apply_axis_operators(operator[None], f.values[None], f.grid.dimension)[0]
    return f.with_values(out)
