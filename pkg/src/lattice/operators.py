"""Discrete Laplacian, its quadratic form and its assembled matrix."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from src.lattice.grid import Boundary, Field, Grid


def apply_laplacian(f: Field) -> Field:
    """(Delta f)_n = sum_{|j-n|=1} f_j - 2d f_n.

    Out-of-box neighbors are zero for the zero boundary and wrap for the periodic one.
    """
    u = f.values
    out = -2.0 * f.grid.dimension * u
    for axis in range(f.grid.dimension):
        if f.grid.boundary is Boundary.PERIODIC:
            out = out + np.roll(u, 1, axis=axis) + np.roll(u, -1, axis=axis)
            continue
        forward = np.zeros_like(u)
        backward = np.zeros_like(u)
        head = [slice(None)] * u.ndim
        tail = [slice(None)] * u.ndim
        head[axis] = slice(0, -1)
        tail[axis] = slice(1, None)
        forward[tuple(head)] = u[tuple(tail)]
        backward[tuple(tail)] = u[tuple(head)]
        out = out + forward + backward
    return f.with_values(out)


def dirichlet_form(f: Field) -> float:
    """Sum over undirected nearest-neighbor edges of |u_j - u_n|^2.

    With the zero boundary the edges leaving the box count against the implicit zeros,
    so the value equals <-Delta f, f>.
    """
    u = f.values
    total = 0.0
    for axis in range(f.grid.dimension):
        if f.grid.boundary is Boundary.PERIODIC:
            jumps = u - np.roll(u, 1, axis=axis)
        else:
            pad = [(0, 0)] * u.ndim
            pad[axis] = (1, 1)
            jumps = np.diff(np.pad(u, pad), axis=axis)
        total += float(np.sum(jumps**2))
    return total


def _second_difference(grid: Grid) -> sp.csr_matrix:
    n = grid.side
    d2 = sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(n, n), format="lil")
    if grid.boundary is Boundary.PERIODIC:
        d2[0, n - 1] += 1.0
        d2[n - 1, 0] += 1.0
    return d2.tocsr()


def laplacian_matrix(grid: Grid, dense: bool = False) -> sp.csr_matrix | np.ndarray:
    """Delta_disc assembled as a Kronecker sum of 1-d second differences (row-major)."""
    d2 = _second_difference(grid)
    eye = sp.identity(grid.side, format="csr")
    total = sp.csr_matrix((grid.size, grid.size))
    for axis in range(grid.dimension):
        factors = [d2 if k == axis else eye for k in range(grid.dimension)]
        term = factors[0]
        for factor in factors[1:]:
            term = sp.kron(term, factor, format="csr")
        total = total + term
    return total.toarray() if dense else total.tocsr()
