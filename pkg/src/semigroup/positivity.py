"""Positivity improving of e^{t(Delta + V)} and the Perron-Frobenius ground-state check."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
from scipy.interpolate import BarycentricInterpolator

from src.core.logger import get_logger
from src.lattice.grid import Field, Grid
from src.lattice.operators import laplacian_matrix
from src.semigroup.kernel import apply_axis_operators, heat_operator

log = get_logger("semigroup.positivity")

# Collocation nodes per substep and Gauss-Legendre points per Duhamel integral
COLLOCATION_NODES = 12
QUADRATURE_POINTS = 12

# Picard (Duhamel fixed point) stopping rule
PICARD_TOL = 1e-12
MAX_PICARD_ITER = 200

# Eigenvalue clustering for multiplicity, and sign tolerance for the ground state
MULTIPLICITY_TOL = 1e-9
SIGN_TOL = 1e-9


@dataclass(frozen=True)
class PositivityReport:
    passed: bool
    t: float
    trials: int
    substeps: int
    min_value: float
    failures: list[str] = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class PerronFrobeniusReport:
    applicable: bool
    ground_eigenvalue: float
    multiplicity: int
    spectral_gap: float
    eigenvector: np.ndarray | None
    simple: bool
    sign_definite: bool

    @property
    def passed(self) -> bool:
        return (not self.applicable) or (self.simple and self.sign_definite)


def _chebyshev_lobatto(tau: float, count: int) -> np.ndarray:
    x = -np.cos(np.pi * np.arange(count) / (count - 1))
    return 0.5 * tau * (1.0 + x)


class DuhamelStepper:
    """One substep u(0) -> u(tau) of u' = Delta u + V u by Picard iteration on

    u(s) = e^{s Delta} u(0) + int_0^s e^{(s-r) Delta} [V u(r)] dr

    with u represented by its values at Chebyshev-Lobatto nodes on [0, tau].
    """

    def __init__(self, grid: Grid, potential: np.ndarray, tau: float) -> None:
        self.grid = grid
        self.potential = potential
        self.nodes = _chebyshev_lobatto(tau, COLLOCATION_NODES)
        gauss_x, gauss_w = np.polynomial.legendre.leggauss(QUADRATURE_POINTS)

        identity = np.eye(COLLOCATION_NODES)
        interpolation = []
        weights = []
        free_ops = []
        lag_ops = []
        for s in self.nodes:
            r = 0.5 * s * (1.0 + gauss_x)
            interpolation.append(BarycentricInterpolator(self.nodes, identity)(r))
            weights.append(0.5 * s * gauss_w)
            free_ops.append(self._operator(s))
            lag_ops.extend(self._operator(s - rk) for rk in r)
        self.interpolation = np.array(interpolation)  # (nodes, quad, nodes)
        self.weights = np.array(weights)  # (nodes, quad)
        self.free_ops = np.array(free_ops)
        self.lag_ops = np.array(lag_ops)  # (nodes * quad, side, side)

    def _operator(self, s: float) -> np.ndarray:
        if s <= 0.0:
            return np.eye(self.grid.side)
        return heat_operator(self.grid, float(s))

    def advance(self, u0: np.ndarray) -> tuple[np.ndarray, int]:
        d = self.grid.dimension
        stacked = np.broadcast_to(u0, (COLLOCATION_NODES, *u0.shape))
        free = apply_axis_operators(self.free_ops, stacked, d)
        current = free.copy()
        for iteration in range(1, MAX_PICARD_ITER + 1):
            at_quad = np.einsum("iql,l...->iq...", self.interpolation, current)
            forcing = (self.potential * at_quad).reshape(-1, *u0.shape)
            propagated = apply_axis_operators(self.lag_ops, forcing, d)
            propagated = propagated.reshape(COLLOCATION_NODES, QUADRATURE_POINTS, *u0.shape)
            updated = free + np.einsum("iq,iq...->i...", self.weights, propagated)
            change = np.sqrt(np.sum((updated - current) ** 2, axis=tuple(range(1, d + 1))))
            current = updated
            if float(np.max(change)) < PICARD_TOL:
                return current[-1], iteration
        log.warning("duhamel_not_converged", change=float(np.max(change)))
        return current[-1], MAX_PICARD_ITER


def evolve_schrodinger_semigroup(f: Field, potential: Field, t: float) -> tuple[Field, int]:
    """e^{t(Delta + V)} f by substeps of length < 1 / (2 ||V||_inf)."""
    vmax = float(np.max(np.abs(potential.values)))
    substeps = int(math.floor(2.0 * t * vmax)) + 1
    stepper = DuhamelStepper(f.grid, potential.values, t / substeps)
    u = f.values
    for _ in range(substeps):
        u, _iterations = stepper.advance(u)
    return f.with_values(u), substeps


def random_nonnegative_field(grid: Grid, rng: np.random.Generator) -> Field:
    """Uniform [0, 1] entries with one random site zeroed."""
    values = rng.uniform(0.0, 1.0, size=grid.size)
    values[rng.integers(grid.size)] = 0.0
    return Field(grid, values)


def check_positivity_improving(
    potential: Field,
    t: float,
    trials: int,
    seed: int = 0,
    initial: list[Field] | None = None,
) -> PositivityReport:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    grid = potential.grid
    fields = list(initial or [])
    fields += [
        random_nonnegative_field(grid, np.random.default_rng(seed + k))
        for k in range(trials - len(fields))
    ]

    failures: list[str] = []
    min_value = math.inf
    substeps = 0
    for k, f in enumerate(fields):
        evolved, substeps = evolve_schrodinger_semigroup(f, potential, t)
        lowest = float(np.min(evolved.values))
        min_value = min(min_value, lowest)
        if lowest <= 0.0:
            site = np.unravel_index(int(np.argmin(evolved.values)), grid.shape)
            failures.append(f"trial {k}: value {lowest:.3e} at array index {site}")

    passed = not failures
    if not passed:
        log.warning("positivity_check_failed", failures=len(failures), min_value=min_value)
    return PositivityReport(
        passed=passed,
        t=t,
        trials=len(fields),
        substeps=substeps,
        min_value=min_value,
        failures=failures,
    )


def schrodinger_matrix(potential: Field) -> np.ndarray:
    """Dense -Delta_disc + diag(potential) on the potential's grid."""
    lap = laplacian_matrix(potential.grid, dense=True)
    return -lap + np.diag(potential.vector)


def ground_state_pf_check(L: np.ndarray) -> PerronFrobeniusReport:
    if not np.allclose(L, L.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.max(np.abs(L))))):
        raise ValueError("operator matrix must be symmetric")
    eigenvalues, eigenvectors = la.eigh(L)
    ground = float(eigenvalues[0])
    gap = float(eigenvalues[1] - eigenvalues[0]) if len(eigenvalues) > 1 else math.inf
    if ground >= 0.0:
        log.info("pf_not_applicable", ground=ground)
        return PerronFrobeniusReport(
            applicable=False,
            ground_eigenvalue=ground,
            multiplicity=0,
            spectral_gap=gap,
            eigenvector=None,
            simple=False,
            sign_definite=False,
        )

    multiplicity = int(np.sum(np.abs(eigenvalues - ground) < MULTIPLICITY_TOL))
    g = eigenvectors[:, 0]
    if np.sum(g) < 0:
        g = -g
    sign_definite = bool(np.min(g) >= -SIGN_TOL * np.max(g))
    return PerronFrobeniusReport(
        applicable=True,
        ground_eigenvalue=ground,
        multiplicity=multiplicity,
        spectral_gap=gap,
        eigenvector=g,
        simple=multiplicity == 1,
        sign_definite=sign_definite,
    )
