"""Newton refinement of the stationary profile equation and the box-size rule."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from src.core.config import settings
from src.core.errors import ConvergenceError, DegenerateWaveError, DivergenceError
from src.core.logger import get_logger
from src.lattice import Field, Grid, boundary_layer_mass, embed, functionals, laplacian_matrix
from src.minimize.profiles import Family, WaveProfile

log = get_logger("minimize.newton")

# Residual growth (relative to the seed) treated as divergence
DIVERGENCE_FACTOR = 1e3


def nonlinearity(values: np.ndarray, sigma: float) -> np.ndarray:
    """|phi|^{2 sigma} phi."""
    return np.abs(values) ** (2.0 * sigma) * values


def profile_residual(phi: Field, sigma: float, omega: float) -> np.ndarray:
    """-Delta phi + omega phi - phi^{2 sigma + 1}, flattened."""
    x = phi.vector
    laplacian = laplacian_matrix(phi.grid)
    return -(laplacian @ x) + omega * x - nonlinearity(x, sigma)


def residual_tolerance(phi: Field, sigma: float, tol: float) -> float:
    """Absolute tolerance on the residual, scaled by the size of the nonlinear term."""
    return tol * max(1.0, float(np.linalg.norm(nonlinearity(phi.vector, sigma))))


def schrodinger_block(grid: Grid, potential: np.ndarray, omega: float) -> np.ndarray:
    """Dense -Delta + omega + diag(potential)."""
    matrix = -laplacian_matrix(grid, dense=True)
    matrix[np.diag_indices_from(matrix)] += omega + np.ravel(potential)
    return matrix


def lplus_matrix(phi: Field, sigma: float, omega: float) -> np.ndarray:
    """L+ = -Delta + omega - (2 sigma + 1) phi^{2 sigma}: the Jacobian of the profile equation."""
    weight = np.abs(phi.vector) ** (2.0 * sigma)
    return schrodinger_block(phi.grid, -(2.0 * sigma + 1.0) * weight, omega)


def lminus_matrix(phi: Field, sigma: float, omega: float) -> np.ndarray:
    weight = np.abs(phi.vector) ** (2.0 * sigma)
    return schrodinger_block(phi.grid, -weight, omega)


def _solve_jacobian(jacobian: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
        try:
            return scipy.linalg.solve(jacobian, rhs, assume_a="sym")
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgWarning) as exc:
            raise DegenerateWaveError(f"Newton Jacobian L+ is singular: {exc}") from exc


def _profile_wave(phi: Field, sigma: float, omega: float, residual: float, iterations: int,
                  trivial: bool = False) -> WaveProfile:
    return WaveProfile(
        grid=phi.grid,
        sigma=sigma,
        field=phi,
        family=Family.PROFILE,
        parameter=omega,
        multiplier=None,
        residual=residual,
        functionals=functionals(phi, sigma, omega),
        phi=phi,
        omega=omega,
        iterations=iterations,
        is_trivial=trivial,
    )


def newton_refine(
    seed: WaveProfile | Field,
    sigma: float,
    omega: float,
    tol: float | None = None,
    max_iter: int | None = None,
) -> WaveProfile:
    """Root of the profile equation by Newton's method with the exact Jacobian L+.

    A zero seed returns the trivial wave, flagged as such. Raises DivergenceError when the
    first step does not reduce the residual or the iteration blows up.
    """
    tol = settings.newton_tol if tol is None else tol
    max_iter = settings.max_newton_iter if max_iter is None else max_iter
    phi = seed.phi if isinstance(seed, WaveProfile) else seed

    if not np.any(phi.values):
        log.info("trivial_solution", omega=omega, sigma=sigma)
        return _profile_wave(phi, sigma, omega, 0.0, 0, trivial=True)

    residual = profile_residual(phi, sigma, omega)
    norm = float(np.linalg.norm(residual))
    initial = norm
    for iteration in range(max_iter + 1):
        if norm <= residual_tolerance(phi, sigma, tol):
            log.debug("newton_converged", omega=omega, iterations=iteration, residual=norm)
            return _profile_wave(phi, sigma, omega, norm, iteration)
        if iteration == max_iter:
            break

        step = _solve_jacobian(lplus_matrix(phi, sigma, omega), residual)
        if not np.all(np.isfinite(step)):
            raise DivergenceError(f"non-finite Newton step at omega={omega}")
        phi = phi.with_values(phi.vector - step)
        residual = profile_residual(phi, sigma, omega)
        previous, norm = norm, float(np.linalg.norm(residual))

        if not np.isfinite(norm) or norm > DIVERGENCE_FACTOR * max(initial, 1.0):
            raise DivergenceError(f"Newton diverged at omega={omega}: residual {norm:.3e}")
        # near-converged seeds may stall at roundoff
        if iteration == 0 and norm >= previous > 10.0 * residual_tolerance(phi, sigma, tol):
            raise DivergenceError(
                f"seed outside the Newton basin at omega={omega}: "
                f"residual {previous:.3e} -> {norm:.3e}"
            )

    raise ConvergenceError(
        f"Newton did not converge in {max_iter} iterations at omega={omega} (residual {norm:.3e})"
    )


@dataclass(frozen=True)
class SecondOrderCheck:
    """Lowest eigenpairs of L+ at a wave."""

    morse_index: int
    lowest: float
    second: float
    escape_direction: np.ndarray | None


def second_order_check(phi: Field, sigma: float, omega: float) -> SecondOrderCheck:
    """Morse index of L+ restricted to its two lowest eigenvalues.

    A ground state has exactly one negative eigenvalue; a second one marks a saddle and comes
    with the eigenvector to leave it along.
    """
    matrix = lplus_matrix(phi, sigma, omega)
    count = min(2, matrix.shape[0])
    eigenvalues, eigenvectors = scipy.linalg.eigh(matrix, subset_by_index=[0, count - 1])
    threshold = -settings.negative_threshold
    index = int(np.sum(eigenvalues < threshold))
    second = float(eigenvalues[1]) if count > 1 else float("inf")
    direction = eigenvectors[:, 1].copy() if index >= 2 else None
    return SecondOrderCheck(index, float(eigenvalues[0]), second, direction)


def needs_larger_box(phi: Field) -> bool:
    """Mass in the outer layer exceeds boundary_mass_ratio * P."""
    mass = float(np.sum(phi.values**2))
    layer = boundary_layer_mass(phi, settings.boundary_layer)
    return layer > settings.boundary_mass_ratio * mass


def refine_with_box_rule(phi: Field, sigma: float, omega: float) -> WaveProfile:
    """Newton refinement, re-solved on a doubled box while the wave touches the boundary."""
    wave = newton_refine(phi, sigma, omega)
    while not wave.is_trivial and needs_larger_box(wave.phi):
        bigger = wave.grid.doubled()
        if bigger.size > settings.max_sites:
            log.warning(
                "box_doubling_capped",
                omega=omega,
                half_width=wave.grid.half_width,
                sites=bigger.size,
                max_sites=settings.max_sites,
            )
            return replace(wave, box_capped=True)
        log.info("box_doubled", omega=omega, half_width=bigger.half_width)
        wave = newton_refine(embed(wave.phi, bigger), sigma, omega)
    return wave
