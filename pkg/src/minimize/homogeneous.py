"""Minimizers of J = kinetic + omega P at fixed potential sum_n |u_n|^{2 sigma + 2} = 1."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import replace

import numpy as np

from src.core.config import settings
from src.core.errors import BoundViolationError, ConvergenceError, DivergenceError
from src.core.logger import get_logger
from src.lattice import Field, Grid, embed, functionals, laplacian_matrix, norm_lp
from src.minimize.descent import projected_descent
from src.minimize.newton import nonlinearity, refine_with_box_rule, second_order_check
from src.minimize.profiles import Family, WaveProfile
from src.minimize.seeds import SeedKind, jitter, make_seed

log = get_logger("minimize.homogeneous")

# Size of the kick along the second negative direction of L+, relative to max |u|
ESCAPE_KICK = 0.1

Vector = np.ndarray


def _problem(
    grid: Grid, sigma: float, omega: float
) -> tuple[Callable[[Vector], float], Callable[[Vector], Vector], Callable[[Vector], Vector]]:
    operator = -laplacian_matrix(grid)
    q = 2.0 * sigma + 2.0

    def retract(u: Vector) -> Vector:
        return u / np.sum(np.abs(u) ** q) ** (1.0 / q)

    def objective(u: Vector) -> float:
        scale = np.sum(np.abs(u) ** q) ** (2.0 / q)
        return float(u @ (operator @ u) + omega * (u @ u)) / scale

    def residual(u: Vector) -> Vector:
        a_u = operator @ u + omega * u
        return a_u - float(u @ a_u) * nonlinearity(u, sigma)

    return objective, residual, retract


def homogeneous_from_profile(wave: WaveProfile, sigma: float, omega: float) -> WaveProfile:
    """Recover (u, j) from phi = j^{1/(2 sigma)} u and check omega < j < omega + 2d."""
    phi = wave.phi
    scale = norm_lp(phi, 2.0 * sigma + 2.0)
    if scale == 0.0:
        raise ConvergenceError(f"profile at omega={omega} collapsed to the trivial wave")
    u = phi.with_values(phi.values / scale)
    values = functionals(u, sigma, omega)
    j = values.J
    upper = omega + 2.0 * phi.grid.dimension
    if not omega < j < upper:
        raise BoundViolationError(f"j({omega}) = {j:.12g} outside ({omega}, {upper})")
    return WaveProfile(
        grid=phi.grid,
        sigma=sigma,
        field=u,
        family=Family.HOMOGENEOUS,
        parameter=omega,
        multiplier=j,
        residual=wave.residual,
        functionals=values,
        phi=phi,
        omega=omega,
        iterations=wave.iterations,
        box_capped=wave.box_capped,
        notes=wave.notes,
    )


def solve_homogeneous(
    grid: Grid,
    sigma: float,
    omega: float,
    seed: Field | None = None,
    rng: np.random.Generator | None = None,
) -> WaveProfile:
    """Ground state at frequency omega through the fixed-potential problem.

    Projected gradient on the l^{2 sigma + 2} sphere until the residual drops below
    gradient_tol, then Newton on the rescaled profile. A result with two negative
    eigenvalues of L+ is a saddle: kick along the second one and descend again.
    """
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")

    rng = rng if rng is not None else np.random.default_rng(settings.random_seed)
    start = seed if seed is not None else make_seed(grid, SeedKind.DELTA)
    if start.grid.half_width > grid.half_width:
        grid = start.grid
    elif start.grid != grid:
        start = embed(start, grid)
    u0 = jitter(start, settings.seed_jitter, rng).vector
    if not np.any(u0):
        raise ValueError("seed must not vanish identically")

    escapes = 0
    iterations = 0
    while True:
        objective, residual, retract = _problem(grid, sigma, omega)
        result = projected_descent(
            u0,
            objective,
            residual,
            retract,
            tol=settings.gradient_tol,
            max_iter=settings.max_gradient_iter,
            abs_every=settings.abs_projection_every,
        )
        iterations += result.iterations
        if not result.converged:
            log.warning(
                "gradient_not_converged",
                omega=omega,
                sigma=sigma,
                residual=result.residual_norm,
            )

        phi = Field(grid, result.value ** (0.5 / sigma) * result.u)
        try:
            wave = refine_with_box_rule(phi, sigma, omega)
        except (ConvergenceError, DivergenceError) as exc:
            raise ConvergenceError(f"homogeneous solve failed at omega={omega}: {exc}") from exc
        iterations += wave.iterations

        check = second_order_check(wave.phi, sigma, omega)
        if check.escape_direction is None:
            break
        if escapes >= settings.max_saddle_escapes:
            raise ConvergenceError(
                f"stuck at a saddle with Morse index {check.morse_index} at omega={omega}"
            )
        escapes += 1
        log.info("saddle_escape", omega=omega, morse_index=check.morse_index, attempt=escapes)
        grid = wave.grid
        u = wave.phi.vector / norm_lp(wave.phi, 2.0 * sigma + 2.0)
        u0 = u + ESCAPE_KICK * float(np.max(np.abs(u))) * check.escape_direction

    result_wave = homogeneous_from_profile(wave, sigma, omega)
    log.info(
        "homogeneous_converged",
        omega=omega,
        sigma=sigma,
        j=result_wave.multiplier,
        residual=result_wave.residual,
        iterations=iterations,
        half_width=result_wave.grid.half_width,
    )
    return replace(result_wave, iterations=iterations)
