"""Minimizers of H at fixed mass ||u||^2 = lambda and their Lagrange multiplier c(lambda)."""

from __future__ import annotations

import numpy as np
import scipy.linalg

from src.core.config import settings
from src.core.errors import (
    ConvergenceError,
    DegenerateWaveError,
    DivergenceError,
    IllPosedError,
    VanishingError,
)
from src.core.logger import get_logger
from src.lattice import Field, Grid, embed, functionals, laplacian_matrix
from src.minimize.descent import projected_descent
from src.minimize.newton import (
    lplus_matrix,
    needs_larger_box,
    nonlinearity,
    profile_residual,
    residual_tolerance,
    second_order_check,
)
from src.minimize.profiles import Family, WaveProfile
from src.minimize.seeds import SeedKind, jitter, make_seed

log = get_logger("minimize.normalized")

# Relative disagreement between the Newton multiplier and (V - kinetic)/lambda that is logged
MULTIPLIER_RTOL = 1e-8

# Kick along the second negative direction of L+, relative to max |u|
ESCAPE_KICK = 0.1


def critical_sigma(dimension: int) -> float:
    return 2.0 / dimension


def multiplier(u: Field, sigma: float, lam: float) -> float:
    """c with lambda c = V - kinetic."""
    values = functionals(u, sigma)
    return (values.V - values.kinetic) / lam


def _descend(grid: Grid, sigma: float, lam: float, u0: np.ndarray) -> tuple[np.ndarray, float, int]:
    laplacian = laplacian_matrix(grid)
    q = 2.0 * sigma + 2.0

    def retract(u: np.ndarray) -> np.ndarray:
        return np.sqrt(lam) * u / np.linalg.norm(u)

    def objective(u: np.ndarray) -> float:
        return float(-(u @ (laplacian @ u)) - np.sum(np.abs(u) ** q) / (sigma + 1.0))

    def residual(u: np.ndarray) -> np.ndarray:
        gradient = -(laplacian @ u) - nonlinearity(u, sigma)
        return gradient - (float(u @ gradient) / lam) * u

    result = projected_descent(
        u0,
        objective,
        residual,
        retract,
        tol=settings.gradient_tol,
        max_iter=settings.max_gradient_iter,
        abs_every=settings.abs_projection_every,
    )
    if not result.converged:
        log.warning("gradient_not_converged", lam=lam, sigma=sigma, residual=result.residual_norm)
    return result.u, result.value, result.iterations


def bordered_newton(u: Field, c: float, sigma: float, lam: float) -> tuple[Field, float, int]:
    """Newton on (u, c) for -Delta u + c u - u^{2 sigma + 1} = 0, ||u||^2 = lambda.

    Jacobian [[L+(c), u], [u^T, 0]].
    """
    n = u.grid.size
    initial = None
    for iteration in range(settings.max_newton_iter + 1):
        f_wave = profile_residual(u, sigma, c)
        f_mass = 0.5 * (float(u.vector @ u.vector) - lam)
        norm = float(np.linalg.norm(f_wave))
        initial = norm if initial is None else initial
        if norm <= residual_tolerance(u, sigma, settings.newton_tol) and abs(f_mass) <= (
            settings.newton_tol * lam
        ):
            return u, c, iteration
        if iteration == settings.max_newton_iter:
            break
        if not np.isfinite(norm) or norm > 1e3 * max(initial, 1.0):
            raise DivergenceError(f"bordered Newton diverged at lambda={lam}")

        jacobian = np.zeros((n + 1, n + 1))
        jacobian[:n, :n] = lplus_matrix(u, sigma, c)
        jacobian[:n, n] = u.vector
        jacobian[n, :n] = u.vector
        try:
            step = scipy.linalg.solve(jacobian, np.append(f_wave, f_mass), assume_a="sym")
        except np.linalg.LinAlgError as exc:
            raise DegenerateWaveError(f"bordered Jacobian singular at lambda={lam}") from exc
        u = u.with_values(u.vector - step[:n])
        c -= float(step[n])

    raise ConvergenceError(f"bordered Newton did not converge at lambda={lam}")


def _refine(u: Field, sigma: float, lam: float) -> tuple[Field, float, int, bool]:
    """Bordered Newton, repeated on a doubled box while the wave reaches the boundary."""
    u, c, iterations = bordered_newton(u, multiplier(u, sigma, lam), sigma, lam)
    while needs_larger_box(u):
        bigger = u.grid.doubled()
        if bigger.size > settings.max_sites:
            log.warning("box_doubling_capped", lam=lam, half_width=u.grid.half_width)
            return u, c, iterations, True
        log.info("box_doubled", lam=lam, half_width=bigger.half_width)
        u, c, more = bordered_newton(embed(u, bigger), c, sigma, lam)
        iterations += more
    return u, c, iterations, False


def solve_normalized(
    grid: Grid,
    sigma: float,
    lam: float,
    seed: Field | None = None,
    allow_supercritical: bool = False,
    rng: np.random.Generator | None = None,
) -> WaveProfile:
    """Constrained minimizer of H on the sphere ||u||^2 = lambda.

    Refuses sigma >= 2/d unless `allow_supercritical`; there the infimum is only attained for
    large lambda and a spreading minimizer (H >= 0) is reported as VanishingError.
    """
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if sigma >= critical_sigma(grid.dimension) and not allow_supercritical:
        raise IllPosedError(
            f"fixed-mass minimization is ill-posed for sigma={sigma} >= 2/d="
            f"{critical_sigma(grid.dimension):g}; "
            "pass the supercritical override to try large lambda"
        )

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
        vector, energy, steps = _descend(grid, sigma, lam, u0)
        iterations += steps
        if energy >= 0.0:
            log.warning("normalized_vanishing", lam=lam, sigma=sigma, H=energy)
            raise VanishingError(
                f"no localized minimizer at lambda={lam}: H = {energy:.3e} >= 0 (mass spreads)"
            )
        u, c, steps, capped = _refine(Field(grid, vector), sigma, lam)
        iterations += steps

        check = second_order_check(u, sigma, c)
        if check.escape_direction is None:
            break
        if escapes >= settings.max_saddle_escapes:
            raise ConvergenceError(f"stuck at a saddle with Morse index {check.morse_index}")
        escapes += 1
        log.info("saddle_escape", lam=lam, morse_index=check.morse_index, attempt=escapes)
        grid = u.grid
        u0 = u.vector + ESCAPE_KICK * float(np.max(np.abs(u.vector))) * check.escape_direction

    values = functionals(u, sigma, c)
    if values.H >= 0.0:
        raise VanishingError(f"refined wave at lambda={lam} has H = {values.H:.3e} >= 0")
    formula = multiplier(u, sigma, lam)
    if abs(formula - c) > MULTIPLIER_RTOL * max(1.0, abs(c)):
        log.warning("multiplier_mismatch", lam=lam, newton=c, formula=formula)
    if c <= 0.0:
        raise ConvergenceError(f"Lagrange multiplier c({lam}) = {c:.3e} is not positive")

    residual = float(np.linalg.norm(profile_residual(u, sigma, c)))
    log.info(
        "normalized_converged",
        lam=lam,
        sigma=sigma,
        c=c,
        H=values.H,
        residual=residual,
        iterations=iterations,
    )
    return WaveProfile(
        grid=u.grid,
        sigma=sigma,
        field=u,
        family=Family.NORMALIZED,
        parameter=lam,
        multiplier=c,
        residual=residual,
        functionals=values,
        phi=u,
        omega=c,
        iterations=iterations,
        box_capped=capped,
    )
