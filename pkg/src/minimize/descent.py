"""Projected gradient descent on a constraint sphere with Barzilai-Borwein steps."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from src.core.logger import get_logger

log = get_logger("minimize.descent")

# Step-size safeguards for the two-point secant step
MIN_STEP = 1e-4
MAX_STEP = 1e4

# Sufficient-decrease constant of the backtracking search
ARMIJO = 1e-4

# Smallest trial step before the search gives up
STALL_STEP = 1e-14

Vector = np.ndarray


@dataclass(frozen=True)
class DescentResult:
    u: Vector
    value: float
    residual_norm: float
    iterations: int
    converged: bool


def projected_descent(
    u0: Vector,
    objective: Callable[[Vector], float],
    residual: Callable[[Vector], Vector],
    retract: Callable[[Vector], Vector],
    *,
    tol: float,
    max_iter: int,
    abs_every: int,
) -> DescentResult:
    """Minimize `objective` over the set `retract` maps onto.

    `residual(u)` is half the tangential gradient at a point on the constraint set. Iterates are
    replaced by their absolute value every `abs_every` steps; that never increases the
    functionals minimized here.
    """
    u = retract(np.abs(u0))
    value = objective(u)
    r = residual(u)
    alpha = 1.0
    for iteration in range(1, max_iter + 1):
        r_norm = float(np.linalg.norm(r))
        if r_norm < tol:
            return DescentResult(u, value, r_norm, iteration - 1, True)

        step = alpha
        while True:
            candidate = retract(u - step * r)
            candidate_value = objective(candidate)
            if candidate_value <= value - 2.0 * ARMIJO * step * r_norm**2:
                break
            step *= 0.5
            if step < STALL_STEP:
                log.warning("descent_stalled", iteration=iteration, residual=r_norm)
                return DescentResult(u, value, r_norm, iteration, False)

        if abs_every and iteration % abs_every == 0:
            candidate = retract(np.abs(candidate))
            candidate_value = objective(candidate)

        r_new = residual(candidate)
        s = candidate - u
        y = r_new - r
        sy = float(s @ y)
        alpha = float(np.clip((s @ s) / sy, MIN_STEP, MAX_STEP)) if sy > 0 else 1.0
        u, value, r = candidate, candidate_value, r_new

    r_norm = float(np.linalg.norm(r))
    return DescentResult(u, value, r_norm, max_iter, r_norm < tol)
