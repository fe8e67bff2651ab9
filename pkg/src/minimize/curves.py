"""Scalar curves h(lambda), c(lambda), j(omega), P(omega) and their structural properties."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from src.core.logger import get_logger
from src.lattice import Grid
from src.minimize.normalized import solve_normalized
from src.minimize.profiles import ContinuationCurve, CurveName, ScalarCurve, WaveProfile

log = get_logger("minimize.curves")

# Slack on second differences that are meant to be non-positive
CONCAVITY_TOL = 1e-8

# Relative error allowed in ||phi||^2 = j' j^{1/sigma}
MASS_IDENTITY_RTOL = 1e-3


def central_derivatives(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Three-point first and second derivatives at the interior abscissae (non-uniform safe)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 3:
        raise ValueError("need at least three samples for central differences")
    h0 = x[1:-1] - x[:-2]
    h1 = x[2:] - x[1:-1]
    first = (
        -h1 / (h0 * (h0 + h1)) * y[:-2]
        + (h1 - h0) / (h0 * h1) * y[1:-1]
        + h0 / (h1 * (h0 + h1)) * y[2:]
    )
    second = 2.0 * (y[:-2] / (h0 * (h0 + h1)) - y[1:-1] / (h0 * h1) + y[2:] / (h1 * (h0 + h1)))
    return first, second


def j_curve(curve: ContinuationCurve) -> ScalarCurve:
    return ScalarCurve(CurveName.J, curve.omegas, curve.column("j"))


def mass_curve(curve: ContinuationCurve) -> ScalarCurve:
    return ScalarCurve(CurveName.P, curve.omegas, curve.column("P"))


def normalized_family(
    grid: Grid, sigma: float, lambdas: Sequence[float], allow_supercritical: bool = False
) -> list[WaveProfile]:
    """solve_normalized along increasing lambda, each solve seeded with the previous wave."""
    waves: list[WaveProfile] = []
    for lam in sorted(lambdas):
        seed = waves[-1].field if waves else None
        waves.append(
            solve_normalized(grid, sigma, float(lam), seed=seed,
                             allow_supercritical=allow_supercritical)
        )
    return waves


def h_curve(grid: Grid, sigma: float, lambdas: Sequence[float]) -> ScalarCurve:
    waves = normalized_family(grid, sigma, lambdas)
    return ScalarCurve(CurveName.H, sorted(lambdas), [w.functionals.H for w in waves])


def c_curve(grid: Grid, sigma: float, lambdas: Sequence[float]) -> ScalarCurve:
    waves = normalized_family(grid, sigma, lambdas)
    return ScalarCurve(CurveName.C, sorted(lambdas), [w.multiplier or 0.0 for w in waves])


def normalized_curves(
    grid: Grid, sigma: float, lambdas: Sequence[float]
) -> tuple[ScalarCurve, ScalarCurve, list[WaveProfile]]:
    """h and c from a single pass of solves."""
    waves = normalized_family(grid, sigma, lambdas)
    x = sorted(lambdas)
    h = ScalarCurve(CurveName.H, x, [w.functionals.H for w in waves])
    c = ScalarCurve(CurveName.C, x, [w.multiplier or 0.0 for w in waves])
    return h, c, waves


@dataclass(frozen=True)
class HCurveReport:
    negative: bool
    concave: bool
    ratio_decreasing: bool
    sublinear: bool
    triples_checked: int
    multiplier_identity_error: float
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def check_h_properties(
    h: ScalarCurve, waves: Sequence[WaveProfile] | None = None
) -> HCurveReport:
    """h < 0, concave, h/lambda decreasing and h(lambda) < h(alpha) + h(lambda - alpha).

    With the waves at hand also checks lambda c = sigma/(sigma + 1) V - h > 0.
    """
    lam, values = h.abscissae, h.ordinates
    failures = []
    negative = bool(np.all(values < 0))
    if not negative:
        failures.append("h >= 0 at some lambda")

    concave = True
    if len(lam) >= 3:
        _, second = central_derivatives(lam, values)
        concave = bool(np.all(second <= CONCAVITY_TOL))
        if not concave:
            failures.append(f"h not concave: max second difference {float(np.max(second)):.3e}")

    ratio_decreasing = bool(np.all(np.diff(values / lam) < 0))
    if not ratio_decreasing:
        failures.append("h/lambda not strictly decreasing")

    triples = 0
    sublinear = True
    lookup = {round(float(x), 9): float(y) for x, y in zip(lam, values, strict=True)}
    for total, h_total in lookup.items():
        for part, h_part in lookup.items():
            rest = round(total - part, 9)
            if part <= 0 or rest <= 0 or rest not in lookup:
                continue
            triples += 1
            if not h_total < h_part + lookup[rest]:
                sublinear = False
                failures.append(f"h({total}) >= h({part}) + h({rest})")
    if triples == 0:
        log.warning("no_sublinearity_triples", lambdas=len(lam))

    identity_error = 0.0
    for wave in waves or ():
        values_w = wave.functionals
        sigma = wave.sigma
        lhs = wave.parameter * (wave.multiplier or 0.0)
        rhs = sigma / (sigma + 1.0) * values_w.V - values_w.H
        identity_error = max(identity_error, abs(lhs - rhs) / max(1.0, abs(rhs)))
        if rhs <= 0:
            failures.append(f"lambda c(lambda) <= 0 at lambda={wave.parameter}")
    if identity_error > 1e-8:
        failures.append(f"lambda c identity off by {identity_error:.3e}")

    return HCurveReport(
        negative=negative,
        concave=concave,
        ratio_decreasing=ratio_decreasing,
        sublinear=sublinear,
        triples_checked=triples,
        multiplier_identity_error=identity_error,
        failures=failures,
    )


@dataclass(frozen=True)
class JCurveReport:
    within_bounds: bool
    concave: bool
    lipschitz: bool
    max_second_difference: float
    max_mass_identity_error: float
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def mass_identity_errors(curve: ContinuationCurve) -> np.ndarray:
    """Relative error of ||phi||^2 = j' j^{1/sigma} at the interior samples."""
    omegas, j = curve.omegas, curve.column("j")
    first, _ = central_derivatives(omegas, j)
    predicted = first * j[1:-1] ** (1.0 / curve.sigma)
    mass = curve.column("P")[1:-1]
    return np.abs(predicted - mass) / np.abs(mass)


def check_j_properties(curve: ContinuationCurve) -> JCurveReport:
    """omega < j < omega + 2d, j concave, |j(w1) - j(w2)| <= (1 + 2/a)|w1 - w2| for a < w1 < w2."""
    omegas, j = curve.omegas, curve.column("j")
    failures = []
    upper = omegas + 2.0 * curve.dimension
    within = bool(np.all((omegas < j) & (j < upper)))
    if not within:
        failures.append("j outside (omega, omega + 2d)")

    max_second = 0.0
    errors = np.zeros(0)
    if len(omegas) >= 3:
        _, second = central_derivatives(omegas, j)
        max_second = float(np.max(second))
        errors = mass_identity_errors(curve)
    concave = max_second <= CONCAVITY_TOL
    if not concave:
        failures.append(f"j not concave: max second difference {max_second:.3e}")

    lipschitz = True
    if len(omegas) >= 2:
        slopes = np.abs(np.diff(j)) / np.diff(omegas)
        bound = 1.0 + 2.0 / omegas[:-1]
        lipschitz = bool(np.all(slopes <= bound))
        if not lipschitz:
            failures.append("j violates the (1 + 2/a) Lipschitz bound")

    max_error = float(np.max(errors)) if errors.size else 0.0
    if max_error >= MASS_IDENTITY_RTOL:
        failures.append(f"mass identity error {max_error:.3e}")

    return JCurveReport(
        within_bounds=within,
        concave=concave,
        lipschitz=lipschitz,
        max_second_difference=max_second,
        max_mass_identity_error=max_error,
        failures=failures,
    )
