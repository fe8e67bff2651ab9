"""Stability criteria: <L+^{-1} phi, phi>, the slope of ||phi_omega||^2 and s(omega)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from src.core.config import settings
from src.core.logger import get_logger
from src.minimize.curves import central_derivatives
from src.minimize.profiles import ContinuationCurve, ScalarCurve
from src.spectra.operators import LinearizedPair

log = get_logger("spectra.criteria")

# Largest admissible projection of phi onto the numerical kernel of L+
KERNEL_PROJECTION_TOL = 1e-8


@dataclass(frozen=True)
class VKResult:
    value: float
    condition: float
    kernel_dimension: int
    kernel_projection: float
    well_conditioned: bool


def vk_analysis(pair: LinearizedPair) -> VKResult:
    """Solve L+ x = phi on Ker(L+)^perp by spectral deflation and return <x, phi>."""
    eigenvalues, eigenvectors = scipy.linalg.eigh(pair.Lplus)
    phi = pair.phi.vector
    in_kernel = np.abs(eigenvalues) < settings.kernel_threshold * pair.norm
    coefficients = eigenvectors.T @ phi

    phi_norm = float(np.linalg.norm(phi)) or 1.0
    projection = float(np.linalg.norm(coefficients[in_kernel])) / phi_norm
    if projection > KERNEL_PROJECTION_TOL:
        log.warning("phi_not_orthogonal_to_kernel", omega=pair.omega, projection=projection)

    kept = eigenvalues[~in_kernel]
    value = float(np.sum(coefficients[~in_kernel] ** 2 / kept))
    condition = float(np.max(np.abs(kept)) / np.min(np.abs(kept))) if kept.size else float("inf")
    well_conditioned = condition <= settings.vk_condition_limit
    if not well_conditioned:
        log.warning("vk_ill_conditioned", omega=pair.omega, condition=condition)
    return VKResult(
        value=value,
        condition=condition,
        kernel_dimension=int(np.sum(in_kernel)),
        kernel_projection=projection,
        well_conditioned=well_conditioned,
    )


def vk_inner_product(pair: LinearizedPair) -> float:
    return vk_analysis(pair).value


def _interior_index(x: np.ndarray, value: float) -> int:
    hits = np.flatnonzero(np.abs(x - value) <= 1e-9)
    if hits.size == 0:
        raise KeyError(f"omega={value} is not a sample of the curve")
    k = int(hits[0])
    if not 0 < k < len(x) - 1:
        raise ValueError(f"omega={value} is not interior to the curve")
    return k


def noise_floor(step: float) -> float:
    """Below 10 delta^2 a central difference cannot resolve the sign."""
    return 10.0 * step**2


def slope_criterion(curve: ContinuationCurve, omega: float) -> float:
    """Central difference of P(omega) = ||phi_omega||^2, Richardson-refined near zero."""
    omegas, mass = curve.omegas, curve.column("P")
    k = _interior_index(omegas, omega)
    first, _ = central_derivatives(omegas[k - 1 : k + 2], mass[k - 1 : k + 2])
    slope = float(first[0])

    h = omegas[k + 1] - omegas[k]
    if abs(slope) < noise_floor(curve.step) and 1 < k < len(omegas) - 2:
        uniform = np.allclose(np.diff(omegas[k - 2 : k + 3]), h, rtol=1e-6, atol=0)
        if uniform:
            wide = (mass[k + 2] - mass[k - 2]) / (4.0 * h)
            slope = float((4.0 * slope - wide) / 3.0)
    return slope


def j_derivatives(jcurve: ScalarCurve, omega: float) -> tuple[float, float, float]:
    """(j, j', j'') at an interior sample."""
    k = _interior_index(jcurve.abscissae, omega)
    window = slice(k - 1, k + 2)
    first, second = central_derivatives(jcurve.abscissae[window], jcurve.ordinates[window])
    return float(jcurve.ordinates[k]), float(first[0]), float(second[0])


def s_function(jcurve: ScalarCurve, omega: float, sigma: float) -> float:
    """s = j'' + j'^2 / (sigma j); positive exactly where j^{1 + 1/sigma} is convex."""
    j, first, second = j_derivatives(jcurve, omega)
    if j <= 0:
        raise ValueError(f"j({omega}) = {j} must be positive")
    return second + first**2 / (sigma * j)


def slope_from_j(jcurve: ScalarCurve, omega: float, sigma: float) -> float:
    """d/domega ||phi_omega||^2 = j^{1/sigma} s(omega)."""
    j, _, _ = j_derivatives(jcurve, omega)
    return j ** (1.0 / sigma) * s_function(jcurve, omega, sigma)
