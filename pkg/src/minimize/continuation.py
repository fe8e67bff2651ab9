"""Frequency sweeps of the ground-state family."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.core.config import settings
from src.core.errors import SolverError
from src.core.logger import get_logger
from src.lattice import Grid
from src.minimize.homogeneous import homogeneous_from_profile, solve_homogeneous
from src.minimize.newton import refine_with_box_rule, second_order_check
from src.minimize.profiles import ContinuationCurve, CurveSample, WaveProfile

log = get_logger("minimize.continuation")


def frequency_grid(omega_range: tuple[float, float], delta_omega: float) -> np.ndarray:
    """omega_min, omega_min + delta, ... up to omega_max inclusive (to rounding)."""
    low, high = omega_range
    if delta_omega <= 0:
        raise ValueError(f"delta_omega must be positive, got {delta_omega}")
    if not 0 < low <= high:
        raise ValueError(f"omega range must satisfy 0 < low <= high, got {omega_range}")
    count = int(np.floor((high - low) / delta_omega + 1e-9)) + 1
    return low + delta_omega * np.arange(count)


def _warm_step(previous: WaveProfile, sigma: float, omega: float) -> WaveProfile:
    wave = refine_with_box_rule(previous.phi, sigma, omega)
    check = second_order_check(wave.phi, sigma, omega)
    if check.morse_index != 1:
        raise SolverError(f"warm start left the ground-state branch (n(L+)={check.morse_index})")
    return homogeneous_from_profile(wave, sigma, omega)


def continue_family(
    grid: Grid,
    sigma: float,
    omega_range: tuple[float, float],
    delta_omega: float | None = None,
    warm_start: bool = True,
    provenance: str = "",
) -> ContinuationCurve:
    """March omega across the range, seeding Newton with the previous wave.

    A failed warm step falls back to a fresh homogeneous solve; omegas where both fail are
    recorded in `gaps`.
    """
    step = settings.default_delta_omega if delta_omega is None else delta_omega
    omegas = frequency_grid(omega_range, step)
    curve = ContinuationCurve(sigma=sigma, dimension=grid.dimension, step=step,
                              provenance=provenance)

    previous: WaveProfile | None = None
    for omega in omegas:
        omega = float(omega)
        wave = None
        if warm_start and previous is not None:
            try:
                wave = _warm_step(previous, sigma, omega)
            except SolverError as exc:
                log.info("warm_start_failed", omega=omega, error=str(exc))
        if wave is None:
            try:
                wave = solve_homogeneous(grid, sigma, omega)
            except SolverError:
                log.exception("sweep_gap", omega=omega, sigma=sigma)
                curve.gaps.append(omega)
                continue
        curve.append(CurveSample.from_wave(wave))
        previous = wave

    log.info(
        "continuation_done",
        sigma=sigma,
        samples=len(curve.samples),
        gaps=len(curve.gaps),
        omega_min=float(omegas[0]),
        omega_max=float(omegas[-1]),
    )
    return curve


@dataclass(frozen=True)
class ExcitationThreshold:
    """Where P(omega) attains its minimum over a sweep and how it behaves beyond."""

    omega_min: float
    P_min: float
    interior: bool
    increasing_beyond: bool


def excitation_threshold(curve: ContinuationCurve, margin: float = 0.0) -> ExcitationThreshold:
    """argmin of P and whether P is strictly increasing for omega > omega_min + margin."""
    if not curve.samples:
        raise ValueError("empty continuation curve")
    omegas = curve.omegas
    masses = curve.column("P")
    k = int(np.argmin(masses))
    beyond = masses[omegas > omegas[k] + margin]
    return ExcitationThreshold(
        omega_min=float(omegas[k]),
        P_min=float(masses[k]),
        interior=0 < k < len(masses) - 1,
        increasing_beyond=bool(np.all(np.diff(beyond) > 0)),
    )
