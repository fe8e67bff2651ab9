"""Shape of a converged wave: axis-wise bell shape, mirror symmetry, onsite or offsite."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from src.core.logger import get_logger
from src.minimize.profiles import WaveProfile
from src.rearrange import Sequence1D, edge_energy, symmetric_decreasing_rearrangement

log = get_logger("minimize.shape")

# Relative tolerance on monotonicity and symmetry comparisons
SHAPE_RTOL = 1e-8


class Centering(enum.StrEnum):
    ONSITE = "onsite"
    OFFSITE = "offsite"
    IRREGULAR = "irregular"


@dataclass(frozen=True)
class ShapeReport:
    nonnegative: bool
    bell_shaped: bool
    symmetric: bool
    centering: Centering
    center_offset: float
    rearrangement_gap: float
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def _unimodal(line: np.ndarray, tol: float) -> bool:
    peak = int(np.argmax(line))
    rising = np.diff(line[: peak + 1])
    falling = np.diff(line[peak:])
    return bool(np.all(rising >= -tol) and np.all(falling <= tol))


def _centering(line: np.ndarray, origin: int, tol: float) -> tuple[Centering, float]:
    peak = int(np.argmax(line))
    n = len(line)
    reach = min(peak, n - 1 - peak)
    if np.allclose(line[peak - reach : peak], line[peak + reach : peak : -1], rtol=0, atol=tol):
        return Centering.ONSITE, float(peak - origin)
    # between peak and its larger neighbour
    right_larger = peak + 1 < n and (peak == 0 or line[peak + 1] >= line[peak - 1])
    partner = peak + 1 if right_larger else peak - 1
    left, right = min(peak, partner), max(peak, partner)
    reach = min(left + 1, n - right)
    mirrored = line[right : right + reach][::-1]
    if np.allclose(line[left - reach + 1 : left + 1], mirrored, rtol=0, atol=tol):
        return Centering.OFFSITE, (left + right) / 2.0 - origin
    return Centering.IRREGULAR, float(peak - origin)


def _line_through_peak(values: np.ndarray) -> np.ndarray:
    """The line along the last axis through the maximum."""
    peak = np.unravel_index(np.argmax(values), values.shape)
    return np.asarray(values[peak[:-1]])


def szego_witness_check(profile: WaveProfile) -> ShapeReport:
    """Report only: every axis line of phi is unimodal; in d=1 also the mirror symmetry."""
    values = profile.phi.values
    scale = float(np.max(np.abs(values))) or 1.0
    tol = SHAPE_RTOL * scale
    failures = []

    nonnegative = bool(np.all(values >= -1e-12 * scale))
    if not nonnegative:
        failures.append("negative entries")

    bell = True
    for axis in range(values.ndim):
        lines = np.moveaxis(values, axis, -1).reshape(-1, values.shape[axis])
        if not all(_unimodal(line, tol) for line in lines):
            bell = False
            failures.append(f"not unimodal along axis {axis}")

    through_center = _line_through_peak(values)
    centering, offset = _centering(through_center, profile.grid.half_width, tol)
    symmetric = centering is not Centering.IRREGULAR
    if values.ndim == 1 and not symmetric:
        failures.append("no mirror symmetry about a site or a bond")

    line = Sequence1D(through_center)
    energy = edge_energy(line, 2.0)
    rearranged = edge_energy(symmetric_decreasing_rearrangement(line), 2.0)
    gap = (energy - rearranged) / max(energy, 1e-300)

    if failures:
        log.warning("shape_check_failed", omega=profile.omega, failures=failures)
    return ShapeReport(
        nonnegative=nonnegative,
        bell_shaped=bell,
        symmetric=symmetric,
        centering=centering,
        center_offset=offset,
        rearrangement_gap=gap,
        failures=failures,
    )
