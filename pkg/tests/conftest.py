"""Shared solver results; solves are expensive enough to run once per session."""

import pytest

from src.lattice import Grid
from src.minimize import continue_family, solve_homogeneous, solve_normalized
from src.minimize.profiles import ContinuationCurve, WaveProfile


@pytest.fixture(scope="session")
def grid_1d() -> Grid:
    return Grid(1, 30)


@pytest.fixture(scope="session")
def ground_state(grid_1d: Grid) -> WaveProfile:
    """Cubic (sigma = 1) ground state at omega = 1 in one dimension."""
    return solve_homogeneous(grid_1d, 1.0, 1.0)


@pytest.fixture(scope="session")
def normalized_wave(grid_1d: Grid) -> WaveProfile:
    return solve_normalized(grid_1d, 1.0, 2.0)


@pytest.fixture(scope="session")
def cubic_curve(grid_1d: Grid) -> ContinuationCurve:
    """sigma = 1 sweep over omega in [0.8, 1.4] with step 0.05."""
    return continue_family(grid_1d, 1.0, (0.8, 1.4), 0.05, provenance="cubic")
