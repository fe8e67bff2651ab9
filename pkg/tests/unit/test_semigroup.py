"""Unit tests for the heat kernel and the positivity / Perron-Frobenius checks."""

import numpy as np
import pytest
import scipy.linalg
import scipy.special

from src.lattice import Boundary, Field, Grid, laplacian_matrix
from src.semigroup import (
    apply_heat_semigroup,
    check_positivity_improving,
    ground_state_pf_check,
    heat_kernel,
)
from src.semigroup.kernel import heat_operator, tail_cutoff
from src.semigroup.positivity import (
    evolve_schrodinger_semigroup,
    random_nonnegative_field,
    schrodinger_matrix,
)

# --- Helpers ---

def _make_potential(grid: Grid, seed: int, scale: float = 3.0) -> Field:
    rng = np.random.default_rng(seed)
    return Field(grid, -scale * rng.uniform(0.0, 1.0, grid.size))


class TestHeatKernel:
    @pytest.mark.parametrize("t", [0.1, 0.5, 1.0])
    def test_even_positive_decreasing(self, t):
        kernel = heat_kernel(t, 60)
        n = np.arange(-30, 31)
        values = kernel.at(n)
        assert np.all(values > 0)
        assert np.array_equal(values, values[::-1])
        assert np.all(np.diff(values[30:]) < 0)

    @pytest.mark.parametrize("t", [0.2, 0.7, 1.0, 5.0])
    def test_matches_scaled_bessel(self, t):
        kernel = heat_kernel(t, 40)
        j = np.arange(0, 41)
        assert np.allclose(kernel.coefficients, scipy.special.ive(j, 2.0 * t), rtol=1e-12)

    def test_mass_within_truncation_bound(self):
        kernel = heat_kernel(1.0, 10)
        assert kernel.truncation_bound > 0
        assert abs(kernel.total - 1.0) <= kernel.truncation_bound + 1e-15
        assert heat_kernel(1.0, tail_cutoff(1.0)).total == pytest.approx(1.0, abs=1e-15)

    def test_zero_beyond_cutoff(self):
        assert heat_kernel(0.5, 5).at(6) == 0.0

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            heat_kernel(0.0, 10)
        with pytest.raises(ValueError):
            heat_kernel(1.0, 0)


class TestHeatSemigroup:
    @pytest.mark.parametrize("boundary", [Boundary.ZERO, Boundary.PERIODIC])
    def test_matches_matrix_exponential(self, boundary):
        grid = Grid(1, 12, boundary)
        exact = scipy.linalg.expm(0.8 * laplacian_matrix(grid, dense=True))
        assert np.allclose(heat_operator(grid, 0.8), exact, atol=1e-12)

    def test_matrix_exponential_in_two_dimensions(self):
        grid = Grid(2, 4)
        f = Field(grid, np.random.default_rng(0).uniform(size=grid.size))
        exact = scipy.linalg.expm(laplacian_matrix(grid, dense=True)) @ f.vector
        assert np.allclose(apply_heat_semigroup(f, 1.0).vector, exact, atol=1e-10)

    def test_semigroup_law(self):
        grid = Grid(2, 6)
        f = Field(grid, np.random.default_rng(1).normal(size=grid.size))
        twice = apply_heat_semigroup(apply_heat_semigroup(f, 0.3), 0.4)
        once = apply_heat_semigroup(f, 0.7)
        assert np.max(np.abs(twice.values - once.values)) < 1e-10

    def test_mass_conserved_away_from_walls(self):
        f = Field.delta(Grid(1, 40))
        assert np.sum(apply_heat_semigroup(f, 0.5).values) == pytest.approx(1.0, abs=1e-12)

    def test_mass_conserved_on_periodic_box(self):
        grid = Grid(1, 5, Boundary.PERIODIC)
        f = Field(grid, np.random.default_rng(2).uniform(size=grid.size))
        out = apply_heat_semigroup(f, 3.0)
        assert np.sum(out.values) == pytest.approx(np.sum(f.values), rel=1e-12)

    def test_rejects_non_positive_time(self):
        with pytest.raises(ValueError):
            apply_heat_semigroup(Field.delta(Grid(1, 3)), 0.0)


class TestPositivity:
    def test_zero_potential_reduces_to_heat(self):
        grid = Grid(1, 8)
        f = Field.delta(grid)
        evolved, _ = evolve_schrodinger_semigroup(f, Field.zeros(grid), 0.6)
        assert np.allclose(evolved.values, apply_heat_semigroup(f, 0.6).values, atol=1e-12)

    def test_duhamel_matches_matrix_exponential(self):
        grid = Grid(1, 10)
        potential = _make_potential(grid, seed=4)
        f = random_nonnegative_field(grid, np.random.default_rng(5))
        evolved, substeps = evolve_schrodinger_semigroup(f, potential, 1.0)
        generator = laplacian_matrix(grid, dense=True) + np.diag(potential.vector)
        exact = scipy.linalg.expm(generator) @ f.vector
        assert substeps >= 1
        assert np.allclose(evolved.vector, exact, rtol=1e-8, atol=1e-10)

    def test_random_field_has_one_zero(self):
        f = random_nonnegative_field(Grid(1, 5), np.random.default_rng(0))
        assert np.all(f.values >= 0)
        assert np.sum(f.values == 0.0) >= 1

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_positivity_improving(self, seed):
        report = check_positivity_improving(_make_potential(Grid(1, 10), seed), 1.0, trials=2,
                                            seed=seed)
        assert report.passed
        assert report.min_value > 0
        assert report.trials == 2

    def test_rejects_zero_trials(self):
        with pytest.raises(ValueError):
            check_positivity_improving(Field.zeros(Grid(1, 3)), 1.0, trials=0)


class TestPerronFrobenius:
    @pytest.mark.parametrize("seed", range(5))
    def test_ground_state_simple_and_positive(self, seed):
        report = ground_state_pf_check(schrodinger_matrix(_make_potential(Grid(1, 15), seed)))
        assert report.applicable
        assert report.passed
        assert report.multiplicity == 1
        assert report.spectral_gap > 0
        assert np.all(report.eigenvector > 0)

    def test_not_applicable_without_negative_spectrum(self):
        report = ground_state_pf_check(schrodinger_matrix(Field.zeros(Grid(1, 5))))
        assert not report.applicable
        assert report.passed

    def test_rejects_asymmetric_matrix(self):
        with pytest.raises(ValueError):
            ground_state_pf_check(np.array([[0.0, 1.0], [0.0, 0.0]]))
