"""Unit tests for the variational solvers, Newton refinement and frequency continuation."""

from dataclasses import replace

import numpy as np
import pytest

from src.core.config import settings
from src.core.errors import BoundViolationError, ConvergenceError, IllPosedError, VanishingError
from src.lattice import Field, Grid, functionals, norm_lp
from src.minimize import (
    ContinuationCurve,
    CurveSample,
    ScalarCurve,
    central_derivatives,
    check_h_properties,
    check_j_properties,
    excitation_threshold,
    homogeneous_from_profile,
    j_curve,
    mass_curve,
    mass_identity_errors,
    newton_refine,
    normalized_curves,
    profile_residual,
    second_order_check,
    solve_homogeneous,
    solve_normalized,
)
from src.minimize.continuation import frequency_grid
from src.minimize.descent import projected_descent
from src.minimize.newton import needs_larger_box, residual_tolerance
from src.minimize.normalized import multiplier
from src.minimize.profiles import CurveName, Family
from src.minimize.seeds import SeedKind, anticontinuum_seed, jitter, make_seed, sech_seed
from src.minimize.shape import Centering, szego_witness_check

# --- Helpers ---

def _make_curve(omegas, j, sigma: float = 1.0) -> ContinuationCurve:
    curve = ContinuationCurve(sigma=sigma, dimension=1, step=float(omegas[1] - omegas[0]))
    for w, jw in zip(omegas, j, strict=True):
        curve.append(CurveSample(omega=float(w), P=float(w), V=0.0, H=0.0, j=float(jw)))
    return curve


def _offsite_solution(grid: Grid, omega: float = 1.0) -> Field:
    """Bond-centered cubic wave from the two-site anticontinuum seed."""
    seed = make_seed(grid, SeedKind.OFFSITE)
    return newton_refine(seed.with_values(np.sqrt(1.0 + omega) * seed.values), 1.0, omega).phi


class TestSeeds:
    def test_delta(self):
        seed = make_seed(Grid(2, 3), SeedKind.DELTA)
        assert seed[(0, 0)] == 1.0
        assert np.sum(seed.values) == 1.0

    def test_offsite(self):
        seed = make_seed(Grid(1, 3), "offsite")
        assert seed[0] == seed[1] == 1.0
        assert np.sum(seed.values) == 2.0

    def test_gaussian_peaks_at_origin(self):
        seed = make_seed(Grid(1, 5), SeedKind.GAUSSIAN, width=2.0)
        assert np.argmax(seed.values) == 5
        assert seed[2] == pytest.approx(np.exp(-0.5))

    def test_jitter_keeps_support(self):
        seed = make_seed(Grid(1, 5), SeedKind.OFFSITE)
        noisy = jitter(seed, 1e-3, np.random.default_rng(0))
        assert np.array_equal(noisy.values == 0.0, seed.values == 0.0)
        assert np.allclose(noisy.values, seed.values, atol=1e-3)

    def test_jitter_disabled(self):
        seed = make_seed(Grid(1, 2))
        assert jitter(seed, 0.0, np.random.default_rng(0)) is seed

    def test_anticontinuum_amplitude(self):
        seed = anticontinuum_seed(Grid(2, 2), 1.5, 2.0)
        assert seed[(0, 0)] == pytest.approx(6.0 ** (1.0 / 3.0))

    def test_sech(self):
        seed = sech_seed(Grid(1, 4), 2.0)
        assert seed[0] == pytest.approx(2.0)


class TestDescent:
    def test_minimizes_quadratic_on_sphere(self):
        matrix = np.diag([3.0, 1.0, 2.0])

        def retract(u):
            return u / np.linalg.norm(u)

        def objective(u):
            return float(u @ matrix @ u)

        def residual(u):
            gradient = matrix @ u
            return gradient - float(u @ gradient) * u

        result = projected_descent(
            np.array([1.0, 1.0, 1.0]), objective, residual, retract,
            tol=1e-10, max_iter=10_000, abs_every=0,
        )
        assert result.converged
        assert result.value == pytest.approx(1.0, abs=1e-12)
        assert abs(result.u[1]) == pytest.approx(1.0, abs=1e-8)


class TestNewton:
    def test_zero_seed_gives_trivial_wave(self):
        wave = newton_refine(Field.zeros(Grid(1, 5)), 1.0, 1.0)
        assert wave.is_trivial
        assert wave.residual == 0.0

    def test_refines_ground_state(self, ground_state):
        wave = newton_refine(ground_state.phi, 1.0, 1.0)
        assert wave.family is Family.PROFILE
        assert wave.residual <= residual_tolerance(wave.phi, 1.0, settings.newton_tol)
        assert wave.iterations <= 1

    def test_iteration_cap(self):
        seed = anticontinuum_seed(Grid(1, 10), 1.0, 1.0)
        with pytest.raises(ConvergenceError):
            newton_refine(seed, 1.0, 1.0, max_iter=0)

    def test_offsite_wave_is_a_saddle(self):
        phi = _offsite_solution(Grid(1, 20))
        assert phi[0] == pytest.approx(phi[1], rel=1e-10)
        check = second_order_check(phi, 1.0, 1.0)
        assert check.morse_index == 2
        assert check.escape_direction is not None

    def test_residual_tolerance_is_relative_to_nonlinear_term(self):
        grid = Grid(1, 5)
        assert residual_tolerance(Field.delta(grid), 1.0, 1e-12) == 1e-12
        big = Field.delta(grid).with_values(10.0 * Field.delta(grid).values)
        assert residual_tolerance(big, 1.0, 1e-12) == pytest.approx(1e-9, rel=1e-12)

    def test_needs_larger_box(self):
        grid = Grid(1, 10)
        assert needs_larger_box(Field.delta(grid, (10,)))
        assert not needs_larger_box(Field.delta(grid))


class TestHomogeneous:
    def test_ground_state(self, ground_state):
        assert ground_state.family is Family.HOMOGENEOUS
        assert ground_state.omega == 1.0
        j = ground_state.multiplier
        assert 1.0 < j < 3.0
        assert np.all(ground_state.phi.values > -1e-14)
        assert np.argmax(ground_state.phi.values) == ground_state.grid.half_width
        residual = np.linalg.norm(profile_residual(ground_state.phi, 1.0, 1.0))
        assert residual <= residual_tolerance(ground_state.phi, 1.0, 1e-12)

    def test_scaling_between_u_and_phi(self, ground_state):
        u, phi = ground_state.field, ground_state.phi
        assert norm_lp(u, 4.0) == pytest.approx(1.0, rel=1e-12)
        assert functionals(u, 1.0, 1.0).J == pytest.approx(ground_state.multiplier, rel=1e-12)
        ratio = phi.values[u.values > 1e-8] / u.values[u.values > 1e-8]
        assert np.allclose(ratio, np.sqrt(ground_state.multiplier), rtol=1e-10)

    def test_single_negative_direction(self, ground_state):
        check = second_order_check(ground_state.phi, 1.0, 1.0)
        assert check.morse_index == 1
        assert check.escape_direction is None

    def test_onsite_and_bell_shaped(self, ground_state):
        report = szego_witness_check(ground_state)
        assert report.passed
        assert report.bell_shaped
        assert report.centering is Centering.ONSITE
        assert report.center_offset == 0.0

    def test_offsite_seed_escapes_to_ground_state(self, ground_state):
        wave = solve_homogeneous(Grid(1, 30), 1.0, 1.0, make_seed(Grid(1, 30), SeedKind.OFFSITE))
        assert second_order_check(wave.phi, 1.0, 1.0).morse_index == 1
        assert wave.multiplier == pytest.approx(ground_state.multiplier, rel=1e-9)

    def test_box_doubling(self):
        wave = solve_homogeneous(Grid(1, 8), 1.0, 1.0)
        assert wave.grid.half_width > 8
        assert not wave.box_capped
        assert not needs_larger_box(wave.phi)

    def test_box_doubling_capped(self, monkeypatch):
        monkeypatch.setattr(settings, "max_sites", 20)
        wave = solve_homogeneous(Grid(1, 8), 1.0, 1.0)
        assert wave.box_capped
        assert wave.grid.half_width == 8

    def test_bound_violation(self):
        trivial = newton_refine(Field.zeros(Grid(1, 5)), 1.0, 1.0)
        fake = replace(trivial, phi=Field.delta(Grid(1, 5)))
        with pytest.raises(BoundViolationError):
            homogeneous_from_profile(fake, 1.0, 1.0)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            solve_homogeneous(Grid(1, 5), 1.0, 0.0)
        with pytest.raises(ValueError):
            solve_homogeneous(Grid(1, 5), 1.0, 1.0, Field.zeros(Grid(1, 5)))


class TestNormalized:
    def test_constraint_and_multiplier(self, normalized_wave):
        u, lam = normalized_wave.field, 2.0
        assert normalized_wave.family is Family.NORMALIZED
        assert np.sum(u.values**2) == pytest.approx(lam, rel=1e-10)
        c = normalized_wave.multiplier
        assert c > 0
        assert normalized_wave.omega == c
        assert multiplier(u, 1.0, lam) == pytest.approx(c, rel=1e-7)
        assert normalized_wave.functionals.H < 0

    def test_lambda_c_identity(self, normalized_wave):
        values = normalized_wave.functionals
        lhs = 2.0 * normalized_wave.multiplier
        assert lhs == pytest.approx(0.5 * values.V - values.H, rel=1e-8)

    def test_solves_profile_equation_at_multiplier(self, normalized_wave):
        u, c = normalized_wave.field, normalized_wave.multiplier
        residual = np.linalg.norm(profile_residual(u, 1.0, c))
        assert residual <= residual_tolerance(u, 1.0, 1e-9)

    def test_matches_fixed_frequency_ground_state(self, normalized_wave):
        u, c = normalized_wave.field, normalized_wave.multiplier
        wave = solve_homogeneous(u.grid, 1.0, c)
        assert np.sum(wave.phi.values**2) == pytest.approx(2.0, rel=1e-6)
        assert functionals(wave.phi, 1.0).H == pytest.approx(
            normalized_wave.functionals.H, rel=1e-6
        )
        if wave.grid == u.grid:
            assert np.allclose(wave.phi.values, np.abs(u.values), atol=1e-6)

    def test_refuses_supercritical(self):
        with pytest.raises(IllPosedError):
            solve_normalized(Grid(1, 10), 3.0, 0.1)

    def test_supercritical_small_mass_vanishes(self):
        with pytest.raises(VanishingError):
            solve_normalized(Grid(1, 10), 3.0, 0.1, allow_supercritical=True)

    def test_rejects_non_positive_mass(self):
        with pytest.raises(ValueError):
            solve_normalized(Grid(1, 10), 1.0, 0.0)


class TestContinuation:
    def test_frequency_grid_inclusive(self):
        assert np.allclose(frequency_grid((0.5, 1.0), 0.1), [0.5, 0.6, 0.7, 0.8, 0.9, 1.0])

    def test_frequency_grid_rejects_bad_range(self):
        with pytest.raises(ValueError):
            frequency_grid((1.0, 0.5), 0.1)
        with pytest.raises(ValueError):
            frequency_grid((0.5, 1.0), 0.0)

    def test_sweep_has_no_gaps(self, cubic_curve):
        assert cubic_curve.gaps == []
        assert len(cubic_curve.samples) == 13
        assert cubic_curve.provenance == "cubic"
        assert np.all(np.diff(cubic_curve.omegas) > 0)

    def test_j_properties(self, cubic_curve):
        report = check_j_properties(cubic_curve)
        assert report.passed, report.failures
        assert np.all(mass_identity_errors(cubic_curve) < 1e-3)

    def test_mass_increases_for_cubic(self, cubic_curve):
        threshold = excitation_threshold(cubic_curve)
        assert threshold.omega_min == pytest.approx(0.8)
        assert not threshold.interior
        assert threshold.increasing_beyond

    def test_samples_carry_waves(self, cubic_curve):
        sample = cubic_curve.sample_at(1.0)
        assert sample.wave is not None
        assert sample.P == pytest.approx(sample.wave.phi_mass)

    def test_append_requires_increasing_omega(self, cubic_curve):
        curve = ContinuationCurve(sigma=1.0, dimension=1, step=0.1)
        curve.append(cubic_curve.samples[1])
        with pytest.raises(ValueError):
            curve.append(cubic_curve.samples[0])

    def test_scalar_curves(self, cubic_curve):
        assert j_curve(cubic_curve).name is CurveName.J
        assert mass_curve(cubic_curve).at(1.0) == pytest.approx(cubic_curve.sample_at(1.0).P)


class TestCurves:
    def test_central_derivatives_exact_for_quadratics(self):
        x = np.array([0.0, 0.1, 0.3, 0.6])
        first, second = central_derivatives(x, x**2)
        assert np.allclose(first, 2.0 * x[1:-1])
        assert np.allclose(second, 2.0)

    def test_central_derivatives_need_three_points(self):
        with pytest.raises(ValueError):
            central_derivatives(np.array([0.0, 1.0]), np.array([0.0, 1.0]))

    def test_scalar_curve_rejects_unsorted(self):
        with pytest.raises(ValueError):
            ScalarCurve(CurveName.H, [1.0, 0.5], [0.0, 0.0])

    def test_j_bounds_violation_reported(self):
        omegas = np.array([1.0, 1.1, 1.2])
        report = check_j_properties(_make_curve(omegas, omegas - 0.01))
        assert not report.within_bounds
        assert not report.passed

    def test_convex_j_reported(self):
        omegas = np.array([1.0, 1.1, 1.2])
        report = check_j_properties(_make_curve(omegas, omegas + 1.0 + 5.0 * (omegas - 1.1) ** 2))
        assert not report.concave

    def test_h_properties(self):
        lambdas = [2.0, 2.5, 3.0, 3.5, 4.0]
        h, c, waves = normalized_curves(Grid(1, 30), 1.0, lambdas)
        report = check_h_properties(h, waves)
        assert report.passed, report.failures
        assert report.triples_checked == 1
        assert np.all(c.ordinates > 0)

    def test_h_subadditivity_triples(self):
        h = ScalarCurve(CurveName.H, [1.0, 2.0, 3.0], [-1.0, -3.0, -6.0])
        report = check_h_properties(h)
        assert report.sublinear
        assert report.triples_checked == 3

    def test_h_subadditivity_violation(self):
        h = ScalarCurve(CurveName.H, [1.0, 2.0], [-1.0, -1.5])
        report = check_h_properties(h)
        assert not report.sublinear
        assert not report.passed
