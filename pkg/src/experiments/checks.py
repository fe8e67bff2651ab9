"""Property suites run end to end by the `checks` subcommand."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.special

from src.core.logger import get_logger
from src.lattice import Field, Grid, functionals, laplacian_matrix, tent_witness
from src.minimize.continuation import continue_family
from src.minimize.curves import check_h_properties, check_j_properties, normalized_curves
from src.minimize.homogeneous import solve_homogeneous
from src.minimize.newton import newton_refine
from src.minimize.seeds import SeedKind, make_seed
from src.rearrange import Sequence1D, check_permutation_inequality, check_szego
from src.semigroup import (
    HeatKernel,
    check_positivity_improving,
    ground_state_pf_check,
    heat_kernel,
)
from src.semigroup.kernel import apply_heat_semigroup
from src.semigroup.positivity import schrodinger_matrix
from src.spectra import assemble_pair, operator_report

log = get_logger("experiments.checks")

# Times and offsets of the heat-kernel suite
KERNEL_TIMES = tuple(round(0.1 * k, 1) for k in range(1, 11))
KERNEL_OFFSETS = 30


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteResult:
    suite: str
    outcomes: list[CheckOutcome] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(o.passed for o in self.outcomes)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.outcomes.append(CheckOutcome(name, bool(passed), detail))
        if not passed:
            log.warning("check_failed", suite=self.suite, check=name, detail=detail)


def _two_sided(kernel: HeatKernel) -> np.ndarray:
    return kernel.at(np.arange(-kernel.cutoff, kernel.cutoff + 1))


def heat_kernel_suite() -> SuiteResult:
    result = SuiteResult("heat-kernel")
    n = np.arange(-KERNEL_OFFSETS, KERNEL_OFFSETS + 1)
    for t in KERNEL_TIMES:
        kernel = heat_kernel(t, 200)
        values = kernel.at(n)
        result.add(f"positive t={t}", bool(np.all(values > 0)))
        result.add(f"even t={t}", bool(np.array_equal(values, values[::-1])))
        half = values[KERNEL_OFFSETS:]
        result.add(f"bell t={t}", bool(np.all(np.diff(half) < 0)))
        bessel = scipy.special.ive(np.abs(n), 2.0 * t)
        error = float(np.max(np.abs(values - bessel) / bessel))
        result.add(f"bessel t={t}", error < 1e-12, f"max relative error {error:.2e}")
        result.add(
            f"mass t={t}",
            abs(kernel.total - 1.0) <= kernel.truncation_bound + 1e-15,
            f"total {kernel.total!r}",
        )

    for s, t in ((0.3, 0.5), (0.7, 0.2), (1.0, 1.0)):
        composed = np.convolve(_two_sided(heat_kernel(s, 120)), _two_sided(heat_kernel(t, 120)))
        centre = len(composed) // 2
        window = composed[centre - KERNEL_OFFSETS : centre + KERNEL_OFFSETS + 1]
        target = heat_kernel(s + t, KERNEL_OFFSETS).at(n)
        error = float(np.max(np.abs(window - target)))
        result.add(f"semigroup s={s} t={t}", error < 1e-10, f"max error {error:.2e}")

    grid = Grid(1, 20)
    exact = scipy.linalg.expm(laplacian_matrix(grid, dense=True))
    for site in (0, 7, 20):
        delta = Field.delta(grid, (site,))
        evolved = apply_heat_semigroup(delta, 1.0).vector
        error = float(np.max(np.abs(evolved - exact @ delta.vector)))
        result.add(f"expm oracle site={site}", error < 1e-8, f"max error {error:.2e}")
    return result


def perron_frobenius_suite(count: int = 20, seed: int = 0) -> SuiteResult:
    result = SuiteResult("perron-frobenius")
    grid = Grid(1, 15)
    for k in range(count):
        rng = np.random.default_rng(seed + k)
        potential = Field(grid, -3.0 * rng.uniform(0.0, 1.0, grid.size))
        report = ground_state_pf_check(schrodinger_matrix(potential))
        result.add(
            f"ground state simple and sign-definite #{k}",
            report.applicable and report.passed,
            f"lambda_0={report.ground_eigenvalue:.4f} gap={report.spectral_gap:.3e}",
        )
        positivity = check_positivity_improving(potential, 1.0, trials=1, seed=seed + k)
        result.add(
            f"positivity improving #{k}", positivity.passed, f"min {positivity.min_value:.3e}"
        )
    return result


def szego_suite(count: int = 1000, seed: int = 0) -> SuiteResult:
    result = SuiteResult("szego")
    rng = np.random.default_rng(seed)
    holds = 0
    for _ in range(count):
        length = int(rng.integers(1, 13))
        p = float(rng.choice([1.5, 2.0, 3.0]))
        report = check_szego(Sequence1D(rng.normal(size=length)), p)
        holds += report.holds
    result.add("rearrangement lowers edge energy", holds == count, f"{holds}/{count}")

    for length in range(1, 7):
        a = np.sort(rng.uniform(0.0, 1.0, length))[::-1]
        report = check_permutation_inequality(a, 2.0)
        result.add(f"decreasing order optimal len={length}", report.passed)
    for length in range(1, 6):
        a = np.sort(rng.uniform(0.1, 1.0, length))[::-1] + np.arange(length)[::-1]
        for p in (1.5, 2.0, 3.0):
            report = check_permutation_inequality(a, p)
            result.add(f"equality only at identity len={length} p={p}", report.identity_unique)
    return result


def lemmas_suite() -> SuiteResult:
    result = SuiteResult("lemmas")
    grid = Grid(1, 30)
    curve = continue_family(grid, 1.0, (0.5, 1.5), 0.05)
    report = check_j_properties(curve)
    result.add("j bounds", report.within_bounds)
    result.add(
        "j concave", report.concave, f"max second difference {report.max_second_difference:.2e}"
    )
    result.add("j Lipschitz", report.lipschitz)
    result.add(
        "mass identity",
        report.max_mass_identity_error < 1e-3,
        f"max error {report.max_mass_identity_error:.2e}",
    )

    lambdas = [0.5 * k for k in range(1, 9)]
    h, _, waves = normalized_curves(grid, 1.0, lambdas)
    h_report = check_h_properties(h, waves)
    result.add("h negative", h_report.negative)
    result.add("h concave", h_report.concave)
    result.add("h/lambda decreasing", h_report.ratio_decreasing)
    result.add("h sublinear", h_report.sublinear, f"{h_report.triples_checked} triples")
    result.add("lambda c identity", h_report.multiplier_identity_error < 1e-8)

    for sigma in (0.5, 1.0, 1.5):
        witness = tent_witness(Grid(1, 400), 1.0)
        energy = functionals(witness, sigma).H
        result.add(f"tent witness H<0 sigma={sigma}", energy < 0, f"H={energy:.3e}")
    return result


def operators_suite() -> SuiteResult:
    result = SuiteResult("operators")
    grid = Grid(1, 30)
    for omega in (0.5, 1.0, 1.5):
        wave = solve_homogeneous(grid, 1.0, omega)
        report = operator_report(assemble_pair(wave))
        result.add(f"ground state indices omega={omega}", report.ground_state,
                   f"indices {tuple(report.indices)}")
        result.add(f"<L+ phi, phi> identity omega={omega}", report.el_identity_error < 1e-9,
                   f"relative error {report.el_identity_error:.2e}")

    offsite = make_seed(grid, SeedKind.OFFSITE)
    seed = offsite.with_values(np.sqrt(2.0) * offsite.values)
    wave = newton_refine(seed, 1.0, 1.0)
    indices = operator_report(assemble_pair(wave)).indices
    result.add("offsite Morse index", indices.n_Lplus == 2, f"n(L+)={indices.n_Lplus}")
    return result


SUITES: dict[str, Callable[[], SuiteResult]] = {
    "heat-kernel": heat_kernel_suite,
    "perron-frobenius": perron_frobenius_suite,
    "szego": szego_suite,
    "lemmas": lemmas_suite,
    "operators": operators_suite,
}


def run_suites(name: str) -> list[SuiteResult]:
    if name == "all":
        return [suite() for suite in SUITES.values()]
    if name not in SUITES:
        raise KeyError(name)
    return [SUITES[name]()]
