"""Sweep orchestration: solves and spectra on a worker pool, file writes on one writer task."""

from __future__ import annotations

import asyncio
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from src.core.config import settings
from src.core.errors import SolverError
from src.core.logger import get_logger
from src.experiments.config import RunConfig
from src.experiments.outputs import OutputWriter, sample_tag
from src.lattice import Grid
from src.minimize.continuation import (
    ExcitationThreshold,
    continue_family,
    excitation_threshold,
    frequency_grid,
)
from src.minimize.curves import check_h_properties, check_j_properties, j_curve, normalized_curves
from src.minimize.homogeneous import solve_homogeneous
from src.minimize.newton import refine_with_box_rule
from src.minimize.normalized import solve_normalized
from src.minimize.profiles import (
    ContinuationCurve,
    CurveSample,
    Family,
    ScalarCurve,
    WaveProfile,
)
from src.minimize.seeds import anticontinuum_seed, make_seed
from src.spectra import assemble_pair, vk_analysis
from src.spectra.verdict import StabilityReport, stability_verdict

log = get_logger("experiments.orchestrator")

# Queue item that stops the writer
_DONE = object()


@dataclass
class SweepResult:
    config_hash: str
    curve: ContinuationCurve | None = None
    reports: list[StabilityReport] = field(default_factory=list)
    scalar_curves: list[ScalarCurve] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)
    threshold: ExcitationThreshold | None = None

    @property
    def disagreements(self) -> list[StabilityReport]:
        return [r for r in self.reports if r.disagreement]


def grid_for(config: RunConfig) -> Grid:
    return Grid(config.dimension, config.half_width, config.boundary)


async def _writer(queue: asyncio.Queue[Any], writer: OutputWriter) -> None:
    while True:
        item = await queue.get()
        if item is _DONE:
            queue.task_done()
            return
        method, args = item
        try:
            getattr(writer, method)(*args)
        except OSError:
            log.exception("write_failed", method=method)
        finally:
            queue.task_done()


async def _in_pool(pool: ThreadPoolExecutor, func: Callable[..., Any], *args: Any) -> Any:
    loop = asyncio.get_running_loop()
    return await loop.run_in_executor(pool, func, *args)


def solve_one(config: RunConfig) -> WaveProfile:
    """One wave of the configured family at its single parameter."""
    grid = grid_for(config)
    parameter = config.require_parameter()
    rng = np.random.default_rng(config.random_seed)
    seed = make_seed(grid, config.seed_kind)
    if config.family is Family.NORMALIZED:
        return solve_normalized(
            grid, config.sigma, parameter, seed,
            allow_supercritical=config.override_supercritical, rng=rng,
        )
    if config.family is Family.HOMOGENEOUS:
        return solve_homogeneous(grid, config.sigma, parameter, seed, rng=rng)
    return refine_with_box_rule(anticontinuum_seed(grid, config.sigma, parameter),
                                config.sigma, parameter)


def _fresh_sample(config: RunConfig, omega: float) -> CurveSample | None:
    grid = grid_for(config)
    try:
        wave = solve_homogeneous(grid, config.sigma, omega, make_seed(grid, config.seed_kind),
                                 rng=np.random.default_rng(config.random_seed))
    except SolverError:
        log.exception("sweep_gap", omega=omega, sigma=config.sigma)
        return None
    return CurveSample.from_wave(wave)


def _normalized_vk(wave: WaveProfile) -> float:
    return vk_analysis(assemble_pair(wave)).value


async def _homogeneous_curve(config: RunConfig, pool: ThreadPoolExecutor) -> ContinuationCurve:
    low, high, step = config.require_range()
    if config.warm_start:
        return await _in_pool(
            pool,
            lambda: continue_family(
                grid_for(config), config.sigma, (low, high), step,
                warm_start=True, provenance=config.config_hash,
            ),
        )
    omegas = [float(w) for w in frequency_grid((low, high), step)]
    samples = await asyncio.gather(*(_in_pool(pool, _fresh_sample, config, w) for w in omegas))
    curve = ContinuationCurve(config.sigma, config.dimension, step, config.config_hash)
    for omega, sample in zip(omegas, samples, strict=True):
        if sample is None:
            curve.gaps.append(omega)
        else:
            curve.append(sample)
    return curve


async def run_sweep(config: RunConfig, writer: OutputWriter) -> SweepResult:
    """Sweep the configured family; every sample of a homogeneous sweep gets a stability report."""
    result = SweepResult(config_hash=config.config_hash)
    queue: asyncio.Queue[Any] = asyncio.Queue()
    writer_task = asyncio.create_task(_writer(queue, writer))
    workers = max(1, settings.num_threads)
    log.info("sweep_starting", family=str(config.family), sigma=config.sigma, workers=workers)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        if config.family is Family.NORMALIZED:
            low, high, step = config.require_range()
            lambdas = [float(x) for x in frequency_grid((low, high), step)]
            h, c, waves = await _in_pool(
                pool, normalized_curves, grid_for(config), config.sigma, lambdas
            )
            result.scalar_curves = [h, c]
            result.failures.extend(check_h_properties(h, waves).failures)
            vk_values = await asyncio.gather(*(_in_pool(pool, _normalized_vk, w) for w in waves))
            for wave, value in zip(waves, vk_values, strict=True):
                if value > 0:
                    result.failures.append(
                        f"<L+^-1 u, u> = {value:.3e} > 0 at lambda={wave.parameter:g}"
                    )
            await queue.put(("write_scalar_curves", ("h_c", "lambda", [h, c])))
        else:
            curve = await _homogeneous_curve(config, pool)
            result.curve = curve
            await queue.put(("write_curve", (curve,)))
            result.failures.extend(check_j_properties(curve).failures)
            if curve.samples:
                result.threshold = excitation_threshold(curve)
                log.info("excitation_threshold", **vars(result.threshold))
            jcurve = j_curve(curve) if len(curve.samples) >= 3 else None
            if jcurve is not None:
                result.scalar_curves = [jcurve]

            async def report_for(sample: CurveSample) -> StabilityReport | None:
                try:
                    report = await _in_pool(
                        pool, stability_verdict, sample.wave, curve, jcurve,
                        config.config_hash, config.resolved_spectrum_method,
                    )
                except SolverError:
                    log.exception("report_failed", omega=sample.omega)
                    return None
                if config.write_spectra:
                    name = f"spectra/omega_{sample_tag(sample.omega)}"
                    await queue.put(("write_spectrum", (report.eigenvalues, name)))
                return report

            reports = await asyncio.gather(*(report_for(s) for s in curve.samples))
            result.reports = sorted((r for r in reports if r is not None), key=lambda r: r.omega)
            await queue.put(("write_stability_table", (result.reports,)))

    await queue.put(_DONE)
    await writer_task
    log.info(
        "sweep_complete",
        reports=len(result.reports),
        disagreements=len(result.disagreements),
        failures=len(result.failures),
    )
    return result
