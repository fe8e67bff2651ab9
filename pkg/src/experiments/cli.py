"""CLI commands for ground-state solves, frequency sweeps, spectra and property checks."""

from __future__ import annotations

import asyncio
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Annotated, Any

import typer
from rich.console import Console
from rich.table import Table

from src.core.config import settings
from src.core.errors import EXIT_CONFIG, EXIT_NUMERICAL, ConvergenceError, DnlsError
from src.core.logger import bind_run_context, get_logger, setup_logging
from src.experiments.checks import SUITES, run_suites
from src.experiments.config import RunConfig, load_config
from src.experiments.orchestrator import run_sweep, solve_one
from src.experiments.outputs import OutputWriter, check_same_provenance, read_curve, read_profile
from src.lattice import Boundary
from src.minimize.curves import j_curve
from src.minimize.profiles import Family, WaveProfile
from src.minimize.seeds import SeedKind
from src.minimize.shape import szego_witness_check
from src.semigroup import heat_kernel
from src.spectra import SpectrumMethod, StabilityReport, stability_verdict

log = get_logger("experiments.cli")

app = typer.Typer(help="Discrete NLS ground states and their spectral stability")
console = Console()

ConfigOpt = Annotated[Path | None, typer.Option("--config", help="key = value config file")]
DimensionOpt = Annotated[int | None, typer.Option("--d", help="Lattice dimension")]
HalfWidthOpt = Annotated[int | None, typer.Option("--N", help="Box half-width")]
BoundaryOpt = Annotated[Boundary | None, typer.Option("--boundary", help="zero or periodic")]
SigmaOpt = Annotated[float | None, typer.Option("--sigma", help="Nonlinearity exponent")]
FamilyOpt = Annotated[Family | None, typer.Option("--family", help="Which ground-state family")]
SeedKindOpt = Annotated[SeedKind | None, typer.Option("--seed-kind", help="Initial guess")]
RandomSeedOpt = Annotated[int | None, typer.Option("--seed", help="Random seed")]
OutOpt = Annotated[Path | None, typer.Option("--out", help="Output directory")]
OverrideOpt = Annotated[
    bool,
    typer.Option("--override-supercritical", help="Allow fixed-mass solves for sigma >= 2/d"),
]
MethodOpt = Annotated[
    SpectrumMethod | None,
    typer.Option("--method", help="block (2N x 2N) or reduced (-L- L+)"),
]


@contextmanager
def _exit_codes() -> Iterator[None]:
    """0 ok, 1 usage or config, 2 numerical failure."""
    try:
        yield
    except DnlsError as exc:
        log.error("command_failed", error=type(exc).__name__, detail=str(exc))
        typer.echo(f"Error: {exc}", err=True)
        raise typer.Exit(exc.exit_code) from exc
    except ValueError as exc:
        log.error("command_failed", error="ValueError", detail=str(exc))
        typer.echo(f"Error: {exc}", err=True)
        raise typer.Exit(EXIT_CONFIG) from exc


@contextmanager
def _load(config: Path | None, command: str, **overrides: Any) -> Iterator[RunConfig]:
    run = load_config(config, **overrides)
    with run.tolerances():
        bind_run_context(config_hash=run.config_hash, command=command)
        log.info("config_loaded", **run.canonical())
        yield run


def _wave_table(wave: WaveProfile) -> Table:
    table = Table(title=f"{wave.family} wave, sigma={wave.sigma:g}")
    table.add_column("Quantity")
    table.add_column("Value", justify="right")
    values = wave.functionals
    rows = [
        ("omega", f"{wave.omega:.10g}"),
        ("parameter", f"{wave.parameter:.10g}"),
        ("multiplier", "-" if wave.multiplier is None else f"{wave.multiplier:.10g}"),
        ("||phi||^2", f"{wave.phi_mass:.10g}"),
        ("H", f"{values.H:.10g}"),
        ("residual", f"{wave.residual:.2e}"),
        ("box", f"N={wave.grid.half_width} ({wave.grid.size} sites)"),
        ("iterations", str(wave.iterations)),
    ]
    shape = szego_witness_check(wave)
    rows.append(("shape", f"{shape.centering}, bell-shaped={shape.bell_shaped}"))
    for quantity, value in rows:
        table.add_row(quantity, value)
    return table


def _report_table(reports: list[StabilityReport]) -> Table:
    table = Table(title="Stability")
    for column in ("omega", "max Re", "n(L+)", "<L+^-1 phi,phi>", "dP/domega", "s", "verdict"):
        table.add_column(column, justify="right")
    for r in reports:
        verdict = f"[red]{r.verdict}[/red]" if r.disagreement else str(r.verdict)
        table.add_row(
            f"{r.omega:.4f}",
            f"{r.max_real_part:.2e}",
            str(r.n_Lplus),
            "-" if r.vk_inner is None else f"{r.vk_inner:.4e}",
            "-" if r.slope is None else f"{r.slope:.4e}",
            "-" if r.s_omega is None else f"{r.s_omega:.4e}",
            verdict,
        )
    return table


@app.command()
def solve(
    config: ConfigOpt = None,
    d: DimensionOpt = None,
    n: HalfWidthOpt = None,
    boundary: BoundaryOpt = None,
    sigma: SigmaOpt = None,
    family: FamilyOpt = None,
    omega: Annotated[float | None, typer.Option("--omega", help="Frequency")] = None,
    lam: Annotated[float | None, typer.Option("--lambda", help="Mass ||u||^2")] = None,
    seed_kind: SeedKindOpt = None,
    seed: RandomSeedOpt = None,
    override_supercritical: OverrideOpt = False,
    out: OutOpt = None,
) -> None:
    """Solve for one ground state and write its profile CSV with metadata."""
    setup_logging(settings.log_level)
    with _exit_codes(), _load(
        config, "solve",
        dimension=d, half_width=n, boundary=boundary, sigma=sigma, family=family,
        omega=omega, lam=lam, seed_kind=seed_kind, random_seed=seed,
        override_supercritical=override_supercritical or None, out_dir=out,
    ) as run:
        wave = solve_one(run)
        writer = OutputWriter(run.out_dir, run.config_hash)
        writer.write_config(run.canonical())
        path = writer.write_profile(wave)
        console.print(_wave_table(wave))
    typer.echo(f"Profile written to {path}")


@app.command()
def sweep(
    config: ConfigOpt = None,
    d: DimensionOpt = None,
    n: HalfWidthOpt = None,
    boundary: BoundaryOpt = None,
    sigma: SigmaOpt = None,
    family: FamilyOpt = None,
    sweep_range: Annotated[
        str | None, typer.Option("--range", help="a:b:step in omega (or lambda)")
    ] = None,
    seed_kind: SeedKindOpt = None,
    seed: RandomSeedOpt = None,
    override_supercritical: OverrideOpt = False,
    cold: Annotated[bool, typer.Option("--cold", help="Solve every sample from scratch")] = False,
    spectra: Annotated[bool, typer.Option("--spectra", help="Write every spectrum")] = False,
    method: MethodOpt = None,
    out: OutOpt = None,
) -> None:
    """Sweep a range of frequencies (or masses) and report stability per sample."""
    setup_logging(settings.log_level)
    with _exit_codes(), _load(
        config, "sweep",
        dimension=d, half_width=n, boundary=boundary, sigma=sigma, family=family,
        sweep_range=sweep_range, seed_kind=seed_kind, random_seed=seed,
        override_supercritical=override_supercritical or None,
        warm_start=False if cold else None, write_spectra=spectra or None,
        spectrum_method=method, out_dir=out,
    ) as run:
        asyncio.run(_sweep(run))


async def _sweep(run: RunConfig) -> None:
    writer = OutputWriter(run.out_dir, run.config_hash)
    writer.write_config(run.canonical())
    result = await run_sweep(run, writer)

    if result.curve is not None:
        if not result.curve.samples:
            raise ConvergenceError("no sample of the sweep converged")
        console.print(_report_table(result.reports))
        if result.threshold is not None:
            t = result.threshold
            trend = "increasing" if t.increasing_beyond else "not monotone"
            typer.echo(f"min P = {t.P_min:.6g} at omega = {t.omega_min:g}; P {trend} beyond")
        if result.curve.gaps:
            typer.echo(f"Gaps at omega = {', '.join(f'{w:g}' for w in result.curve.gaps)}")
    for curve in result.scalar_curves:
        typer.echo(f"{curve.name}: {len(curve.abscissae)} samples")
    for failure in result.failures:
        typer.echo(f"Property failed: {failure}", err=True)
    if result.disagreements:
        typer.echo(f"Criteria disagree at {len(result.disagreements)} samples", err=True)
    typer.echo(f"Outputs in {run.out_dir} (config hash {run.config_hash})")


@app.command()
def spectrum(
    profile: Annotated[Path, typer.Argument(help="Profile CSV written by `solve`")],
    curve: Annotated[
        Path | None, typer.Option("--curve", help="curve.csv of the same run")
    ] = None,
    method: MethodOpt = None,
    out: OutOpt = None,
) -> None:
    """Linearized spectrum and stability report of a stored profile."""
    setup_logging(settings.log_level)
    with _exit_codes():
        wave, config_hash = read_profile(profile)
        bind_run_context(config_hash=config_hash, command="spectrum")
        sweep_curve = None
        jcurve = None
        if curve is not None:
            sweep_curve = read_curve(curve, wave.sigma, wave.grid.dimension)
            check_same_provenance([config_hash, sweep_curve.provenance])
            jcurve = j_curve(sweep_curve) if len(sweep_curve.samples) >= 3 else None
        if method is None:
            method = SpectrumMethod.BLOCK if wave.grid.dimension == 1 else SpectrumMethod.REDUCED
        report = stability_verdict(wave, sweep_curve, jcurve, config_hash, method)
        writer = OutputWriter(out or profile.parent, config_hash)
        writer.write_spectrum(report.eigenvalues, f"{profile.stem}_spectrum")
        path = writer.write_report(report, f"{profile.stem}_report")
    console.print(_report_table([report]))
    for note in report.notes:
        typer.echo(f"Note: {note}")
    typer.echo(f"Report written to {path}")


@app.command()
def kernel(
    t: Annotated[float, typer.Option("--t", help="Time")] = 1.0,
    cutoff: Annotated[int, typer.Option("--cutoff", help="Largest offset")] = 30,
    config: ConfigOpt = None,
    out: OutOpt = None,
) -> None:
    """Write the heat kernel table n,K_n(t)."""
    setup_logging(settings.log_level)
    with _exit_codes(), _load(config, "kernel", out_dir=out) as run:
        table = heat_kernel(t, cutoff)
        writer = OutputWriter(run.out_dir, run.config_hash)
        path = writer.write_kernel_table(table, f"kernel_t{t:g}".replace(".", "p"))
    typer.echo(f"Kernel table written to {path} (truncation bound {table.truncation_bound:.2e})")


@app.command()
def checks(
    suite: Annotated[str, typer.Argument(help=f"One of {', '.join(SUITES)} or all")] = "all",
) -> None:
    """Run property suites end to end."""
    setup_logging(settings.log_level)
    bind_run_context(command="checks", suite=suite)
    try:
        results = run_suites(suite)
    except KeyError:
        typer.echo(f"Unknown suite {suite!r}; choose from {', '.join(SUITES)} or all", err=True)
        raise typer.Exit(EXIT_CONFIG) from None

    table = Table(title="Checks")
    table.add_column("Suite")
    table.add_column("Check")
    table.add_column("Result")
    table.add_column("Detail")
    for result in results:
        for outcome in result.outcomes:
            mark = "[green]pass[/green]" if outcome.passed else "[red]FAIL[/red]"
            table.add_row(result.suite, outcome.name, mark, outcome.detail)
    console.print(table)

    failed = [r.suite for r in results if not r.passed]
    if failed:
        typer.echo(f"Failed suites: {', '.join(failed)}", err=True)
        raise typer.Exit(EXIT_NUMERICAL)
    typer.echo("All checks passed")


if __name__ == "__main__":
    app()
