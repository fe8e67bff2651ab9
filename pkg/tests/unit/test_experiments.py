"""Unit tests for run configuration, output files, property suites, the sweep and the CLI."""

from pathlib import Path

import numpy as np
import pandas as pd
import pytest
import scipy.special
from typer.testing import CliRunner

from src.core.config import settings
from src.core.errors import ConfigError, IllPosedError, ProvenanceError
from src.experiments.checks import SUITES, run_suites
from src.experiments.cli import app
from src.experiments.config import load_config, parse_range
from src.experiments.orchestrator import run_sweep, solve_one
from src.experiments.outputs import (
    OutputWriter,
    check_same_provenance,
    read_curve,
    read_profile,
    sample_tag,
)
from src.lattice.io import HASH_PREFIX
from src.minimize.profiles import Family
from src.semigroup import heat_kernel
from src.spectra import SpectrumMethod, Verdict

runner = CliRunner()


# --- Helpers ---

def _write_config(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


def _first_line(path: Path) -> str:
    return path.read_text(encoding="utf-8").splitlines()[0]


class TestParseRange:
    def test_valid(self):
        assert parse_range("0.5:2:0.25") == (0.5, 2.0, 0.25)

    @pytest.mark.parametrize("text", ["1:2", "1:2:0", "0:1:0.1", "2:1:0.1", "a:b:c"])
    def test_invalid(self, text):
        with pytest.raises(ValueError):
            parse_range(text)


class TestRunConfig:
    def test_defaults(self):
        config = load_config()
        assert config.dimension == 1
        assert config.half_width == 60
        assert config.family is Family.HOMOGENEOUS
        assert config.resolved_spectrum_method is SpectrumMethod.BLOCK

    def test_file_with_aliases_and_comments(self, tmp_path):
        path = _write_config(
            tmp_path / "run.cfg",
            "# sweep in two dimensions\nd = 2\nN = 7\n\nsigma = 0.5  # subcritical\n"
            "range = 0.5:1:0.1\n",
        )
        config = load_config(path)
        assert config.dimension == 2
        assert config.half_width == 7
        assert config.sigma == 0.5
        assert config.sweep_range == (0.5, 1.0, 0.1)
        assert config.resolved_spectrum_method is SpectrumMethod.REDUCED

    def test_overrides_win_over_file(self, tmp_path):
        path = _write_config(tmp_path / "run.cfg", "sigma = 0.5\nN = 7\n")
        config = load_config(path, sigma=1.5, N=None)
        assert config.sigma == 1.5
        assert config.half_width == 7

    def test_unknown_key(self, tmp_path):
        path = _write_config(tmp_path / "run.cfg", "temperature = 3\n")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_malformed_line(self, tmp_path):
        path = _write_config(tmp_path / "run.cfg", "sigma 1.0\n")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.cfg")

    def test_invalid_value(self):
        with pytest.raises(ConfigError):
            load_config(sigma=-1.0)

    def test_parameter_required(self):
        with pytest.raises(ConfigError):
            load_config().require_parameter()
        with pytest.raises(ConfigError):
            load_config(family="normalized").require_parameter()
        with pytest.raises(ConfigError):
            load_config().require_range()

    def test_supercritical_fixed_mass_refused(self):
        config = load_config(d=2, sigma=1.0, family="normalized", lam=5.0)
        with pytest.raises(IllPosedError):
            config.require_parameter()
        allowed = load_config(d=2, sigma=1.0, family="normalized", lam=5.0,
                              override_supercritical=True)
        assert allowed.require_parameter() == 5.0

    def test_hash_is_stable_and_ignores_output_location(self, tmp_path):
        a = load_config(sigma=1.5, omega=1.0)
        b = load_config(sigma=1.5, omega=1.0, out=tmp_path, write_spectra=True)
        assert len(a.config_hash) == 12
        assert a.config_hash == b.config_hash
        assert a.config_hash != load_config(sigma=1.25, omega=1.0).config_hash
        assert a.config_hash != load_config(sigma=1.5, omega=1.0, newton_tol=1e-10).config_hash

    def test_canonical_carries_tolerances(self):
        canonical = load_config().canonical()
        assert "out_dir" not in canonical
        assert canonical["settings"]["newton_tol"] == 1e-12
        assert canonical["settings"]["instability"] == 1e-6

    def test_tolerances_are_scoped_to_the_run(self):
        before = settings.solver_tolerances, settings.random_seed
        tight = load_config(newton_tol=1e-10, gradient_tol=1e-6, seed=7)
        with tight.tolerances():
            assert settings.newton_tol == 1e-10
            assert settings.gradient_tol == 1e-6
            assert settings.random_seed == 7
        assert (settings.solver_tolerances, settings.random_seed) == before
        assert load_config().newton_tol == before[0]["newton_tol"]

    def test_tolerances_restored_after_error(self):
        before = settings.newton_tol
        with pytest.raises(ConfigError), load_config(newton_tol=1e-9).tolerances():
            raise ConfigError("boom")
        assert settings.newton_tol == before

    def test_hash_independent_of_active_tolerances(self):
        tight = load_config(newton_tol=1e-10)
        outside = tight.config_hash
        with tight.tolerances():
            assert tight.config_hash == outside


class TestOutputs:
    def test_sample_tag(self):
        assert sample_tag(1.25) == "1p25"
        assert sample_tag(2.0) == "2"

    def test_provenance(self):
        assert check_same_provenance(["abc", "", "abc"]) == "abc"
        assert check_same_provenance([]) == ""
        with pytest.raises(ProvenanceError):
            check_same_provenance(["abc", "def"])

    def test_profile_round_trip(self, tmp_path, ground_state):
        writer = OutputWriter(tmp_path, "feedbeef0001")
        path = writer.write_profile(ground_state)
        assert _first_line(path) == f"{HASH_PREFIX}feedbeef0001"
        assert (tmp_path / "profile.json").is_file()
        wave, config_hash = read_profile(path)
        assert config_hash == "feedbeef0001"
        assert wave.omega == 1.0
        assert np.allclose(wave.phi.values, ground_state.phi.values, atol=1e-10)

    def test_profile_without_sidecar(self, tmp_path, ground_state):
        path = OutputWriter(tmp_path, "h").write_profile(ground_state)
        path.with_suffix(".json").unlink()
        with pytest.raises(ConfigError):
            read_profile(path)

    def test_curve_round_trip(self, tmp_path, cubic_curve):
        path = OutputWriter(tmp_path, "cubic").write_curve(cubic_curve)
        curve = read_curve(path, 1.0, 1)
        assert curve.provenance == "cubic"
        assert curve.step == pytest.approx(0.05)
        assert len(curve.samples) == len(cubic_curve.samples)
        assert np.allclose(curve.column("P"), cubic_curve.column("P"), rtol=1e-15)

    def test_kernel_table(self, tmp_path):
        path = OutputWriter(tmp_path, "k").write_kernel_table(heat_kernel(0.5, 10))
        frame = pd.read_csv(path, comment="#")
        assert list(frame.columns) == ["n", "K"]
        assert len(frame) == 21
        assert frame["K"].iloc[10] == pytest.approx(scipy.special.ive(0, 1.0), rel=1e-12)


class TestChecks:
    def test_single_suite(self):
        (result,) = run_suites("szego")
        assert result.suite == "szego"
        assert result.passed
        assert result.outcomes

    def test_heat_kernel_suite(self):
        assert SUITES["heat-kernel"]().passed

    def test_unknown_suite(self):
        with pytest.raises(KeyError):
            run_suites("nonsense")


class TestSweep:
    async def test_homogeneous_sweep(self, tmp_path):
        config = load_config(N=20, sigma=1.0, range="0.9:1.1:0.1", out=tmp_path)
        result = await run_sweep(config, OutputWriter(tmp_path, config.config_hash))
        assert [r.omega for r in result.reports] == pytest.approx([0.9, 1.0, 1.1])
        assert all(r.verdict is Verdict.STABLE for r in result.reports)
        assert not result.disagreements
        assert result.threshold is not None
        assert (tmp_path / "curve.csv").is_file()
        stability = pd.read_csv(tmp_path / "stability.csv", comment="#")
        assert len(stability) == 3
        assert _first_line(tmp_path / "stability.csv") == f"{HASH_PREFIX}{config.config_hash}"

    async def test_cold_sweep_matches_warm(self, tmp_path):
        warm = load_config(N=20, range="0.9:1.1:0.1", out=tmp_path / "warm")
        cold = load_config(N=20, range="0.9:1.1:0.1", warm_start=False, out=tmp_path / "cold")
        warm_result = await run_sweep(warm, OutputWriter(warm.out_dir, warm.config_hash))
        cold_result = await run_sweep(cold, OutputWriter(cold.out_dir, cold.config_hash))
        assert np.allclose(
            warm_result.curve.column("P"), cold_result.curve.column("P"), rtol=1e-8
        )

    async def test_normalized_sweep(self, tmp_path):
        config = load_config(N=30, family="normalized", range="2:3:0.5", out=tmp_path)
        result = await run_sweep(config, OutputWriter(tmp_path, config.config_hash))
        assert [str(c.name) for c in result.scalar_curves] == ["h", "c"]
        assert not any("L+" in failure for failure in result.failures)
        frame = pd.read_csv(tmp_path / "h_c.csv", comment="#")
        assert list(frame.columns) == ["lambda", "h", "c"]

    def test_solve_one_profile_family(self):
        wave = solve_one(load_config(N=10, sigma=1.0, omega=4.0, family="profile"))
        assert wave.residual < 1e-9
        assert wave.omega == 4.0


class TestCli:
    def test_solve_writes_profile(self, tmp_path):
        result = runner.invoke(
            app, ["solve", "--N", "20", "--sigma", "1", "--omega", "1", "--out", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "profile.csv").is_file()
        assert (tmp_path / "config.json").is_file()

        report = runner.invoke(app, ["spectrum", str(tmp_path / "profile.csv")])
        assert report.exit_code == 0, report.output
        text = (tmp_path / "profile_report.txt").read_text()
        assert "verdict=stable" in text

    def test_solve_profile_family(self, tmp_path):
        result = runner.invoke(
            app,
            ["solve", "--family", "profile", "--omega", "1", "--N", "10", "--out", str(tmp_path)],
        )
        assert result.exit_code == 0, result.output
        assert "Profile written" in result.output
        assert (tmp_path / "profile.csv").is_file()

    def test_fixed_mass_supercritical_refused(self, tmp_path):
        result = runner.invoke(
            app,
            ["solve", "--family", "normalized", "--sigma", "3", "--lambda", "1",
             "--out", str(tmp_path)],
        )
        assert result.exit_code == 1
        assert not (tmp_path / "profile.csv").exists()

    def test_malformed_config(self, tmp_path):
        path = _write_config(tmp_path / "bad.cfg", "this is not a config\n")
        result = runner.invoke(app, ["solve", "--config", str(path)])
        assert result.exit_code == 1

    def test_sweep(self, tmp_path):
        result = runner.invoke(
            app, ["sweep", "--N", "20", "--range", "0.9:1.1:0.1", "--out", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "stability.csv").is_file()

    def test_kernel(self, tmp_path):
        result = runner.invoke(
            app, ["kernel", "--t", "0.5", "--cutoff", "10", "--out", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        frame = pd.read_csv(tmp_path / "kernel_t0p5.csv", comment="#")
        assert len(frame) == 21

    def test_checks_suite(self):
        result = runner.invoke(app, ["checks", "szego"])
        assert result.exit_code == 0, result.output

    def test_checks_unknown_suite(self):
        result = runner.invoke(app, ["checks", "nonsense"])
        assert result.exit_code == 1

    def test_sweep_without_range(self, tmp_path):
        result = runner.invoke(app, ["sweep", "--out", str(tmp_path)])
        assert result.exit_code == 1
