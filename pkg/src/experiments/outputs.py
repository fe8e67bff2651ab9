"""Plot-ready CSV files and JSON sidecars, every one tagged with the run's config hash."""

from __future__ import annotations

import json
from collections.abc import Iterable
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from src.core.errors import ConfigError, ProvenanceError
from src.core.logger import get_logger
from src.lattice import Boundary
from src.lattice.io import read_csv_with_hash, read_field_csv, write_csv_with_hash, write_field_csv
from src.minimize.newton import newton_refine
from src.minimize.profiles import ContinuationCurve, CurveSample, ScalarCurve, WaveProfile
from src.semigroup import HeatKernel
from src.spectra.verdict import StabilityReport

log = get_logger("experiments.outputs")

STABILITY_COLUMNS = [
    "omega",
    "max_real_part",
    "n_Lplus",
    "n_Lminus",
    "dim_ker_Lplus",
    "dim_ker_Lminus",
    "vk_inner",
    "slope",
    "s_omega",
    "verdict",
    "disagreement",
]


def sample_tag(value: float) -> str:
    return f"{value:.6f}".rstrip("0").rstrip(".").replace(".", "p")


def check_same_provenance(hashes: Iterable[str]) -> str:
    """The common hash of a set of inputs; mixing runs is refused."""
    distinct = {h for h in hashes if h}
    if len(distinct) > 1:
        raise ProvenanceError(f"inputs carry different config hashes: {sorted(distinct)}")
    return distinct.pop() if distinct else ""


class OutputWriter:
    """All file writes of a run go through one instance."""

    def __init__(self, out_dir: Path, config_hash: str) -> None:
        self.out_dir = out_dir
        self.config_hash = config_hash
        self.written: list[Path] = []

    def _csv(self, name: str, frame: pd.DataFrame) -> Path:
        path = self.out_dir / name
        write_csv_with_hash(path, frame, self.config_hash)
        self.written.append(path)
        return path

    def _json(self, name: str, payload: dict[str, Any]) -> Path:
        path = self.out_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        document = {"config_hash": self.config_hash, **payload}
        path.write_text(json.dumps(document, indent=2, sort_keys=True, default=str) + "\n")
        self.written.append(path)
        return path

    def write_config(self, canonical: dict[str, Any]) -> Path:
        return self._json("config.json", {"config": canonical})

    def write_profile(self, wave: WaveProfile, name: str = "profile") -> Path:
        path = self.out_dir / f"{name}.csv"
        write_field_csv(path, wave.phi, self.config_hash)
        self.written.append(path)
        self._json(f"{name}.json", wave.metadata())
        return path

    def write_curve(self, curve: ContinuationCurve, name: str = "curve") -> Path:
        frame = pd.DataFrame(curve.rows(), columns=["omega", "P", "V", "H", "j"])
        path = self._csv(f"{name}.csv", frame)
        if curve.gaps:
            self._json(f"{name}_gaps.json", {"gaps": curve.gaps})
        return path

    def write_scalar_curves(self, name: str, abscissa: str, curves: list[ScalarCurve]) -> Path:
        """Curves sharing abscissae as one CSV, e.g. lambda,h,c."""
        columns: dict[str, np.ndarray] = {abscissa: curves[0].abscissae}
        for curve in curves:
            if not np.array_equal(curve.abscissae, curves[0].abscissae):
                raise ValueError("curves written together must share abscissae")
            columns[str(curve.name)] = curve.ordinates
        return self._csv(f"{name}.csv", pd.DataFrame(columns))

    def write_spectrum(self, eigenvalues: np.ndarray, name: str = "spectrum") -> Path:
        frame = pd.DataFrame({"re_lambda": eigenvalues.real, "im_lambda": eigenvalues.imag})
        return self._csv(f"{name}.csv", frame)

    def write_kernel_table(self, kernel: HeatKernel, name: str = "kernel") -> Path:
        offsets = np.arange(-kernel.cutoff, kernel.cutoff + 1)
        return self._csv(f"{name}.csv", pd.DataFrame({"n": offsets, "K": kernel.at(offsets)}))

    def write_report(self, report: StabilityReport, name: str = "report") -> Path:
        path = self.out_dir / f"{name}.txt"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report.to_text())
        self.written.append(path)
        return self._json(f"{name}.json", report.to_dict())

    def write_stability_table(self, reports: list[StabilityReport]) -> Path:
        rows = [{k: r.to_dict()[k] for k in STABILITY_COLUMNS} for r in reports]
        frame = pd.DataFrame(rows, columns=STABILITY_COLUMNS).sort_values("omega")
        return self._csv("stability.csv", frame)


def read_profile(path: Path) -> tuple[WaveProfile, str]:
    """Field CSV plus its JSON sidecar; the wave is re-verified by Newton at the stored omega."""
    sidecar = path.with_suffix(".json")
    if not sidecar.is_file():
        raise ConfigError(f"profile metadata not found next to {path}")
    metadata = json.loads(sidecar.read_text())
    boundary = Boundary(metadata["grid"]["boundary"])
    phi, csv_hash = read_field_csv(path, boundary)
    config_hash = check_same_provenance([csv_hash, metadata.get("config_hash", "")])
    wave = newton_refine(phi, float(metadata["sigma"]), float(metadata["omega"]))
    log.info("profile_loaded", path=str(path), omega=wave.omega, iterations=wave.iterations)
    return wave, config_hash


def read_curve(
    path: Path, sigma: float, dimension: int, step: float | None = None
) -> ContinuationCurve:
    """Curve CSV back into a ContinuationCurve; the step defaults to the median spacing."""
    frame, config_hash = read_csv_with_hash(path)
    if step is None:
        spacing = np.diff(frame["omega"].to_numpy(dtype=float))
        step = float(np.median(spacing)) if spacing.size else 0.0
    curve = ContinuationCurve(sigma=sigma, dimension=dimension, step=step, provenance=config_hash)
    for row in frame.itertuples(index=False):
        curve.append(CurveSample(omega=row.omega, P=row.P, V=row.V, H=row.H, j=row.j))
    return curve
