"""Aggregate stability report for one wave of a sweep."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from src.core.config import settings
from src.core.errors import ConfigError, ProvenanceError
from src.core.logger import get_logger
from src.minimize.profiles import ContinuationCurve, ScalarCurve, WaveProfile
from src.spectra.criteria import noise_floor, s_function, slope_criterion, vk_analysis
from src.spectra.operators import assemble_pair
from src.spectra.spectrum import (
    SpectrumMethod,
    linearized_spectrum,
    max_real_part,
    operator_report,
    quadruple_symmetry_error,
)

log = get_logger("spectra.verdict")

# Relative agreement required between the slope and -2 <L+^{-1} phi, phi>
VK_IDENTITY_RTOL = 1e-2


class Verdict(enum.StrEnum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"
    DEGENERATE = "degenerate"


@dataclass
class StabilityReport:
    omega: float
    sigma: float
    eigenvalues: np.ndarray = field(repr=False)
    max_real_part: float
    n_Lplus: int
    n_Lminus: int
    dim_ker_Lplus: int
    dim_ker_Lminus: int
    vk_inner: float | None
    slope: float | None
    s_omega: float | None
    verdict: Verdict
    agreement: dict[str, bool] = field(default_factory=dict)
    disagreement: bool = False
    in_marginal_band: bool = False
    symmetry_error: float = 0.0
    gauge_eigenvalue: float = 0.0
    lminus_gap: float = float("nan")
    vk_condition: float | None = None
    config_hash: str = ""
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "omega": self.omega,
            "sigma": self.sigma,
            "max_real_part": self.max_real_part,
            "n_Lplus": self.n_Lplus,
            "n_Lminus": self.n_Lminus,
            "dim_ker_Lplus": self.dim_ker_Lplus,
            "dim_ker_Lminus": self.dim_ker_Lminus,
            "vk_inner": self.vk_inner,
            "slope": self.slope,
            "s_omega": self.s_omega,
            "verdict": str(self.verdict),
            "agreement": dict(self.agreement),
            "disagreement": self.disagreement,
            "in_marginal_band": self.in_marginal_band,
            "symmetry_error": self.symmetry_error,
            "gauge_eigenvalue": self.gauge_eigenvalue,
            "lminus_gap": self.lminus_gap,
            "vk_condition": self.vk_condition,
            "eigenvalue_count": int(len(self.eigenvalues)),
            "config_hash": self.config_hash,
            "notes": list(self.notes),
        }

    def to_text(self) -> str:
        """Flat key=value lines; nested agreement flags become agreement.<name>."""
        lines = []
        for key, value in self.to_dict().items():
            if isinstance(value, dict):
                lines.extend(f"{key}.{k}={v}" for k, v in value.items())
            elif isinstance(value, list):
                lines.append(f"{key}={';'.join(map(str, value))}")
            else:
                lines.append(f"{key}={value}")
        return "\n".join(lines) + "\n"


def _check_provenance(
    profile: WaveProfile, curve: ContinuationCurve | None, config_hash: str
) -> None:
    if curve is None:
        return
    if abs(curve.sigma - profile.sigma) > 1e-12 or curve.dimension != profile.grid.dimension:
        raise ConfigError(
            f"wave (sigma={profile.sigma}, d={profile.grid.dimension}) and curve "
            f"(sigma={curve.sigma}, d={curve.dimension}) come from different configurations"
        )
    if config_hash and curve.provenance and curve.provenance != config_hash:
        raise ProvenanceError(
            f"curve carries config hash {curve.provenance}, report requested for {config_hash}"
        )


def stability_verdict(
    profile: WaveProfile,
    curve: ContinuationCurve | None = None,
    jcurve: ScalarCurve | None = None,
    config_hash: str = "",
    method: SpectrumMethod | str = SpectrumMethod.BLOCK,
) -> StabilityReport:
    """Stable iff max Re lambda < instability_threshold once the gauge pair is removed.

    Marginal when the slope of P sits below the finite-difference noise floor; degenerate
    when L+ has a kernel. The VK, slope and s criteria are compared with the spectrum and any
    disagreement is flagged.
    """
    _check_provenance(profile, curve, config_hash)
    omega, sigma = profile.omega, profile.sigma
    pair = assemble_pair(profile)
    eigenvalues = linearized_spectrum(pair, method)
    operators = operator_report(pair)
    indices = operators.indices
    max_re = max_real_part(eigenvalues)
    spectrally_stable = max_re < settings.instability_threshold
    notes = list(operators.failures)

    vk_value = None
    vk_condition = None
    if indices.dim_ker_Lplus == 0:
        vk = vk_analysis(pair)
        vk_value, vk_condition = vk.value, vk.condition

    slope = None
    s_omega = None
    floor = noise_floor(curve.step) if curve is not None else 0.0
    if curve is not None:
        try:
            slope = slope_criterion(curve, omega)
        except (KeyError, ValueError) as exc:
            notes.append(f"slope unavailable: {exc}")
    if jcurve is not None:
        try:
            s_omega = s_function(jcurve, omega, sigma)
        except (KeyError, ValueError) as exc:
            notes.append(f"s unavailable: {exc}")

    if indices.dim_ker_Lplus > 0:
        verdict = Verdict.DEGENERATE
    elif slope is not None and abs(slope) < floor:
        verdict = Verdict.MARGINAL
    elif spectrally_stable:
        verdict = Verdict.STABLE
    else:
        verdict = Verdict.UNSTABLE

    agreement: dict[str, bool] = {}
    if vk_value is not None and abs(vk_value) >= floor / 2.0:
        agreement["vk"] = (vk_value < 0) == spectrally_stable
    if slope is not None and abs(slope) >= floor:
        agreement["slope"] = (slope > 0) == spectrally_stable
        if vk_value is not None:
            gap = abs(slope + 2.0 * vk_value)
            agreement["vk_identity"] = gap <= VK_IDENTITY_RTOL * abs(slope) + floor
    if s_omega is not None and slope is not None and abs(slope) >= floor:
        agreement["s"] = (s_omega > 0) == (slope > 0)
    disagreement = not all(agreement.values())
    if disagreement:
        log.error(
            "criteria_disagree",
            omega=omega,
            sigma=sigma,
            max_real_part=max_re,
            vk=vk_value,
            slope=slope,
            s=s_omega,
            agreement=agreement,
        )

    in_band = settings.instability_threshold <= max_re < settings.marginal_upper
    if in_band:
        notes.append("max Re lambda in the marginal band; re-check on a doubled box")

    report = StabilityReport(
        omega=omega,
        sigma=sigma,
        eigenvalues=eigenvalues,
        max_real_part=max_re,
        n_Lplus=indices.n_Lplus,
        n_Lminus=indices.n_Lminus,
        dim_ker_Lplus=indices.dim_ker_Lplus,
        dim_ker_Lminus=indices.dim_ker_Lminus,
        vk_inner=vk_value,
        slope=slope,
        s_omega=s_omega,
        verdict=verdict,
        agreement=agreement,
        disagreement=disagreement,
        in_marginal_band=in_band,
        symmetry_error=quadruple_symmetry_error(eigenvalues),
        gauge_eigenvalue=float(np.min(np.abs(eigenvalues))),
        lminus_gap=operators.lminus_gap,
        vk_condition=vk_condition,
        config_hash=config_hash,
        notes=notes,
    )
    log.info("stability_verdict", omega=omega, sigma=sigma, verdict=str(verdict), max_re=max_re)
    return report
