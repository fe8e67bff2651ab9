"""Run configuration: a flat key = value file plus command-line overrides."""

from __future__ import annotations

import hashlib
import json
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.core.config import settings
from src.core.errors import ConfigError, IllPosedError
from src.lattice import Boundary
from src.minimize.profiles import Family
from src.minimize.seeds import SeedKind
from src.spectra.spectrum import SpectrumMethod

# Keys of the config file, with the short spellings accepted on the command line
KEY_ALIASES = {
    "d": "dimension",
    "N": "half_width",
    "lambda": "lam",
    "range": "sweep_range",
    "out": "out_dir",
    "seed": "random_seed",
}

# Fields that never influence computed numbers and stay out of the hash
UNHASHED_FIELDS = {"out_dir", "write_spectra"}

# Process settings a run overrides for its own duration
RUN_SETTINGS = ("gradient_tol", "newton_tol", "random_seed")


def parse_range(text: str) -> tuple[float, float, float]:
    """'a:b:step' -> (a, b, step)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"range must look like a:b:step, got {text!r}")
    low, high, step = (float(p) for p in parts)
    if step <= 0:
        raise ValueError(f"range step must be positive, got {step}")
    if not 0 < low <= high:
        raise ValueError(f"range must satisfy 0 < a <= b, got {text!r}")
    return low, high, step


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    dimension: int = Field(1, ge=1, le=3)
    half_width: int = Field(60, ge=1)
    boundary: Boundary = Boundary.ZERO
    sigma: float = Field(1.0, gt=0)
    family: Family = Family.HOMOGENEOUS
    omega: float | None = Field(None, gt=0)
    lam: float | None = Field(None, gt=0)
    sweep_range: tuple[float, float, float] | None = None
    seed_kind: SeedKind = SeedKind.DELTA
    warm_start: bool = True
    override_supercritical: bool = False
    spectrum_method: SpectrumMethod | None = None
    write_spectra: bool = False
    gradient_tol: float = Field(default_factory=lambda: settings.gradient_tol, gt=0)
    newton_tol: float = Field(default_factory=lambda: settings.newton_tol, gt=0)
    random_seed: int = Field(default_factory=lambda: settings.random_seed, ge=0)
    out_dir: Path = Path("results")

    @field_validator("sweep_range", mode="before")
    @classmethod
    def _parse_range(cls, value: Any) -> Any:
        if isinstance(value, str):
            return parse_range(value)
        return value

    @property
    def resolved_spectrum_method(self) -> SpectrumMethod:
        if self.spectrum_method is not None:
            return self.spectrum_method
        return SpectrumMethod.BLOCK if self.dimension == 1 else SpectrumMethod.REDUCED

    def require_parameter(self) -> float:
        """The single solve parameter: lambda for normalized waves, omega otherwise."""
        if self.family is Family.NORMALIZED:
            if self.lam is None:
                raise ConfigError("family=normalized needs --lambda")
            self.require_well_posed()
            return self.lam
        if self.omega is None:
            raise ConfigError(f"family={self.family} needs --omega")
        return self.omega

    def require_range(self) -> tuple[float, float, float]:
        if self.sweep_range is None:
            raise ConfigError("sweep needs --range a:b:step")
        if self.family is Family.NORMALIZED:
            self.require_well_posed()
        return self.sweep_range

    def require_well_posed(self) -> None:
        critical = 2.0 / self.dimension
        if self.sigma >= critical and not self.override_supercritical:
            raise IllPosedError(
                f"fixed-mass problem is ill-posed for sigma={self.sigma} >= 2/d={critical:g} "
                "(the infimum of H is -inf on the whole lattice); "
                "use --override-supercritical for large lambda"
            )

    @contextmanager
    def tolerances(self) -> Iterator[None]:
        """Run with this config's solver tolerances and seed, then restore the process settings."""
        saved = {name: getattr(settings, name) for name in RUN_SETTINGS}
        for name in RUN_SETTINGS:
            setattr(settings, name, getattr(self, name))
        try:
            yield
        finally:
            for name, value in saved.items():
                setattr(settings, name, value)

    def canonical(self) -> dict[str, Any]:
        payload = self.model_dump(mode="json", exclude=UNHASHED_FIELDS)
        payload["settings"] = {
            **settings.solver_tolerances,
            **settings.spectral_thresholds,
            "gradient_tol": self.gradient_tol,
            "newton_tol": self.newton_tol,
        }
        return payload

    @property
    def config_hash(self) -> str:
        text = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:12]


def read_key_values(path: Path) -> dict[str, str]:
    """Lines of `key = value`; blank lines and # comments are skipped."""
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values: dict[str, str] = {}
    for number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{number}: expected key = value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[KEY_ALIASES.get(key, key)] = value
    return values


def load_config(path: Path | None = None, **overrides: Any) -> RunConfig:
    """File values first, then every override that is not None."""
    values: dict[str, Any] = read_key_values(path) if path is not None else {}
    for key, value in overrides.items():
        if value is not None:
            values[KEY_ALIASES.get(key, key)] = value
    try:
        return RunConfig.model_validate(values)
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
