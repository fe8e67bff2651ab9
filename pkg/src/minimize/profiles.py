"""Result types of the variational solvers: waves, continuation curves, scalar curves."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from src.lattice import Field, FunctionalValues, Grid, dirichlet_form


class Family(enum.StrEnum):
    NORMALIZED = "normalized"
    HOMOGENEOUS = "homogeneous"
    PROFILE = "profile"


class CurveName(enum.StrEnum):
    H = "h"
    C = "c"
    J = "j"
    S = "s"
    DPDOMEGA = "dPdomega"
    P = "P"


@dataclass(frozen=True, eq=False)
class WaveProfile:
    """A converged standing wave.

    `field` is what the solver minimized over (u on its constraint sphere, or phi itself for
    family=profile). `phi` always solves -Delta phi + omega phi - phi^{2 sigma + 1} = 0 at
    frequency `omega`, and `residual` is the l2 norm of that equation at `phi`.
    """

    grid: Grid
    sigma: float
    field: Field
    family: Family
    parameter: float
    multiplier: float | None
    residual: float
    functionals: FunctionalValues
    phi: Field
    omega: float
    iterations: int = 0
    is_trivial: bool = False
    box_capped: bool = False
    notes: tuple[str, ...] = ()

    @property
    def phi_mass(self) -> float:
        return float(np.sum(self.phi.values**2))

    def with_notes(self, *notes: str) -> WaveProfile:
        return replace(self, notes=self.notes + notes)

    def metadata(self) -> dict[str, Any]:
        return {
            "sigma": self.sigma,
            "family": str(self.family),
            "parameter": self.parameter,
            "multiplier": self.multiplier,
            "omega": self.omega,
            "residual": self.residual,
            "iterations": self.iterations,
            "is_trivial": self.is_trivial,
            "box_capped": self.box_capped,
            "notes": list(self.notes),
            "grid": {
                "dimension": self.grid.dimension,
                "half_width": self.grid.half_width,
                "boundary": str(self.grid.boundary),
            },
            "functionals": self.functionals.to_dict(),
            "phi_mass": self.phi_mass,
        }


@dataclass(frozen=True)
class CurveSample:
    """One converged point of a frequency sweep; P, V and H are evaluated on phi_omega."""

    omega: float
    P: float
    V: float
    H: float
    j: float
    wave: WaveProfile | None = field(default=None, repr=False, compare=False)

    @property
    def phi_mass(self) -> float:
        return self.P

    @classmethod
    def from_wave(cls, wave: WaveProfile) -> CurveSample:
        if wave.multiplier is None:
            raise ValueError("sweep samples need a homogeneous wave carrying j(omega)")
        values = wave.phi
        mass = float(np.sum(values.values**2))
        potential = float(np.sum(np.abs(values.values) ** (2.0 * wave.sigma + 2.0)))
        kinetic = dirichlet_form(values)
        return cls(
            omega=wave.omega,
            P=mass,
            V=potential,
            H=kinetic - potential / (wave.sigma + 1.0),
            j=wave.multiplier,
            wave=wave,
        )


@dataclass
class ContinuationCurve:
    sigma: float
    dimension: int
    step: float
    provenance: str = ""
    samples: list[CurveSample] = field(default_factory=list)
    gaps: list[float] = field(default_factory=list)

    def append(self, sample: CurveSample) -> None:
        if self.samples and sample.omega <= self.samples[-1].omega:
            raise ValueError(
                f"samples must increase in omega: {sample.omega} after {self.samples[-1].omega}"
            )
        self.samples.append(sample)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([s.omega for s in self.samples])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.samples], dtype=float)

    def sample_at(self, omega: float, tol: float = 1e-9) -> CurveSample:
        for sample in self.samples:
            if abs(sample.omega - omega) <= tol:
                return sample
        raise KeyError(f"no converged sample at omega={omega}")

    def rows(self) -> list[dict[str, float]]:
        return [{"omega": s.omega, "P": s.P, "V": s.V, "H": s.H, "j": s.j} for s in self.samples]


@dataclass(frozen=True, eq=False)
class ScalarCurve:
    name: CurveName
    abscissae: np.ndarray
    ordinates: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.abscissae, dtype=float)
        y = np.asarray(self.ordinates, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("abscissae and ordinates must be 1-d arrays of equal length")
        if np.any(np.diff(x) <= 0):
            raise ValueError(f"abscissae of curve {self.name} must be strictly increasing")
        object.__setattr__(self, "name", CurveName(self.name))
        object.__setattr__(self, "abscissae", x)
        object.__setattr__(self, "ordinates", y)

    def __len__(self) -> int:
        return len(self.abscissae)

    def index_of(self, x: float, tol: float = 1e-9) -> int:
        hits = np.flatnonzero(np.abs(self.abscissae - x) <= tol)
        if hits.size == 0:
            raise KeyError(f"{x} is not a sample of curve {self.name}")
        return int(hits[0])

    def at(self, x: float) -> float:
        return float(self.ordinates[self.index_of(x)])
