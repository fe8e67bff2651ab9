"""The linearized operators L+ and L- about a standing wave."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from src.core.errors import ConvergenceError
from src.core.logger import get_logger
from src.lattice import Field
from src.minimize.newton import lminus_matrix, lplus_matrix, residual_tolerance
from src.minimize.profiles import WaveProfile

log = get_logger("spectra.operators")

# Largest residual a wave may carry into the linearization (scaled like the Newton tolerance)
MAX_PROFILE_RESIDUAL = 1e-10

# Symmetry slack for the assembled matrices
SYMMETRY_TOL = 1e-12


def profile_hash(profile: WaveProfile) -> str:
    digest = hashlib.sha256()
    digest.update(np.ascontiguousarray(profile.phi.values).tobytes())
    digest.update(f"{profile.sigma!r}:{profile.omega!r}:{profile.grid}".encode())
    return digest.hexdigest()[:12]


@dataclass(frozen=True, eq=False)
class LinearizedPair:
    Lplus: np.ndarray
    Lminus: np.ndarray
    omega: float
    sigma: float
    phi: Field
    source_hash: str

    @property
    def size(self) -> int:
        return self.Lplus.shape[0]

    @property
    def norm(self) -> float:
        """max of the inf-norms of L+ and L-."""
        return float(max(np.linalg.norm(self.Lplus, np.inf), np.linalg.norm(self.Lminus, np.inf)))

    def gauge_residual(self) -> float:
        """||L- phi||: the profile equation evaluated at phi."""
        return float(np.linalg.norm(self.Lminus @ self.phi.vector))


def assemble_pair(profile: WaveProfile) -> LinearizedPair:
    """Dense L+ and L-; the nonlinear terms are (2 sigma + 1) phi^{2 sigma} and phi^{2 sigma}."""
    phi, sigma, omega = profile.phi, profile.sigma, profile.omega
    limit = residual_tolerance(phi, sigma, MAX_PROFILE_RESIDUAL)
    if profile.residual > limit:
        raise ConvergenceError(
            f"profile at omega={omega} is not converged: "
            f"residual {profile.residual:.3e} > {limit:.3e}"
        )
    pair = LinearizedPair(
        Lplus=lplus_matrix(phi, sigma, omega),
        Lminus=lminus_matrix(phi, sigma, omega),
        omega=omega,
        sigma=sigma,
        phi=phi,
        source_hash=profile_hash(profile),
    )
    asymmetry = max(
        float(np.max(np.abs(pair.Lplus - pair.Lplus.T))),
        float(np.max(np.abs(pair.Lminus - pair.Lminus.T))),
    )
    if asymmetry > SYMMETRY_TOL:
        log.warning("pair_not_symmetric", omega=omega, asymmetry=asymmetry)
    gauge = pair.gauge_residual()
    if gauge > limit:
        log.warning("gauge_residual_large", omega=omega, residual=gauge)
    return pair
