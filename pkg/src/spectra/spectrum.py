"""Eigenvalues of the linearized evolution and the Morse indices of L+ and L-."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg
from scipy.spatial import cKDTree

from src.core.config import settings
from src.core.errors import SolverError
from src.core.logger import get_logger
from src.spectra.operators import LinearizedPair

log = get_logger("spectra.spectrum")

# Allowed angle between the kernel vector of L- and phi
KERNEL_ANGLE_TOL = 1e-6


class SpectrumMethod(enum.StrEnum):
    BLOCK = "block"
    REDUCED = "reduced"


def block_matrix(pair: LinearizedPair) -> np.ndarray:
    """[[0, -L-], [L+, 0]] acting on (Re v, Im v)."""
    n = pair.size
    block = np.zeros((2 * n, 2 * n))
    block[:n, n:] = -pair.Lminus
    block[n:, :n] = pair.Lplus
    return block


def _sorted(eigenvalues: np.ndarray) -> np.ndarray:
    order = np.lexsort((eigenvalues.imag, eigenvalues.real))
    return eigenvalues[order]


def linearized_spectrum(
    pair: LinearizedPair, method: SpectrumMethod | str = SpectrumMethod.BLOCK
) -> np.ndarray:
    """All 2n eigenvalues, sorted by real part then imaginary part.

    The reduced method takes +-sqrt of the eigenvalues of -L- L+, which is the square of
    the block operator restricted to one component; it costs an n x n instead of a 2n x 2n
    nonsymmetric solve.
    """
    method = SpectrumMethod(method)
    try:
        if method is SpectrumMethod.BLOCK:
            eigenvalues = scipy.linalg.eigvals(block_matrix(pair))
        else:
            squares = scipy.linalg.eigvals(-pair.Lminus @ pair.Lplus).astype(complex)
            roots = np.sqrt(squares)
            eigenvalues = np.concatenate((roots, -roots))
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"eigensolver failed at omega={pair.omega}: {exc}") from exc
    if not np.all(np.isfinite(eigenvalues)):
        raise SolverError(f"eigensolver returned non-finite values at omega={pair.omega}")
    return _sorted(eigenvalues)


def _mirror_distance(points: np.ndarray, images: np.ndarray) -> float:
    tree = cKDTree(np.column_stack((points.real, points.imag)))
    distances, _ = tree.query(np.column_stack((images.real, images.imag)))
    return float(np.max(distances)) if distances.size else 0.0


def quadruple_symmetry_error(eigenvalues: np.ndarray) -> float:
    """How far the set is from being closed under lambda -> -lambda and lambda -> conj(lambda)."""
    return max(
        _mirror_distance(eigenvalues, -eigenvalues),
        _mirror_distance(eigenvalues, np.conj(eigenvalues)),
    )


def block_identity_error(pair: LinearizedPair, eigenvalues: np.ndarray) -> float:
    """Relative distance from each eigenvalue of -L- L+ to the nearest squared eigenvalue."""
    squares = scipy.linalg.eigvals(-pair.Lminus @ pair.Lplus)
    tree = cKDTree(np.column_stack(((eigenvalues**2).real, (eigenvalues**2).imag)))
    distances, _ = tree.query(np.column_stack((squares.real, squares.imag)))
    return float(np.max(distances / np.maximum(1.0, np.abs(squares))))


def exclude_gauge(eigenvalues: np.ndarray, count: int = 2) -> np.ndarray:
    """Drop the `count` eigenvalues closest to zero (the phase-invariance cluster)."""
    if count <= 0 or len(eigenvalues) <= count:
        return eigenvalues
    keep = np.argsort(np.abs(eigenvalues))[count:]
    return eigenvalues[np.sort(keep)]


def max_real_part(eigenvalues: np.ndarray, exclude: int = 2) -> float:
    return float(np.max(exclude_gauge(eigenvalues, exclude).real))


class MorseIndices(NamedTuple):
    n_Lplus: int
    n_Lminus: int
    dim_ker_Lplus: int
    dim_ker_Lminus: int


@dataclass(frozen=True)
class OperatorReport:
    """Index counts plus the ground-state properties of L+ and L-."""

    indices: MorseIndices
    lplus_eigenvalues: np.ndarray = field(repr=False)
    lminus_eigenvalues: np.ndarray = field(repr=False)
    kernel_angle: float | None
    lminus_gap: float
    el_identity_error: float
    failures: list[str] = field(default_factory=list)

    @property
    def ground_state(self) -> bool:
        return not self.failures


def _counts(eigenvalues: np.ndarray, scale: float) -> tuple[int, int]:
    negative = int(np.sum(eigenvalues < -settings.negative_threshold))
    kernel = int(np.sum(np.abs(eigenvalues) < settings.kernel_threshold * scale))
    return negative, kernel


def morse_indices(pair: LinearizedPair) -> MorseIndices:
    return operator_report(pair).indices


def operator_report(pair: LinearizedPair) -> OperatorReport:
    """Counts with thresholds -negative_threshold and |lambda| < kernel_threshold * ||pair||.

    The ground-state expectations n(L+)=1, n(L-)=0, Ker L- = span{phi} are reported, not
    raised.
    """
    scale = pair.norm
    w_plus = scipy.linalg.eigh(pair.Lplus, eigvals_only=True)
    w_minus, v_minus = scipy.linalg.eigh(pair.Lminus)
    n_plus, ker_plus = _counts(w_plus, scale)
    n_minus, ker_minus = _counts(w_minus, scale)
    indices = MorseIndices(n_plus, n_minus, ker_plus, ker_minus)

    phi = pair.phi.vector
    phi_norm = float(np.linalg.norm(phi))
    failures = []
    angle = None
    if phi_norm > 0:
        if ker_minus == 1:
            kernel = v_minus[:, int(np.argmin(np.abs(w_minus)))]
            cosine = min(1.0, abs(float(kernel @ phi)) / phi_norm)
            angle = float(np.arccos(cosine))
            if angle >= KERNEL_ANGLE_TOL:
                failures.append(f"Ker L- not parallel to phi (angle {angle:.3e})")
        if (n_plus, n_minus, ker_minus) != (1, 0, 1):
            failures.append(f"indices {tuple(indices)} differ from a ground state's (1, 0, *, 1)")

    potential = float(np.sum(np.abs(phi) ** (2.0 * pair.sigma + 2.0)))
    quadratic = float(phi @ (pair.Lplus @ phi))
    expected = -2.0 * pair.sigma * potential
    el_error = abs(quadratic - expected) / max(abs(expected), 1e-300) if potential else 0.0

    # second eigenvalue of L-: the gap above the gauge mode
    gap = float(w_minus[1]) if len(w_minus) > 1 else float("nan")
    if failures:
        log.warning("operator_index_mismatch", omega=pair.omega, failures=failures)
    return OperatorReport(
        indices=indices,
        lplus_eigenvalues=w_plus,
        lminus_eigenvalues=w_minus,
        kernel_angle=angle,
        lminus_gap=gap,
        el_identity_error=el_error,
        failures=failures,
    )
