"""Symmetric decreasing rearrangement of finite sequences and the edge-energy inequalities."""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from src.core.logger import get_logger

log = get_logger("rearrange.szego")

# Factorial brute force is only run on short inputs
MAX_PERMUTATION_LENGTH = 8

# Relative slack when comparing energies
ENERGY_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class Sequence1D:
    """Finitely supported sequence; `origin` is the array position of index 0."""

    values: np.ndarray
    origin: int = 0

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float).ravel()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def of(cls, values: Sequence[float] | np.ndarray, origin: int = 0) -> Sequence1D:
        return cls(np.asarray(values, dtype=float), origin)

    def __len__(self) -> int:
        return len(self.values)

    def trimmed(self) -> np.ndarray:
        nonzero = np.flatnonzero(self.values)
        if nonzero.size == 0:
            return np.zeros(0)
        return self.values[nonzero[0] : nonzero[-1] + 1]


def symmetric_decreasing_rearrangement(f: Sequence1D) -> Sequence1D:
    """Largest |f_n| at index 0, then alternately +1, -1, +2, -2, ...

    Equal values go to the right slot first.
    """
    ordered = np.sort(np.abs(f.values))[::-1]
    n = len(ordered)
    left = (n - 1) // 2
    out = np.zeros(n)
    for rank, value in enumerate(ordered):
        offset = (rank + 1) // 2 if rank % 2 == 1 else -(rank // 2)
        out[left + offset] = value
    return Sequence1D(out, origin=left)


def edge_energy(f: Sequence1D, p: float) -> float:
    """sum_n |f_{n+1} - f_n|^p, including the edges to the zeros on both sides."""
    if p <= 1:
        raise ValueError(f"p must be > 1, got {p}")
    padded = np.concatenate(([0.0], f.values, [0.0]))
    return float(np.sum(np.abs(np.diff(padded)) ** p))


def is_bell_shaped(f: Sequence1D) -> bool:
    """One-signed and equal to its rearrangement up to translation and reflection."""
    values = f.values
    if np.any(values > 0) and np.any(values < 0):
        return False
    shape = np.abs(Sequence1D(values).trimmed())
    target = symmetric_decreasing_rearrangement(Sequence1D(shape)).trimmed()
    if shape.size != target.size:
        return False
    return bool(np.array_equal(shape, target) or np.array_equal(shape[::-1], target))


@dataclass(frozen=True)
class PermutationReport:
    passed: bool
    reference_energy: float
    permutations_checked: int
    minimal_permutations: list[tuple[int, ...]]
    identity_unique: bool
    violation: tuple[int, ...] | None = None


def _chain_energies(chain_values: np.ndarray, p: float) -> np.ndarray:
    # Rows are orderings of a_0..a_{N+1}; the lattice continues with zeros after the last slot
    jumps = np.abs(np.diff(chain_values, axis=1)) ** p
    return np.sum(jumps, axis=1) + np.abs(chain_values[:, -1]) ** p


def check_permutation_inequality(a: Sequence[float] | np.ndarray, p: float) -> PermutationReport:
    """Brute-force check that the decreasing order minimizes sum |a_mu(j+1) - a_mu(j)|^p."""
    values = np.asarray(a, dtype=float)
    if p <= 1:
        raise ValueError(f"p must be > 1, got {p}")
    if len(values) == 0 or len(values) > MAX_PERMUTATION_LENGTH:
        raise ValueError(f"length must be in 1..{MAX_PERMUTATION_LENGTH}, got {len(values)}")
    if np.any(values < 0) or np.any(np.diff(values) > 0):
        raise ValueError("input must be non-negative and non-increasing")

    symbols = np.append(values, 0.0)
    perms = np.array(list(itertools.permutations(range(len(symbols)))), dtype=int)
    energies = _chain_energies(symbols[perms], p)
    reference = float(_chain_energies(symbols[None, :], p)[0])
    slack = ENERGY_RTOL * max(1.0, reference)

    below = np.flatnonzero(energies < reference - slack)
    if below.size:
        violation = tuple(int(k) for k in perms[below[0]])
        log.warning("permutation_inequality_violated", permutation=violation)
        return PermutationReport(
            passed=False,
            reference_energy=reference,
            permutations_checked=len(perms),
            minimal_permutations=[],
            identity_unique=False,
            violation=violation,
        )

    near_minimal = np.flatnonzero(energies <= reference + slack)
    minimal = [tuple(int(k) for k in perms[i]) for i in near_minimal]
    identity = tuple(range(len(symbols)))
    identity_unique = minimal == [identity]
    strictly_decreasing = bool(np.all(np.diff(symbols) < 0))
    passed = identity_unique or not strictly_decreasing
    return PermutationReport(
        passed=passed,
        reference_energy=reference,
        permutations_checked=len(perms),
        minimal_permutations=minimal,
        identity_unique=identity_unique,
    )


@dataclass(frozen=True)
class SzegoReport:
    energy: float
    rearranged_energy: float
    holds: bool
    equality: bool
    bell_shaped: bool
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.holds and (self.equality == self.bell_shaped)


def check_szego(f: Sequence1D, p: float) -> SzegoReport:
    energy = edge_energy(f, p)
    rearranged = edge_energy(symmetric_decreasing_rearrangement(f), p)
    slack = ENERGY_RTOL * max(1.0, energy)
    holds = energy >= rearranged - slack
    equality = abs(energy - rearranged) <= slack
    bell = is_bell_shaped(f)
    notes = []
    if np.any(f.values > 0) and np.any(f.values < 0):
        notes.append("sign change")
    if not holds:
        log.warning("szego_violated", energy=energy, rearranged=rearranged)
    return SzegoReport(
        energy=energy,
        rearranged_energy=rearranged,
        holds=holds,
        equality=equality,
        bell_shaped=bell,
        notes=notes,
    )
