"""Exception hierarchy shared by the numerical packages and the CLI."""

from __future__ import annotations

# CLI exit codes
EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


class DnlsError(Exception):
    """Base class for every error raised by this package."""

    exit_code = EXIT_NUMERICAL


class ConfigError(DnlsError):
    exit_code = EXIT_CONFIG


class IllPosedError(ConfigError):
    """Fixed-mass minimization requested for sigma >= 2/d without the override flag."""


class ProvenanceError(ConfigError):
    """Inputs carrying different config hashes were combined."""


class SolverError(DnlsError):
    exit_code = EXIT_NUMERICAL


class ConvergenceError(SolverError):
    pass


class DivergenceError(SolverError):
    pass


class VanishingError(SolverError):
    """The iterate spread out or collapsed instead of localizing."""


class DegenerateWaveError(SolverError):
    """Newton Jacobian L+ is singular: the wave is degenerate."""


class BoundViolationError(SolverError):
    """j(omega) fell outside (omega, omega + 2d)."""
