"""Exception hierarchy.

The CLI maps these onto exit codes: ConfigError -> 2, numerical failures
(CflError, ChordArcError, DomainError, ...) -> 3, I/O problems -> 4.
"""


class EulerAlphaError(Exception):
    """Base class for all package errors."""


class DomainError(EulerAlphaError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class MeanFreeError(DomainError):
    """Operation requires a mean-free (zero total vorticity) field."""


class CflError(EulerAlphaError):
    """Time step violates the CFL bound; carries the measured max speed."""

    def __init__(self, dt, limit, max_speed):
        self.dt = dt
        self.limit = limit
        self.max_speed = max_speed
        super().__init__(
            f"dt={dt!r} exceeds CFL limit {limit!r} "
            f"(measured max speed {max_speed!r})"
        )


class ChordArcError(EulerAlphaError):
    """Contour chord-arc ratio collapsed below the configured floor."""


class SelfIntersectionError(EulerAlphaError):
    """Contour crossed itself (segment-segment test at output cadence)."""


class GridMismatchError(EulerAlphaError):
    """Two trajectories/fields do not share grid, cadence, or initial data."""


class BoxTooSmallError(EulerAlphaError):
    """Evaluation box does not contain the patches with the required margin."""


class SnapshotFormatError(EulerAlphaError):
    """Snapshot file is malformed or has an unsupported header."""


class ConfigError(EulerAlphaError):
    """Configuration failed schema or semantic validation."""
