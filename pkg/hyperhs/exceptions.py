"""Exception hierarchy shared by every hyperhs module."""

from typing import Any, Optional, Sequence


class HyperHSError(Exception):
    """Root of all errors raised by hyperhs."""


class DomainError(HyperHSError, ValueError):
    """Argument outside the domain of a special function or kernel."""


class DimensionMismatch(HyperHSError, ValueError):
    pass


class NotTDiagonalizable(HyperHSError):
    """A = A_+ L cannot be brought to pseudo-diagonal form (A_+ near semidefinite)."""


class DegenerateSpectrum(HyperHSError):
    """Two spectrum entries coincide within the degeneracy threshold."""


class ToleranceNotReached(HyperHSError):
    def __init__(self, message: str, estimate: Any = None, achieved_error: float = float("nan")):
        super().__init__(message)
        self.estimate = estimate
        self.achieved_error = achieved_error


class NonConvergentExtrapolation(HyperHSError):
    def __init__(self, message: str, table: Optional[Sequence[complex]] = None):
        super().__init__(message)
        self.table = list(table) if table is not None else []


class ConstraintViolation(HyperHSError):
    pass


class UnknownIdentity(HyperHSError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown identity"


class ConfigError(HyperHSError):
    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        where = ""
        if field:
            where += f" [field: {field}]"
        if line is not None:
            where += f" [line {line}]"
        super().__init__(message + where)
        self.field = field
        self.line = line


class OutsideBand(HyperHSError):
    """Energy outside the band E^2 < 4J."""


class StencilDegeneracy(HyperHSError):
    pass


class EffectiveSampleSizeTooLow(HyperHSError):
    def __init__(self, message: str, ess_fraction: float = 0.0):
        super().__init__(message)
        self.ess_fraction = ess_fraction


class HeavyTailWarning(UserWarning):
    """A handful of Monte Carlo samples carry most of the estimate."""
