"""Exception types raised by lcplan."""


class LCPlanError(Exception):
    """Base class for every error raised by this package."""


class DomainError(LCPlanError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class NoBandError(LCPlanError):
    """No sample of a response reaches the requested threshold."""


class BandExceedsGridError(LCPlanError):
    """The response never falls back below threshold inside the sampled grid."""


class MultiBandError(LCPlanError):
    """The set of triggering grid points is not a single contiguous run."""

    def __init__(self, message, runs=()):
        super().__init__(message)
        self.runs = list(runs)


class SaturationError(LCPlanError):
    """The spacing rule has no solution below the search cap."""


class LossTableError(LCPlanError, ValueError):
    """A loss table could not be parsed or failed validation."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InsufficientDataError(LossTableError):
    """A loss table has fewer than two data rows."""


class ScheduleError(LCPlanError, ValueError):
    """An actuation schedule is empty or malformed."""
