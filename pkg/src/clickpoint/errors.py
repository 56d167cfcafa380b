"""Exception hierarchy shared by all clickpoint modules."""


class ClickpointError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ClickpointError):
    """A session file could not be parsed. Carries the 1-based line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class ValidationError(ClickpointError):
    """Parsed data violates an invariant (e.g. non-monotone timestamps)."""


class DomainError(ClickpointError):
    """A model was evaluated outside its input domain (e.g. t_c <= 0)."""


class DegenerateTrialError(ClickpointError):
    """The trial has too few samples for kinematic analysis."""


class NoSubmovementError(ClickpointError):
    """No submovement could be segmented; the trial is excluded from fitting."""


class FitError(ClickpointError):
    """Parameter fitting failed or was attempted on degenerate data."""


class ConfigError(ClickpointError):
    """A scenario/config file is malformed or infeasible."""
