"""Exception hierarchy shared by all entenerg modules."""


class EntenergError(Exception):
    """Base class for errors raised by entenerg."""


class ValidationError(EntenergError, ValueError):
    """A physical parameter or input lies outside its admissible domain."""


class ConvergenceError(EntenergError, ArithmeticError):
    """A numerical procedure did not reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class TruncationWarning(UserWarning):
    """A truncated-basis result moved by more than the acceptance threshold."""
