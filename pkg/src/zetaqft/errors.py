"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: ``ConfigError`` -> 1,
``NumericalError`` (and subclasses) -> 2, ``ResourceLimitError`` -> 3.
"""


class ZetaQFTError(Exception):
    pass


class ConfigError(ZetaQFTError, ValueError):
    """Invalid parameters or configuration."""


class DomainError(ConfigError):
    """Argument outside the domain of an operation."""


class NumericalError(ZetaQFTError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""


class ConvergenceError(NumericalError):
    """A series or iteration exceeded its term budget."""


class ToleranceError(NumericalError):
    """An error estimate exceeds the requested tolerance."""


class WindowExhaustedError(NumericalError):
    """Fewer zeros than requested were found below the search limit."""


class ResourceLimitError(ZetaQFTError):
    """A computation would exceed a configured size or time budget."""

    def __init__(self, message, completed=None):
        super().__init__(message)
        self.completed = completed
