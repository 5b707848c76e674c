"""Exception hierarchy shared by the services and the command line.

Each class carries the process exit code the CLI reports for it:
2 for usage/configuration/data problems, 3 for IO, 4 for numerical failure.
"""


class SfMaxEntError(Exception):
    """Base class for all sfmaxent failures."""
    exit_code = 1


class DomainError(SfMaxEntError, ValueError):
    """An argument lies outside the domain of an operation (e.g. x <= 0)."""
    exit_code = 2


class ConfigurationError(SfMaxEntError, ValueError):
    """A run configuration or flag combination is invalid."""
    exit_code = 2


class InfeasibleConstraintError(ConfigurationError):
    """A conservation rule cannot be satisfied on the given volume."""

    def __init__(self, rule: str, message: str):
        super().__init__(f"infeasible constraint '{rule}': {message}")
        self.rule = rule


class DataFormatError(SfMaxEntError, ValueError):
    """Tabular input could not be parsed; carries the offending line if known."""
    exit_code = 2

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InsufficientDataError(SfMaxEntError, ValueError):
    """Too few observations (or zero variance) for a statistic."""
    exit_code = 2


class NumericalError(SfMaxEntError, ArithmeticError):
    """A root finder or integral did not converge."""
    exit_code = 4

    def __init__(self, message: str, residual: float | None = None):
        if residual is not None:
            message = f"{message} (residual={residual:.3e})"
        super().__init__(message)
        self.residual = residual


class OutputError(SfMaxEntError, OSError):
    """Reading or writing a run artifact failed."""
    exit_code = 3
