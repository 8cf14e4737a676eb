"""Exception hierarchy shared by every module of the package."""


class TruthHypError(Exception):
    """Base class for all package errors."""


class ClaimsParseError(TruthHypError):
    """A claims or truth file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ModeError(TruthHypError):
    """Data violates the single-valued / multi-valued mode contract."""


class ConsistencyError(TruthHypError):
    """Two inputs that must describe the same data disagree."""


class ConfigError(TruthHypError):
    """An invalid or unsatisfiable configuration."""


class ContractError(TruthHypError):
    """A numerical routine received input outside its contract."""


class NumericalError(TruthHypError):
    """An iterative computation produced non-finite values."""
