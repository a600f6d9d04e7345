"""
Exception hierarchy shared by the library and the experiment runner.

The runner maps each class to a process exit code (see ``EXIT_CODES``).
"""


class SSMError(Exception):
    """Base class for every error raised by ssmsep."""


class ValidationError(SSMError, ValueError):
    """A precondition of an operation was violated."""


class SolverError(SSMError):
    """A linear solve failed or was too ill-conditioned to trust."""


class NumericAbort(SSMError):
    """Training produced a non-finite loss or parameter."""


class ConfigError(SSMError):
    """An experiment config does not match the documented schema."""


class ReportError(SSMError):
    """Result files needed for a report are missing or corrupt."""


EXIT_CODES = {
    ConfigError: 2,
    ValidationError: 2,
    NumericAbort: 3,
    SolverError: 3,
    OSError: 4,
    ReportError: 5,
}


def exit_code_for(exc: BaseException) -> int:
    for cls, code in EXIT_CODES.items():
        if isinstance(exc, cls):
            return code
    return 1
