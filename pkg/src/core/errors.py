"""Exception hierarchy shared by the simulation library and the CLI."""


class SpinCavityError(Exception):
    """Base class for all library errors.

    Each subclass carries the process exit code the CLI reports for it.
    """

    exit_code = 3


class ParameterError(SpinCavityError, ValueError):
    """Inconsistent or out-of-range model/experiment parameters."""

    exit_code = 2


class ConfigError(SpinCavityError):
    """Missing config file, unknown keys or unusable experiment settings."""

    exit_code = 2


class CaseError(SpinCavityError):
    """Perturbative routine called outside its cavity-parity regime."""

    exit_code = 2


class UnsupportedCaseError(CaseError):
    """No closed form exists for the requested parity case."""


class SizeError(SpinCavityError):
    """A Hilbert-space size guard was exceeded."""


class ValidationError(SpinCavityError):
    """Operator or state failed a structural check (Hermiticity, norm, shape)."""


class AccuracyError(SpinCavityError):
    """Integrator did not converge under step halving."""


EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_BUDGET = 4


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the CLI exit code."""
    if isinstance(error, SpinCavityError):
        return error.exit_code
    return EXIT_NUMERIC
