"""Exception hierarchy and CLI exit codes."""

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_WINDOW = 3
EXIT_INVARIANT = 4


class RotfactorError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ConfigError(RotfactorError):
    """Bad configuration file or CLI arguments."""

    exit_code = EXIT_CONFIG


class WindowTooSmallError(RotfactorError):
    """The finite sample window is too small for the requested computation."""

    exit_code = EXIT_WINDOW


class InvariantViolation(RotfactorError):
    """An internal invariant failed; indicates an implementation fault."""

    exit_code = EXIT_INVARIANT


class NotGeneratedError(RotfactorError):
    """A difference vector is not generated by the first-return set
    within the search budget."""

    exit_code = EXIT_INVARIANT
