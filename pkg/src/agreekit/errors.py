"""Exception hierarchy; each class maps to one CLI exit code."""


class AgreeError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class UsageError(AgreeError):
    """Bad configuration: unknown distance name, invalid parameter, unsupported kind."""

    exit_code = 2


class DataError(AgreeError):
    """Invalid input data: malformed files, broken invariants, impossible requests."""

    exit_code = 3


class NumericError(AgreeError):
    """Degenerate numeric situation, e.g. zero mean expected distance."""

    exit_code = 4
