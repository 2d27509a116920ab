"""Exception hierarchy.

Everything raised on purpose by the package derives from :class:`EIError`, so
callers (and the CLI) can separate input problems from statistical ones.
"""


class EIError(Exception):
    """Base class for all package errors."""


class ValidationError(EIError, ValueError):
    """Malformed or out-of-range input (a row, a parameter, a file)."""


class DegenerateError(EIError, ValueError):
    """The data carry no information for the requested quantity.

    Raised for data with no interior prevalence, a group with zero mass,
    or no between-neighborhood variation in prevalence.
    """


class ConfigurationError(EIError, ValueError):
    """Inconsistent assumptions or missing inputs an assumption needs."""


class FeasibilityError(EIError, ValueError):
    """A group-means profile violates the adding-up or range constraints."""


class InsufficientDataError(EIError):
    """Too little usable data (empty strata, no kernel support, ...)."""


class UndefinedDerivativeError(InsufficientDataError):
    """Local-linear slope is not identified at the requested point."""


class NotFoundError(EIError, LookupError):
    """A requested neighborhood or prevalence group does not exist."""


class InstanceTooLargeError(EIError):
    """Brute-force enumeration would exceed the configured cap."""


class BootstrapFailure(EIError):
    """Every bootstrap replicate failed."""


# CLI exit-code classes
INPUT_ERRORS = (ValidationError, ConfigurationError, FeasibilityError, NotFoundError)
STATISTICAL_ERRORS = (DegenerateError, InsufficientDataError, BootstrapFailure, InstanceTooLargeError)
