"""Exception types.

The ``category`` attribute is what the command line front-end reports; it also
picks the process exit code.
"""


class HoaError(Exception):
    category = "usage"


class DomainError(HoaError, ValueError):
    """Argument outside the mathematical domain of a function."""

    category = "numerical"


class ConditioningError(HoaError):
    """Encoding problem is rank deficient or too ill-conditioned."""

    category = "numerical"


class ConfigError(HoaError, ValueError):
    """Inconsistent parameters (geometry vs. filter bank, sample rates...)."""

    category = "usage"


class GeometryError(HoaError, ValueError):
    """Malformed or invalid array geometry description."""

    category = "io"


class WavFormatError(HoaError, ValueError):
    """Unreadable or unsupported WAV data."""

    category = "io"
