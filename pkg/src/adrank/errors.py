"""Exception hierarchy shared by all adrank modules.

The CLI maps these onto exit codes: configuration/usage problems exit 1,
data problems exit 2 and numerical failures exit 3.
"""


class AdrankError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(AdrankError):
    """An operation was invoked in a way its contract forbids."""


class ConfigError(AdrankError):
    """Invalid configuration: unknown keys, bad model specs, bad rules."""


class DomainError(AdrankError):
    """An argument lies outside the mathematical domain of a function."""


class ParameterError(AdrankError):
    """A distribution parameter lies outside its admissible domain."""


class SupportError(AdrankError):
    """Sample values are incompatible with the support of a model."""


class DegenerateSampleError(AdrankError):
    """The sample carries no information for a required parameter
    (for example zero variance where a positive scale is needed)."""


class BoundaryError(AdrankError):
    """A statistic is undefined because a CDF value hit 0 or 1."""


class OptimizationInitError(AdrankError):
    """The objective was non-finite at every initial simplex vertex."""


class NumericalError(AdrankError):
    """An iterative numerical procedure failed to converge."""


class FormatError(AdrankError):
    """A file did not match its expected on-disk format."""


class IngestError(AdrankError):
    """Corpus ingestion failed (duplicate ids, empty corpus, ...)."""
