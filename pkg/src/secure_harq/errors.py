"""Exception types raised by the secure HARQ toolkit."""


class SecureHarqError(Exception):
    """Base class for all package errors."""


class ResourceLimitError(SecureHarqError):
    """A Monte-Carlo build would exceed the configured memory budget."""


class ProviderViolationError(SecureHarqError):
    """A CDF provider returned values that are not monotone in ``m``."""


class InfeasibleSearchError(SecureHarqError):
    """No rate in the search interval satisfies the outage constraint."""


class CacheFormatError(SecureHarqError):
    """A cached table file is malformed or does not match the request."""
