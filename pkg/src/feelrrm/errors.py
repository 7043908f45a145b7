"""Exception types raised across the package."""


class RRMError(Exception):
    """Base class for all package errors."""


class DomainError(RRMError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class EnergyOverflowError(RRMError, OverflowError):
    """Upload energy exponent exceeded the configured cap."""


class BracketError(RRMError, ValueError):
    """A root bracket does not enclose a sign change."""


class InfeasibleScheduleError(RRMError, ValueError):
    """The schedule admits no bandwidth allocation (e.g. nobody scheduled)."""


class DimensionError(RRMError, ValueError):
    """Problem too large for an exhaustive/grid oracle."""


class ConfigError(RRMError, ValueError):
    """Malformed or inconsistent configuration."""
