"""Shared exception types."""


class CapacityError(RuntimeError):
    """Raised when an enumeration would exceed a configured size cap."""
