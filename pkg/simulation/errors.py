"""
Exception hierarchy for the quantum battery toolkit.
"""


class QuantumBatteryError(ValueError):
    """Base class for all toolkit errors."""


class InvalidArgumentError(QuantumBatteryError):
    """Raised when an argument violates an operation's precondition."""


class SizeLimitError(QuantumBatteryError):
    """Raised when a requested system size exceeds a configured cap."""

    def __init__(self, message: str, n_sites: int = 0, limit: int = 0):
        super().__init__(message)
        self.n_sites = n_sites
        self.limit = limit


class UnitMismatchError(QuantumBatteryError):
    """Raised when records with different energy unit conventions are compared."""
