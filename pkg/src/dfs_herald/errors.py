"""Exception types raised across the package."""


class DfsHeraldError(Exception):
    """Base class for all package errors."""


class RegistryError(DfsHeraldError, ValueError):
    """A rail name is unknown or clashes with another use of the same rail."""


class PhotonCapError(DfsHeraldError, ValueError):
    """A state would exceed the configured photon-number cap."""


class NormalizationError(DfsHeraldError, ValueError):
    """An input that must be normalized is not."""


class UnitarityError(DfsHeraldError, ValueError):
    """An element matrix fails the unitarity check."""


class ZeroProbabilityError(DfsHeraldError):
    """A heralding pattern has zero probability, so no conditional state exists."""

    def __init__(self, pattern):
        super().__init__(f"pattern {pattern} has zero probability")
        self.pattern = pattern


class PhotonLayoutError(DfsHeraldError, ValueError):
    """A state does not carry the photon layout an operation requires."""
