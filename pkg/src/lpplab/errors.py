"""Exception types raised across lpplab."""


class LppError(Exception):
    """Base class for all lpplab errors."""


class DomainError(LppError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CoordinateOverflowError(DomainError):
    """A lattice point exceeds the coordinate guard."""


class InstanceTooLargeError(DomainError):
    """Brute-force enumeration was asked to visit too many paths."""


class BuildError(LppError, ValueError):
    """A construction could not be built for the requested parameters."""


class InsufficientDataError(LppError, ValueError):
    """A fit was requested with too few usable rows."""


class CampaignAborted(LppError, RuntimeError):
    """A worker failed; ``partial`` holds the records completed so far."""

    def __init__(self, message, partial=()):
        super().__init__(message)
        self.partial = list(partial)
