"""Exception types shared by every module."""


class MultexpError(Exception):
    """Base class."""


class DomainError(MultexpError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ResourceError(MultexpError):
    """A request would exceed a configured size cap or memory budget."""


class ResolutionError(DomainError):
    """A grid is too coarse to resolve the features it is asked to measure."""
