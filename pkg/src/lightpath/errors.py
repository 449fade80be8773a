"""Exception types shared by the package."""


class InvalidArgument(ValueError):
    pass


class InvalidPath(ValueError):
    pass


class DomainError(ValueError):
    pass


class CapacityExceeded(RuntimeError):
    """Raised when an exact or exhaustive routine is asked to go past its size cap."""
