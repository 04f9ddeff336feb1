"""Exception types shared across the package."""


class PolyscopeError(Exception):
    """Base class for all polyscope errors."""


class ModelFormatError(PolyscopeError):
    """A model file violates the expected text or binary layout."""


class UnknownTokenError(PolyscopeError):
    """A queried token is not in the model vocabulary."""


class DegenerateSumError(PolyscopeError):
    """The vector sum of a set is exactly zero, so its uniformity is undefined."""
