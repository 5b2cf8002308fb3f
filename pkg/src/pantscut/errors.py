"""Exception types used across the package."""


class PantscutError(Exception):
    """Base class for all package errors."""


class MeshValidationError(PantscutError):
    """Raised when a mesh fails manifold/orientation/connectivity checks."""


class FieldError(PantscutError):
    """Raised for invalid scalar fields or solver failures."""


class DecompositionError(PantscutError):
    """Raised when a decomposition cannot be completed."""


class UnsupportedDecomposition(DecompositionError):
    """Raised for inputs the algorithms knowingly do not cover."""
