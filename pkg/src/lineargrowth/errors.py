"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ShapeError(ValueError):
    """Fields do not live on the same grid."""


class ConfigError(ValueError):
    """A solver or report configuration is invalid."""


class NumericError(ArithmeticError):
    """A non-finite value appeared during a computation."""


class ImageIOError(OSError):
    """An image or mask file could not be read or written."""
